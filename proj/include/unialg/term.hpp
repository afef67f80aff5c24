#ifndef UNIALG_TERM_HPP_
#define UNIALG_TERM_HPP_

#include <cctype>
#include <cstddef>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "unialg/algebra.hpp"

namespace unialg {

  // A term over some signature: a variable x_i or a symbol applied to
  // argument terms. Subterms are shared, so terms built bottom-up by the
  // closure routines are DAGs and cheap to copy.
  class Term {
    struct Node {
      std::size_t       var;  // meaningful only when symbol is empty
      std::string       symbol;
      std::vector<Term> args;
    };

   public:
    Term() : Term(var(0)) {}

    static Term var(std::size_t index) {
      return Term(std::make_shared<Node const>(Node{index, {}, {}}));
    }

    static Term apply(std::string symbol, std::vector<Term> args) {
      if (symbol.empty()) {
        throw Error("empty operation symbol in term");
      }
      return Term(
          std::make_shared<Node const>(Node{0, std::move(symbol), std::move(args)}));
    }

    bool is_var() const noexcept {
      return _node->symbol.empty();
    }
    std::size_t var_index() const noexcept {
      return _node->var;
    }
    std::string const& symbol() const noexcept {
      return _node->symbol;
    }
    std::vector<Term> const& args() const noexcept {
      return _node->args;
    }

    // Identity of the shared node, used to memoise over DAGs.
    void const* id() const noexcept {
      return _node.get();
    }

    // One more than the largest variable index, 0 for ground terms.
    std::size_t variable_bound() const {
      std::unordered_map<void const*, std::size_t> memo;
      return variable_bound(memo);
    }

    std::size_t depth() const {
      std::unordered_map<void const*, std::size_t> memo;
      return depth(memo);
    }

    // Parenthesised prefix syntax: x0, (m x0 (m x1 x2)). Nullary symbols
    // print as (c).
    std::string to_string() const {
      std::string out;
      write(out);
      return out;
    }

    friend bool operator==(Term const& a, Term const& b) {
      if (a._node == b._node) {
        return true;
      }
      if (a.is_var() != b.is_var()) {
        return false;
      }
      if (a.is_var()) {
        return a.var_index() == b.var_index();
      }
      return a.symbol() == b.symbol() && a.args() == b.args();
    }

   private:
    explicit Term(std::shared_ptr<Node const> n) : _node(std::move(n)) {}

    std::size_t
    variable_bound(std::unordered_map<void const*, std::size_t>& memo) const {
      if (is_var()) {
        return var_index() + 1;
      }
      if (auto it = memo.find(id()); it != memo.end()) {
        return it->second;
      }
      std::size_t r = 0;
      for (auto const& a : args()) {
        r = std::max(r, a.variable_bound(memo));
      }
      memo.emplace(id(), r);
      return r;
    }

    std::size_t depth(std::unordered_map<void const*, std::size_t>& memo) const {
      if (is_var()) {
        return 0;
      }
      if (auto it = memo.find(id()); it != memo.end()) {
        return it->second;
      }
      std::size_t r = 0;
      for (auto const& a : args()) {
        r = std::max(r, a.depth(memo));
      }
      memo.emplace(id(), r + 1);
      return r + 1;
    }

    void write(std::string& out) const {
      if (is_var()) {
        out += "x" + std::to_string(var_index());
        return;
      }
      out += '(';
      out += symbol();
      for (auto const& a : args()) {
        out += ' ';
        a.write(out);
      }
      out += ')';
    }

    std::shared_ptr<Node const> _node;
  };

  namespace detail {
    class TermReader {
     public:
      explicit TermReader(std::string_view text) : _text(text) {}

      Term read() {
        skip_ws();
        if (_pos >= _text.size()) {
          fail("unexpected end of term");
        }
        if (_text[_pos] == '(') {
          ++_pos;
          auto sym = token();
          if (sym.empty()) {
            fail("missing operation symbol");
          }
          std::vector<Term> args;
          while (true) {
            skip_ws();
            if (_pos >= _text.size()) {
              fail("unbalanced parenthesis");
            }
            if (_text[_pos] == ')') {
              ++_pos;
              break;
            }
            args.push_back(read());
          }
          return Term::apply(std::string(sym), std::move(args));
        }
        auto tok = token();
        if (tok.size() < 2 || tok[0] != 'x') {
          fail("expected a variable x<i>, got '" + std::string(tok) + "'");
        }
        std::size_t idx = 0;
        for (char c : tok.substr(1)) {
          if (!std::isdigit(static_cast<unsigned char>(c))) {
            fail("bad variable '" + std::string(tok) + "'");
          }
          idx = idx * 10 + static_cast<std::size_t>(c - '0');
        }
        return Term::var(idx);
      }

      std::size_t position() const noexcept {
        return _pos;
      }

      void skip_ws() {
        while (_pos < _text.size()
               && std::isspace(static_cast<unsigned char>(_text[_pos]))) {
          ++_pos;
        }
      }

     private:
      std::string_view token() {
        skip_ws();
        auto start = _pos;
        while (_pos < _text.size()
               && !std::isspace(static_cast<unsigned char>(_text[_pos]))
               && _text[_pos] != '(' && _text[_pos] != ')') {
          ++_pos;
        }
        return _text.substr(start, _pos - start);
      }

      [[noreturn]] void fail(std::string const& msg) const {
        throw Error("term syntax error at offset " + std::to_string(_pos)
                    + ": " + msg);
      }

      std::string_view _text;
      std::size_t      _pos = 0;
    };
  }  // namespace detail

  // Parses a term occupying all of `text`.
  inline Term parse_term(std::string_view text) {
    detail::TermReader r(text);
    Term               t = r.read();
    r.skip_ws();
    if (r.position() != text.size()) {
      throw Error("trailing characters after term '" + std::string(text) + "'");
    }
    return t;
  }

  // Parses one term from the front of `text` and advances `text` past it.
  inline Term read_term(std::string_view& text) {
    detail::TermReader r(text);
    Term               t = r.read();
    text.remove_prefix(r.position());
    return t;
  }

  // Replace each x_i by subst[i].
  inline Term substitute(Term const& t, std::vector<Term> const& subst) {
    std::unordered_map<void const*, Term> memo;
    auto go = [&](auto& self, Term const& u) -> Term {
      if (u.is_var()) {
        if (u.var_index() >= subst.size()) {
          throw Error("substitution misses variable x"
                      + std::to_string(u.var_index()));
        }
        return subst[u.var_index()];
      }
      if (auto it = memo.find(u.id()); it != memo.end()) {
        return it->second;
      }
      std::vector<Term> args;
      args.reserve(u.args().size());
      for (auto const& a : u.args()) {
        args.push_back(self(self, a));
      }
      Term r = Term::apply(u.symbol(), std::move(args));
      memo.emplace(u.id(), r);
      return r;
    };
    return go(go, t);
  }

  // A term resolved against an algebra's signature and flattened into
  // straight-line code (one slot per distinct DAG node).
  class CompiledTerm {
    struct Instr {
      std::size_t              op;  // SIZE_MAX marks a variable load
      std::size_t              var;
      std::vector<std::size_t> args;
    };

   public:
    CompiledTerm(FiniteAlgebra const& a, Term const& t) : _alg(&a) {
      std::unordered_map<void const*, std::size_t> slot;
      _result = compile(t, slot);
      std::size_t width = 0;
      for (auto const& in : _code) {
        width = std::max(width, in.args.size());
      }
      _scratch.resize(width);
      _values.resize(_code.size());
    }

    std::size_t variable_bound() const noexcept {
      return _vars;
    }

    // Not thread-safe: uses internal scratch storage.
    Element operator()(std::span<Element const> assignment) const {
      if (assignment.size() < _vars) {
        throw Error("assignment has " + std::to_string(assignment.size())
                    + " values but the term uses "
                    + std::to_string(_vars) + " variables");
      }
      for (std::size_t i = 0; i < _code.size(); ++i) {
        auto const& in = _code[i];
        if (in.op == SIZE_MAX) {
          _values[i] = assignment[in.var];
        } else {
          for (std::size_t j = 0; j < in.args.size(); ++j) {
            _scratch[j] = _values[in.args[j]];
          }
          _values[i] = _alg->apply(
              in.op, std::span<Element const>(_scratch.data(), in.args.size()));
        }
      }
      return _values[_result];
    }

   private:
    std::size_t compile(Term const& t,
                        std::unordered_map<void const*, std::size_t>& slot) {
      if (auto it = slot.find(t.id()); it != slot.end()) {
        return it->second;
      }
      Instr in{SIZE_MAX, 0, {}};
      if (t.is_var()) {
        in.var = t.var_index();
        _vars  = std::max(_vars, in.var + 1);
      } else {
        auto op = _alg->signature().find(t.symbol());
        if (!op) {
          throw Error("unknown operation symbol '" + t.symbol() + "'");
        }
        if (_alg->arity(*op) != t.args().size()) {
          throw Error("arity mismatch: '" + t.symbol() + "' has arity "
                      + std::to_string(_alg->arity(*op)) + ", applied to "
                      + std::to_string(t.args().size()) + " arguments");
        }
        in.op = *op;
        for (auto const& a : t.args()) {
          in.args.push_back(compile(a, slot));
        }
      }
      _code.push_back(std::move(in));
      slot.emplace(t.id(), _code.size() - 1);
      return _code.size() - 1;
    }

    FiniteAlgebra const*         _alg;
    std::vector<Instr>           _code;
    std::size_t                  _result = 0;
    std::size_t                  _vars   = 0;
    mutable std::vector<Element> _scratch;
    mutable std::vector<Element> _values;
  };

  inline Element eval_term(FiniteAlgebra const&     a,
                           Term const&              t,
                           std::span<Element const> assignment) {
    return CompiledTerm(a, t)(assignment);
  }

  inline Element eval_term(FiniteAlgebra const&           a,
                           Term const&                    t,
                           std::initializer_list<Element> assignment) {
    return eval_term(
        a, t, std::span<Element const>(assignment.begin(), assignment.size()));
  }

  struct Identity {
    Term        left;
    Term        right;
    std::size_t variable_count;

    Identity(Term l, Term r)
        : left(std::move(l)),
          right(std::move(r)),
          variable_count(std::max(left.variable_bound(),
                                  right.variable_bound())) {}

    Identity(Term l, Term r, std::size_t vc)
        : left(std::move(l)), right(std::move(r)), variable_count(vc) {
      if (std::max(left.variable_bound(), right.variable_bound()) > vc) {
        throw Error("identity uses a variable index >= "
                    + std::to_string(vc));
      }
    }

    std::string to_string() const {
      return left.to_string() + " = " + right.to_string();
    }
  };

  // Empty optional: the identity holds. Otherwise the lexicographically
  // least failing assignment (x0 most significant).
  inline std::optional<std::vector<Element>>
  check_identity(FiniteAlgebra const& a, Identity const& e) {
    CompiledTerm                        lhs(a, e.left), rhs(a, e.right);
    std::vector<Element>                t(e.variable_count, 0);
    std::size_t const                   n = a.size();
    while (true) {
      if (lhs(t) != rhs(t)) {
        return t;
      }
      std::size_t i = t.size();
      bool        done = true;
      while (i > 0) {
        --i;
        if (++t[i] < n) {
          done = false;
          break;
        }
        t[i] = 0;
      }
      if (done) {
        return std::nullopt;
      }
    }
  }

}  // namespace unialg

#endif  // UNIALG_TERM_HPP_
