#ifndef UNIALG_ALG_IO_HPP_
#define UNIALG_ALG_IO_HPP_

#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "unialg/algebra.hpp"

namespace unialg {

  // The .alg text format:
  //
  //   # comment
  //   algebra <identifier>
  //   size <n>
  //   op <name> <arity>
  //   <n^arity integers, row-major, leftmost argument most significant>
  //   ...
  //
  // Table entries may be spread over any number of lines.

  namespace detail {
    inline std::vector<std::string> split_ws(std::string const& line) {
      std::istringstream       in(line);
      std::vector<std::string> out;
      std::string              tok;
      while (in >> tok) {
        out.push_back(tok);
      }
      return out;
    }

    inline bool is_identifier(std::string const& s) {
      if (s.empty()) {
        return false;
      }
      for (char c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_'
            && c != '-' && c != '.' && c != '\'') {
          return false;
        }
      }
      return true;
    }

    inline std::size_t parse_count(std::string const& tok, std::size_t line) {
      std::size_t v   = 0;
      auto        res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
        throw ParseError(line, "expected a nonnegative integer, got '" + tok + "'");
      }
      return v;
    }
  }  // namespace detail

  inline FiniteAlgebra parse_algebra(std::istream& in) {
    std::string                        name;
    std::size_t                        size = 0;
    bool                               have_size = false;
    Signature                          sig;
    std::vector<FiniteAlgebra::Table>  tables;
    std::size_t                        expected = 0;  // entries still owed
    std::size_t                        op_line  = 0;
    std::string                        line;
    std::size_t                        lineno = 0;

    auto close_op = [&](std::size_t at) {
      if (expected != 0) {
        auto want = tables.back().size() + expected;
        throw ParseError(at,
                         "operation '" + sig[sig.size() - 1].name
                             + "' (line " + std::to_string(op_line)
                             + "): expected " + std::to_string(want)
                             + " entries, got "
                             + std::to_string(tables.back().size()));
      }
    };

    while (std::getline(in, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) {
        line.erase(hash);
      }
      auto toks = detail::split_ws(line);
      if (toks.empty()) {
        continue;
      }
      if (expected > 0 && std::isdigit(static_cast<unsigned char>(toks[0][0]))) {
        for (auto const& t : toks) {
          auto v = detail::parse_count(t, lineno);
          if (expected == 0) {
            throw ParseError(lineno,
                             "operation '" + sig[sig.size() - 1].name
                                 + "': expected "
                                 + std::to_string(tables.back().size())
                                 + " entries, got more");
          }
          if (v >= size) {
            throw ParseError(lineno,
                             "entry " + t + " out of range for size "
                                 + std::to_string(size));
          }
          tables.back().push_back(static_cast<Element>(v));
          --expected;
        }
        continue;
      }
      close_op(lineno);
      auto const& kw = toks[0];
      if (kw == "algebra") {
        if (toks.size() != 2 || !detail::is_identifier(toks[1])) {
          throw ParseError(lineno, "expected 'algebra <identifier>'");
        }
        if (!name.empty()) {
          throw ParseError(lineno, "duplicate 'algebra' line");
        }
        name = toks[1];
      } else if (kw == "size") {
        if (toks.size() != 2) {
          throw ParseError(lineno, "expected 'size <n>'");
        }
        if (have_size) {
          throw ParseError(lineno, "duplicate 'size' line");
        }
        size = detail::parse_count(toks[1], lineno);
        if (size == 0) {
          throw ParseError(lineno, "size must be positive");
        }
        have_size = true;
      } else if (kw == "op") {
        if (!have_size) {
          throw ParseError(lineno, "'op' before 'size'");
        }
        if (toks.size() != 3 || !detail::is_identifier(toks[1])) {
          throw ParseError(lineno, "expected 'op <name> <arity>'");
        }
        if (sig.find(toks[1])) {
          throw ParseError(lineno, "duplicate operation '" + toks[1] + "'");
        }
        auto arity = detail::parse_count(toks[2], lineno);
        auto count = checked_power(size, arity, default_size_cap * 64);
        if (!count) {
          throw ParseError(lineno, "table for '" + toks[1] + "' too large");
        }
        sig.add({toks[1], arity});
        tables.emplace_back();
        tables.back().reserve(*count);
        expected = *count;
        op_line  = lineno;
      } else {
        throw ParseError(lineno, "unexpected '" + kw + "'");
      }
    }
    close_op(lineno);
    if (name.empty()) {
      throw ParseError(lineno, "missing 'algebra <identifier>' line");
    }
    if (!have_size) {
      throw ParseError(lineno, "missing 'size <n>' line");
    }
    return FiniteAlgebra(name, size, std::move(sig), std::move(tables));
  }

  inline FiniteAlgebra parse_algebra(std::string const& text) {
    std::istringstream in(text);
    return parse_algebra(in);
  }

  inline FiniteAlgebra load_algebra(std::string const& path) {
    std::ifstream in(path);
    if (!in) {
      throw Error("cannot read '" + path + "'");
    }
    return parse_algebra(in);
  }

  // Canonical text: one table row per line (the last argument varies along
  // a row).
  inline std::string serialize_algebra(FiniteAlgebra const& a) {
    std::ostringstream out;
    out << "algebra " << (a.name().empty() ? "A" : a.name()) << '\n';
    out << "size " << a.size() << '\n';
    for (std::size_t op = 0; op < a.signature().size(); ++op) {
      auto const& s = a.signature()[op];
      out << "op " << s.name << ' ' << s.arity << '\n';
      auto const& t   = a.table(op);
      std::size_t row = s.arity == 0 ? 1 : a.size();
      for (std::size_t i = 0; i < t.size(); ++i) {
        out << t[i] << ((i + 1) % row == 0 ? '\n' : ' ');
      }
    }
    return out.str();
  }

}  // namespace unialg

#endif  // UNIALG_ALG_IO_HPP_
