#ifndef UNIALG_ALGEBRA_HPP_
#define UNIALG_ALGEBRA_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "unialg/error.hpp"

namespace unialg {

  using Element = std::uint32_t;

  // Default cap on the number of elements of any constructed algebra.
  inline constexpr std::size_t default_size_cap = 1'000'000;

  struct Symbol {
    std::string name;
    std::size_t arity;

    bool operator==(Symbol const&) const = default;
  };

  // Ordered list of operation symbols. Order matters: tables, serialization
  // and witness-term tie-breaking all follow it.
  class Signature {
   public:
    Signature() = default;

    explicit Signature(std::vector<Symbol> symbols) {
      for (auto& s : symbols) {
        add(std::move(s));
      }
    }

    void add(Symbol s) {
      if (find(s.name)) {
        throw Error("duplicate operation symbol '" + s.name + "'");
      }
      _symbols.push_back(std::move(s));
    }

    std::size_t size() const noexcept {
      return _symbols.size();
    }

    Symbol const& operator[](std::size_t i) const {
      return _symbols[i];
    }

    std::optional<std::size_t> find(std::string const& name) const {
      auto it = std::find_if(_symbols.cbegin(),
                             _symbols.cend(),
                             [&name](Symbol const& s) { return s.name == name; });
      if (it == _symbols.cend()) {
        return std::nullopt;
      }
      return static_cast<std::size_t>(it - _symbols.cbegin());
    }

    std::size_t index_of(std::string const& name) const {
      auto i = find(name);
      if (!i) {
        throw Error("unknown operation symbol '" + name + "'");
      }
      return *i;
    }

    std::size_t max_arity() const noexcept {
      std::size_t m = 0;
      for (auto const& s : _symbols) {
        m = std::max(m, s.arity);
      }
      return m;
    }

    auto begin() const noexcept {
      return _symbols.cbegin();
    }
    auto end() const noexcept {
      return _symbols.cend();
    }

    bool operator==(Signature const&) const = default;

   private:
    std::vector<Symbol> _symbols;
  };

  // n^k, or nullopt if it does not fit below `limit`.
  inline std::optional<std::size_t> checked_power(std::size_t n,
                                                  std::size_t k,
                                                  std::size_t limit) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < k; ++i) {
      if (n != 0 && r > limit / n) {
        return std::nullopt;
      }
      r *= n;
    }
    if (r > limit) {
      return std::nullopt;
    }
    return r;
  }

  // A finite algebra on the universe {0, ..., n - 1} given by total
  // operation tables. Tables are row-major with the leftmost argument most
  // significant; a nullary symbol has a single entry.
  class FiniteAlgebra {
   public:
    using Table = std::vector<Element>;

    FiniteAlgebra() = default;

    FiniteAlgebra(std::string name,
                  std::size_t size,
                  Signature sig,
                  std::vector<Table> tables)
        : _name(std::move(name)),
          _size(size),
          _sig(std::move(sig)),
          _tables(std::move(tables)) {
      validate();
    }

    std::string const& name() const noexcept {
      return _name;
    }
    void set_name(std::string name) {
      _name = std::move(name);
    }
    std::size_t size() const noexcept {
      return _size;
    }
    Signature const& signature() const noexcept {
      return _sig;
    }
    std::size_t arity(std::size_t op) const {
      return _sig[op].arity;
    }
    Table const& table(std::size_t op) const {
      return _tables[op];
    }
    std::vector<Table> const& tables() const noexcept {
      return _tables;
    }

    std::size_t table_index(std::span<Element const> args) const noexcept {
      std::size_t idx = 0;
      for (Element a : args) {
        idx = idx * _size + a;
      }
      return idx;
    }

    Element apply(std::size_t op, std::span<Element const> args) const {
      return _tables[op][table_index(args)];
    }

    Element apply(std::size_t op, std::initializer_list<Element> args) const {
      return apply(op, std::span<Element const>(args.begin(), args.size()));
    }

    // Tables and signature only; the name is presentation.
    bool operator==(FiniteAlgebra const& that) const {
      return _size == that._size && _sig == that._sig
             && _tables == that._tables;
    }

   private:
    void validate() const {
      if (_size == 0) {
        throw Error("algebra '" + _name + "' has empty universe");
      }
      if (_tables.size() != _sig.size()) {
        throw Error("algebra '" + _name + "': " + std::to_string(_sig.size())
                    + " symbols but " + std::to_string(_tables.size())
                    + " tables");
      }
      for (std::size_t i = 0; i < _sig.size(); ++i) {
        auto expected = checked_power(_size, _sig[i].arity, SIZE_MAX);
        if (!expected || _tables[i].size() != *expected) {
          throw Error("operation '" + _sig[i].name + "': expected "
                      + (expected ? std::to_string(*expected) : "too many")
                      + " entries, got " + std::to_string(_tables[i].size()));
        }
        for (Element e : _tables[i]) {
          if (e >= _size) {
            throw Error("operation '" + _sig[i].name + "': entry "
                        + std::to_string(e) + " out of range");
          }
        }
      }
    }

    std::string        _name;
    std::size_t        _size = 0;
    Signature          _sig;
    std::vector<Table> _tables;
  };

  // A genuine two-element subset {lo, hi} with lo < hi.
  struct UnorderedPair {
    Element lo;
    Element hi;

    static UnorderedPair make(Element a, Element b) {
      if (a == b) {
        throw Error("pair {" + std::to_string(a) + "," + std::to_string(b)
                    + "} is not a 2-element set");
      }
      return a < b ? UnorderedPair{a, b} : UnorderedPair{b, a};
    }

    bool contains(Element x) const noexcept {
      return x == lo || x == hi;
    }

    auto operator<=>(UnorderedPair const&) const = default;
  };

  // Visit every tuple of {0..n-1}^k in lexicographic order (leftmost
  // coordinate most significant). `f` receives a span of the tuple.
  template <typename F>
  void for_each_tuple(std::size_t n, std::size_t k, F&& f) {
    std::vector<Element> t(k, 0);
    if (n == 0 && k > 0) {
      return;
    }
    while (true) {
      f(std::span<Element const>(t));
      std::size_t i = k;
      while (i > 0) {
        --i;
        if (++t[i] < n) {
          break;
        }
        t[i] = 0;
        if (i == 0) {
          return;
        }
      }
      if (k == 0) {
        return;
      }
    }
  }

}  // namespace unialg

#endif  // UNIALG_ALGEBRA_HPP_
