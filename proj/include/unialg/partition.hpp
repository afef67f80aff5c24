#ifndef UNIALG_PARTITION_HPP_
#define UNIALG_PARTITION_HPP_

#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "unialg/algebra.hpp"

namespace unialg {

  // Plain union-find with path halving. Unions keep the smaller root, so
  // roots are always least elements of their classes.
  class UnionFind {
   public:
    explicit UnionFind(std::size_t n) : _parent(n) {
      std::iota(_parent.begin(), _parent.end(), Element(0));
    }

    Element find(Element x) {
      while (_parent[x] != x) {
        x = _parent[x] = _parent[_parent[x]];
      }
      return x;
    }

    // true if two classes were merged
    bool unite(Element a, Element b) {
      a = find(a);
      b = find(b);
      if (a == b) {
        return false;
      }
      if (b < a) {
        std::swap(a, b);
      }
      _parent[b] = a;
      return true;
    }

    std::size_t size() const noexcept {
      return _parent.size();
    }

   private:
    std::vector<Element> _parent;
  };

  // An equivalence relation on {0..n-1}, stored as the map sending each
  // element to the least element of its block. This form is canonical, so
  // equality of partitions is equality of the maps.
  class Partition {
   public:
    Partition() = default;

    static Partition identity(std::size_t n) {
      Partition p;
      p._rep.resize(n);
      std::iota(p._rep.begin(), p._rep.end(), Element(0));
      return p;
    }

    static Partition total(std::size_t n) {
      Partition p;
      p._rep.assign(n, 0);
      return p;
    }

    static Partition from(UnionFind& uf) {
      Partition p;
      p._rep.resize(uf.size());
      for (Element x = 0; x < uf.size(); ++x) {
        p._rep[x] = uf.find(x);
      }
      return p;
    }

    // Blocks may be listed in any order.
    static Partition from_blocks(std::size_t                              n,
                                 std::vector<std::vector<Element>> const& blocks) {
      UnionFind uf(n);
      for (auto const& b : blocks) {
        for (Element x : b) {
          if (x >= n) {
            throw Error("block element " + std::to_string(x)
                        + " out of range");
          }
          uf.unite(b.front(), x);
        }
      }
      return from(uf);
    }

    std::size_t universe_size() const noexcept {
      return _rep.size();
    }

    Element rep(Element x) const {
      return _rep[x];
    }

    std::vector<Element> const& reps() const noexcept {
      return _rep;
    }

    bool related(Element a, Element b) const {
      return _rep[a] == _rep[b];
    }

    bool is_identity() const {
      for (Element x = 0; x < _rep.size(); ++x) {
        if (_rep[x] != x) {
          return false;
        }
      }
      return true;
    }

    bool is_total() const {
      for (Element r : _rep) {
        if (r != 0) {
          return false;
        }
      }
      return true;
    }

    std::size_t block_count() const {
      std::size_t c = 0;
      for (Element x = 0; x < _rep.size(); ++x) {
        c += (_rep[x] == x);
      }
      return c;
    }

    // Blocks sorted by least element, each sorted ascending.
    std::vector<std::vector<Element>> blocks() const {
      std::vector<std::size_t> which(_rep.size());
      std::vector<std::vector<Element>> out;
      for (Element x = 0; x < _rep.size(); ++x) {
        if (_rep[x] == x) {
          which[x] = out.size();
          out.emplace_back();
        }
        out[which[_rep[x]]].push_back(x);
      }
      return out;
    }

    // Index of each element's block in blocks().
    std::vector<Element> block_index() const {
      std::vector<Element> idx(_rep.size());
      Element              next = 0;
      for (Element x = 0; x < _rep.size(); ++x) {
        idx[x] = (_rep[x] == x) ? next++ : idx[_rep[x]];
      }
      return idx;
    }

    // this ⊆ that
    bool leq(Partition const& that) const {
      check_same(that);
      for (Element x = 0; x < _rep.size(); ++x) {
        if (!that.related(x, _rep[x])) {
          return false;
        }
      }
      return true;
    }

    Partition meet(Partition const& that) const {
      check_same(that);
      UnionFind uf(_rep.size());
      // Elements with the same pair of representatives form one block.
      std::vector<std::vector<std::pair<Element, Element>>> seen(_rep.size());
      for (Element x = 0; x < _rep.size(); ++x) {
        auto& bucket = seen[_rep[x]];
        bool  found  = false;
        for (auto const& [r2, first] : bucket) {
          if (r2 == that._rep[x]) {
            uf.unite(first, x);
            found = true;
            break;
          }
        }
        if (!found) {
          bucket.emplace_back(that._rep[x], x);
        }
      }
      return from(uf);
    }

    Partition join(Partition const& that) const {
      check_same(that);
      UnionFind uf(_rep.size());
      for (Element x = 0; x < _rep.size(); ++x) {
        uf.unite(x, _rep[x]);
        uf.unite(x, that._rep[x]);
      }
      return from(uf);
    }

    // "[[0,1],[2]]"
    std::string to_string() const {
      std::string out = "[";
      bool        first_block = true;
      for (auto const& b : blocks()) {
        out += first_block ? "[" : ",[";
        first_block = false;
        for (std::size_t i = 0; i < b.size(); ++i) {
          out += (i ? "," : "") + std::to_string(b[i]);
        }
        out += "]";
      }
      return out + "]";
    }

    auto operator<=>(Partition const&) const = default;

   private:
    void check_same(Partition const& that) const {
      if (that._rep.size() != _rep.size()) {
        throw Error("partitions on universes of different sizes ("
                    + std::to_string(_rep.size()) + " and "
                    + std::to_string(that._rep.size()) + ")");
      }
    }

    std::vector<Element> _rep;
  };

  // Parses "[[0,1],[2]]"; every element of the universe must appear once.
  inline Partition parse_partition(std::string const& text, std::size_t n) {
    std::vector<std::vector<Element>> blocks;
    std::vector<bool>                 seen(n, false);
    int                               level = 0;
    std::string                       num;
    auto flush = [&]() {
      if (num.empty()) {
        return;
      }
      auto v = std::stoul(num);
      num.clear();
      if (v >= n || seen[v]) {
        throw Error("bad partition '" + text + "'");
      }
      seen[v] = true;
      blocks.back().push_back(static_cast<Element>(v));
    };
    for (char c : text) {
      if (c == '[') {
        if (++level == 2) {
          blocks.emplace_back();
        }
      } else if (c == ']') {
        if (level == 2) {
          flush();
        }
        --level;
      } else if (c == ',') {
        if (level == 2) {
          flush();
        }
      } else if (c >= '0' && c <= '9' && level == 2) {
        num += c;
      } else if (c != ' ') {
        throw Error("bad partition '" + text + "'");
      }
    }
    for (bool s : seen) {
      if (!s || level != 0) {
        throw Error("partition '" + text + "' does not cover the universe");
      }
    }
    for (auto const& b : blocks) {
      if (b.empty()) {
        throw Error("empty block in partition '" + text + "'");
      }
    }
    return Partition::from_blocks(n, blocks);
  }

}  // namespace unialg

#endif  // UNIALG_PARTITION_HPP_
