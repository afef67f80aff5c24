#ifndef UNIALG_CLOSURE_HPP_
#define UNIALG_CLOSURE_HPP_

#include <cstddef>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "unialg/algebra.hpp"
#include "unialg/term.hpp"

namespace unialg {

  // Hash for element vectors, so they can key a closure directly.
  struct VectorHash {
    std::size_t operator()(std::vector<Element> const& v) const noexcept {
      std::size_t h = 0xcbf29ce484222325ULL;
      for (Element e : v) {
        h ^= e + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      }
      return h;
    }
  };

  namespace detail {
    template <typename Key>
    struct KeyHash {
      using type = std::hash<Key>;
    };
    template <>
    struct KeyHash<std::vector<Element>> {
      using type = VectorHash;
    };
  }  // namespace detail

  // How an element entered a closure: as seed number `index`, or as
  // op(args...) where args index earlier elements.
  struct Origin {
    static constexpr std::size_t seed = SIZE_MAX;

    std::size_t              op    = seed;
    std::size_t              index = 0;
    std::vector<std::size_t> args;

    bool is_seed() const noexcept {
      return op == seed;
    }
  };

  enum class ClosureStatus { complete, cap_exceeded, aborted };

  template <typename Value>
  struct ClosureResult {
    std::vector<Value>       elements;
    std::vector<Origin>      origins;
    std::vector<std::size_t> depth;
    ClosureStatus            status = ClosureStatus::complete;
  };

  // Breadth-first closure of `seeds` under operations of the given arities.
  //
  // Round r applies every operation, in signature order, to every argument
  // tuple over the elements known at the start of the round, in
  // lexicographic order of discovery index, skipping tuples already tried in
  // round r - 1. New values get depth r, so every element is reached by a
  // term of least depth and the discovery order is deterministic.
  //
  // key_of(value) identifies elements. When a computed value's key is
  // already present, collide(existing_index, existing_value, value, origin)
  // is called; it returns false to abort the closure.
  //
  // The closure stops with cap_exceeded once it holds more than `cap`
  // elements or has made more than `max_applications` operation calls.
  template <typename Value, typename KeyOf, typename Apply, typename Collide>
  ClosureResult<Value> bfs_closure(std::vector<Value>           seeds,
                                   std::span<std::size_t const> arities,
                                   KeyOf&&                      key_of,
                                   Apply&&                      apply,
                                   Collide&&                    collide,
                                   std::size_t                  cap,
                                   std::size_t max_applications = SIZE_MAX) {
    using Key = std::decay_t<decltype(key_of(std::declval<Value const&>()))>;
    ClosureResult<Value>                                 res;
    std::unordered_map<Key, std::size_t, typename detail::KeyHash<Key>::type>
                                                         index;

    auto add = [&](Value&& v, Origin&& o, std::size_t d) -> bool {
      auto [it, fresh] = index.try_emplace(key_of(v), res.elements.size());
      if (!fresh) {
        if (!collide(it->second, res.elements[it->second], v, o)) {
          res.status = ClosureStatus::aborted;
          return false;
        }
        return true;
      }
      res.elements.push_back(std::move(v));
      res.origins.push_back(std::move(o));
      res.depth.push_back(d);
      if (res.elements.size() > cap) {
        res.status = ClosureStatus::cap_exceeded;
        return false;
      }
      return true;
    };

    for (std::size_t i = 0; i < seeds.size(); ++i) {
      if (!add(std::move(seeds[i]), Origin{Origin::seed, i, {}}, 0)) {
        return res;
      }
    }

    std::size_t               prev_start   = 0;
    std::size_t               applications = 0;
    std::vector<Value const*> argv;
    for (std::size_t round = 1;; ++round) {
      std::size_t const known = res.elements.size();
      if (round > 1 && known == prev_start) {
        break;
      }
      for (std::size_t op = 0; op < arities.size(); ++op) {
        std::size_t const k = arities[op];
        if (k == 0) {
          // Constants depend on nothing, so they are only tried once.
          if (round != 1) {
            continue;
          }
        }
        bool stop = false;
        for_each_tuple(known, k, [&](std::span<Element const> t) {
          if (stop) {
            return;
          }
          bool has_new = (k == 0);
          for (Element x : t) {
            if (x >= prev_start) {
              has_new = true;
              break;
            }
          }
          if (!has_new) {
            return;
          }
          if (++applications > max_applications) {
            res.status = ClosureStatus::cap_exceeded;
            stop       = true;
            return;
          }
          argv.clear();
          for (Element x : t) {
            argv.push_back(&res.elements[x]);
          }
          Value v = apply(op, std::span<Value const* const>(argv));
          Origin o{op, 0, std::vector<std::size_t>(t.begin(), t.end())};
          if (!add(std::move(v), std::move(o), round)) {
            stop = true;
          }
        });
        if (stop) {
          return res;
        }
      }
      prev_start = known;
    }
    return res;
  }

  // Terms for every element of a closure, given one term per seed.
  inline std::vector<Term> origin_terms(std::vector<Origin> const& origins,
                                        Signature const&           sig,
                                        std::vector<Term> const&   seed_terms) {
    std::vector<Term> out;
    out.reserve(origins.size());
    for (auto const& o : origins) {
      if (o.is_seed()) {
        out.push_back(seed_terms.at(o.index));
      } else {
        std::vector<Term> args;
        args.reserve(o.args.size());
        for (auto a : o.args) {
          args.push_back(out[a]);
        }
        out.push_back(Term::apply(sig[o.op].name, std::move(args)));
      }
    }
    return out;
  }

  inline std::vector<std::size_t> arities_of(Signature const& sig) {
    std::vector<std::size_t> out;
    for (auto const& s : sig) {
      out.push_back(s.arity);
    }
    return out;
  }

}  // namespace unialg

#endif  // UNIALG_CLOSURE_HPP_
