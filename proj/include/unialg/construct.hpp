#ifndef UNIALG_CONSTRUCT_HPP_
#define UNIALG_CONSTRUCT_HPP_

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "unialg/algebra.hpp"
#include "unialg/closure.hpp"
#include "unialg/partition.hpp"
#include "unialg/term.hpp"

namespace unialg {

  struct Subuniverse {
    // Discovery order: the seeds (deduplicated) first, then by round.
    std::vector<Element> elements;
    // witness[i] evaluates to elements[i] when x_j is sent to seed j.
    // Empty unless requested.
    std::vector<Term> witness;

    std::vector<Element> sorted() const {
      auto s = elements;
      std::sort(s.begin(), s.end());
      return s;
    }
  };

  // Least subuniverse containing `seeds`.
  inline Subuniverse generate_subalgebra(FiniteAlgebra const&        a,
                                         std::vector<Element> const& seeds,
                                         bool with_terms = false) {
    for (Element s : seeds) {
      if (s >= a.size()) {
        throw Error("seed " + std::to_string(s) + " not in the universe");
      }
    }
    auto const           ar = arities_of(a.signature());
    std::vector<Element> args;
    auto                 res = bfs_closure(
        seeds,
        std::span<std::size_t const>(ar),
        [](Element e) { return e; },
        [&](std::size_t op, std::span<Element const* const> xs) {
          args.clear();
          for (auto p : xs) {
            args.push_back(*p);
          }
          return a.apply(op, args);
        },
        [](std::size_t, Element, Element, Origin const&) { return true; },
        SIZE_MAX);
    Subuniverse out{std::move(res.elements), {}};
    if (with_terms) {
      std::vector<Term> seed_terms;
      for (std::size_t i = 0; i < seeds.size(); ++i) {
        seed_terms.push_back(Term::var(i));
      }
      out.witness = origin_terms(res.origins, a.signature(), seed_terms);
    }
    return out;
  }

  struct Embedded {
    FiniteAlgebra        algebra;
    std::vector<Element> elements;  // new index -> old element, ascending
  };

  // The subalgebra on a subuniverse, renumbered in ascending order.
  inline Embedded subalgebra(FiniteAlgebra const&  a,
                             std::vector<Element>  subuniverse,
                             std::string const&    name = "") {
    std::sort(subuniverse.begin(), subuniverse.end());
    subuniverse.erase(std::unique(subuniverse.begin(), subuniverse.end()),
                      subuniverse.end());
    if (subuniverse.empty()) {
      throw Error("empty subuniverse");
    }
    std::vector<Element> pos(a.size(), Element(-1));
    for (Element i = 0; i < subuniverse.size(); ++i) {
      pos.at(subuniverse[i]) = i;
    }
    std::vector<FiniteAlgebra::Table> tables;
    std::vector<Element>              args;
    for (std::size_t op = 0; op < a.signature().size(); ++op) {
      FiniteAlgebra::Table t;
      for_each_tuple(subuniverse.size(),
                     a.arity(op),
                     [&](std::span<Element const> tup) {
                       args.clear();
                       for (Element x : tup) {
                         args.push_back(subuniverse[x]);
                       }
                       Element v = pos[a.apply(op, args)];
                       if (v == Element(-1)) {
                         throw Error("subset is not closed under '"
                                     + a.signature()[op].name + "'");
                       }
                       t.push_back(v);
                     });
      tables.push_back(std::move(t));
    }
    return {FiniteAlgebra(name.empty() ? a.name() + "_sub" : name,
                          subuniverse.size(),
                          a.signature(),
                          std::move(tables)),
            std::move(subuniverse)};
  }

  // A^j on {0..n^j-1}; element e encodes the tuple of its base-n digits,
  // first coordinate most significant.
  inline Capped<FiniteAlgebra> direct_power(FiniteAlgebra const& a,
                                            std::size_t          j,
                                            std::size_t cap = default_size_cap) {
    if (j == 0) {
      throw Error("direct power exponent must be positive");
    }
    auto n = checked_power(a.size(), j, cap);
    if (!n) {
      return CapExceeded{"|A|^" + std::to_string(j) + " exceeds cap "
                             + std::to_string(cap),
                         cap};
    }
    auto const N = *n;
    // Tables grow as N^arity; cap those as well.
    for (auto const& s : a.signature()) {
      if (!checked_power(N, s.arity, cap * 64)) {
        return CapExceeded{"table of '" + s.name + "' on " + std::to_string(N)
                               + " elements exceeds cap",
                           N};
      }
    }
    // digits[e][c] = coordinate c of element e
    std::vector<std::vector<Element>> digits(N, std::vector<Element>(j));
    for (std::size_t e = 0; e < N; ++e) {
      std::size_t v = e;
      for (std::size_t c = j; c-- > 0;) {
        digits[e][c] = static_cast<Element>(v % a.size());
        v /= a.size();
      }
    }
    std::vector<FiniteAlgebra::Table> tables;
    std::vector<Element>              args;
    for (std::size_t op = 0; op < a.signature().size(); ++op) {
      FiniteAlgebra::Table t;
      t.reserve(*checked_power(N, a.arity(op), SIZE_MAX));
      for_each_tuple(N, a.arity(op), [&](std::span<Element const> tup) {
        std::size_t code = 0;
        for (std::size_t c = 0; c < j; ++c) {
          args.clear();
          for (Element x : tup) {
            args.push_back(digits[x][c]);
          }
          code = code * a.size() + a.apply(op, args);
        }
        t.push_back(static_cast<Element>(code));
      });
      tables.push_back(std::move(t));
    }
    return FiniteAlgebra(a.name() + "^" + std::to_string(j),
                         N,
                         a.signature(),
                         std::move(tables));
  }

  // Coordinates of an element of A^j as encoded by direct_power.
  inline std::vector<Element>
  power_coordinates(std::size_t base, std::size_t j, Element e) {
    std::vector<Element> out(j);
    for (std::size_t c = j; c-- > 0;) {
      out[c] = static_cast<Element>(e % base);
      e      = static_cast<Element>(e / base);
    }
    return out;
  }

  class NotACongruence : public Error {
   public:
    using Error::Error;
  };

  // Empty string if `theta` is a congruence, else a description of the
  // first violation found.
  inline std::string congruence_violation(FiniteAlgebra const& a,
                                          Partition const&     theta) {
    if (theta.universe_size() != a.size()) {
      return "partition is on " + std::to_string(theta.universe_size())
             + " elements, algebra has " + std::to_string(a.size());
    }
    // Compatibility with basic translations suffices: check each argument
    // position against each related pair (x, rep(x)).
    std::vector<Element> args;
    for (std::size_t op = 0; op < a.signature().size(); ++op) {
      std::size_t const k = a.arity(op);
      if (k == 0) {
        continue;
      }
      for (Element x = 0; x < a.size(); ++x) {
        Element r = theta.rep(x);
        if (r == x) {
          continue;
        }
        for (std::size_t pos = 0; pos < k; ++pos) {
          std::string bad;
          for_each_tuple(a.size(), k - 1, [&](std::span<Element const> par) {
            if (!bad.empty()) {
              return;
            }
            args.assign(par.begin(), par.end());
            args.insert(args.begin() + pos, x);
            Element u = a.apply(op, args);
            args[pos] = r;
            Element v = a.apply(op, args);
            if (!theta.related(u, v)) {
              bad = "'" + a.signature()[op].name + "' at argument "
                    + std::to_string(pos) + " with parameters (";
              for (std::size_t i = 0; i < par.size(); ++i) {
                bad += (i ? "," : "") + std::to_string(par[i]);
              }
              bad += ") maps related " + std::to_string(x) + "~"
                     + std::to_string(r) + " to unrelated "
                     + std::to_string(u) + "," + std::to_string(v);
            }
          });
          if (!bad.empty()) {
            return bad;
          }
        }
      }
    }
    return {};
  }

  inline bool is_congruence(FiniteAlgebra const& a, Partition const& theta) {
    return congruence_violation(a, theta).empty();
  }

  struct Quotient {
    FiniteAlgebra        algebra;
    std::vector<Element> block_of;  // element -> block index
  };

  // A/theta with blocks numbered by least element.
  inline Quotient quotient_algebra(FiniteAlgebra const& a,
                                   Partition const&     theta) {
    if (auto why = congruence_violation(a, theta); !why.empty()) {
      throw NotACongruence("not a congruence: " + why);
    }
    auto                 block = theta.block_index();
    std::size_t const    k     = theta.block_count();
    std::vector<Element> least;
    for (Element x = 0; x < a.size(); ++x) {
      if (theta.rep(x) == x) {
        least.push_back(x);
      }
    }
    std::vector<FiniteAlgebra::Table> tables;
    std::vector<Element>              args;
    for (std::size_t op = 0; op < a.signature().size(); ++op) {
      FiniteAlgebra::Table t;
      for_each_tuple(k, a.arity(op), [&](std::span<Element const> tup) {
        args.clear();
        for (Element b : tup) {
          args.push_back(least[b]);
        }
        t.push_back(block[a.apply(op, args)]);
      });
      tables.push_back(std::move(t));
    }
    return {FiniteAlgebra(a.name() + "_quo", k, a.signature(), std::move(tables)),
            std::move(block)};
  }

}  // namespace unialg

#endif  // UNIALG_CONSTRUCT_HPP_
