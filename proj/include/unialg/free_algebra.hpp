#ifndef UNIALG_FREE_ALGEBRA_HPP_
#define UNIALG_FREE_ALGEBRA_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "unialg/algebra.hpp"
#include "unialg/closure.hpp"
#include "unialg/construct.hpp"
#include "unialg/term.hpp"

namespace unialg {

  inline constexpr std::size_t default_free_cap    = 200'000;
  inline constexpr std::size_t default_column_cap  = std::size_t(1) << 20;
  // Coordinate evaluations allowed in one closure.
  inline constexpr std::size_t default_work_cap    = std::size_t(1) << 26;

  // Vectors over A indexed by the assignments {0..|A|-1}^n (row-major,
  // leftmost generator most significant).
  inline std::vector<Element> projection_vector(std::size_t base,
                                                std::size_t n,
                                                std::size_t i) {
    std::size_t const    cols = *checked_power(base, n, SIZE_MAX);
    std::vector<Element> v(cols);
    std::size_t          stride = *checked_power(base, n - 1 - i, SIZE_MAX);
    for (std::size_t c = 0; c < cols; ++c) {
      v[c] = static_cast<Element>((c / stride) % base);
    }
    return v;
  }

  namespace detail {
    // Coordinatewise application of op to element vectors.
    inline std::vector<Element>
    apply_columns(FiniteAlgebra const&                           a,
                  std::size_t                                    op,
                  std::span<std::vector<Element> const* const> xs,
                  std::size_t                                    cols,
                  std::vector<Element>&                          args) {
      std::vector<Element> out(cols);
      for (std::size_t c = 0; c < cols; ++c) {
        args.clear();
        for (auto p : xs) {
          args.push_back((*p)[c]);
        }
        out[c] = a.apply(op, args);
      }
      return out;
    }
  }  // namespace detail

  // F_{HSP(A)}(n) as the subalgebra of A^(A^n) generated by the
  // projections. Elements are in discovery order; representative[i] is a
  // least-depth term for element i.
  struct FreeAlgebra {
    FiniteAlgebra                     base;
    std::size_t                       generator_count = 0;
    std::size_t                       columns         = 0;
    std::vector<std::vector<Element>> elements;
    std::vector<Term>                 representative;
    std::vector<std::size_t>          generator_indices;

    std::size_t size() const noexcept {
      return elements.size();
    }

    std::optional<std::size_t> find(std::vector<Element> const& v) const {
      for (std::size_t i = 0; i < elements.size(); ++i) {
        if (elements[i] == v) {
          return i;
        }
      }
      return std::nullopt;
    }

    // Index of the element named by a term in x0..x{n-1}.
    std::size_t element_of(Term const& t) const {
      CompiledTerm         f(base, t);
      std::vector<Element> v(columns);
      for (std::size_t c = 0; c < columns; ++c) {
        auto assignment = power_coordinates(base.size(), generator_count, c);
        v[c]            = f(assignment);
      }
      auto i = find(v);
      if (!i) {
        throw Error("term " + t.to_string() + " is not in the free algebra");
      }
      return *i;
    }

    // The free algebra as a FiniteAlgebra on {0..size-1}.
    Capped<FiniteAlgebra> as_algebra(std::size_t cap = default_size_cap) const {
      std::unordered_map<std::vector<Element>, Element, VectorHash> index;
      for (std::size_t i = 0; i < elements.size(); ++i) {
        index.emplace(elements[i], static_cast<Element>(i));
      }
      std::vector<FiniteAlgebra::Table> tables;
      std::vector<Element>              args;
      std::vector<std::vector<Element> const*> xs;
      for (std::size_t op = 0; op < base.signature().size(); ++op) {
        auto entries = checked_power(elements.size(), base.arity(op), cap * 64);
        if (!entries) {
          return CapExceeded{"operation table of the free algebra on "
                                 + std::to_string(elements.size())
                                 + " elements exceeds cap",
                             elements.size()};
        }
        FiniteAlgebra::Table t;
        t.reserve(*entries);
        for_each_tuple(
            elements.size(), base.arity(op), [&](std::span<Element const> tup) {
              xs.clear();
              for (Element x : tup) {
                xs.push_back(&elements[x]);
              }
              t.push_back(index.at(detail::apply_columns(
                  base,
                  op,
                  std::span<std::vector<Element> const* const>(xs),
                  columns,
                  args)));
            });
        tables.push_back(std::move(t));
      }
      return FiniteAlgebra("F" + std::to_string(generator_count) + "_"
                               + base.name(),
                           elements.size(),
                           base.signature(),
                           std::move(tables));
    }
  };

  inline Capped<FreeAlgebra> build_free(FiniteAlgebra const& a,
                                        std::size_t          n,
                                        std::size_t cap = default_free_cap,
                                        std::size_t column_cap
                                        = default_column_cap) {
    if (n == 0) {
      throw Error("free algebra needs at least one generator");
    }
    auto cols = checked_power(a.size(), n, column_cap);
    if (!cols) {
      return CapExceeded{"|A|^" + std::to_string(n) + " columns exceed "
                             + std::to_string(column_cap),
                         0};
    }
    std::vector<std::vector<Element>> seeds;
    std::vector<Term>                 seed_terms;
    for (std::size_t i = 0; i < n; ++i) {
      seeds.push_back(projection_vector(a.size(), n, i));
      seed_terms.push_back(Term::var(i));
    }
    auto const           ar = arities_of(a.signature());
    std::vector<Element> args;
    auto                 res = bfs_closure(
        seeds,
        std::span<std::size_t const>(ar),
        [](std::vector<Element> const& v) -> std::vector<Element> const& {
          return v;
        },
        [&](std::size_t op, std::span<std::vector<Element> const* const> xs) {
          return detail::apply_columns(a, op, xs, *cols, args);
        },
        [](std::size_t,
           std::vector<Element> const&,
           std::vector<Element> const&,
           Origin const&) { return true; },
        cap,
        default_work_cap / *cols);
    if (res.status == ClosureStatus::cap_exceeded) {
      return CapExceeded{"free algebra on " + std::to_string(n)
                             + " generators: more than "
                             + std::to_string(cap)
                             + " elements or work budget spent ("
                             + std::to_string(res.elements.size())
                             + " elements found)",
                         res.elements.size()};
    }
    FreeAlgebra f;
    f.base            = a;
    f.generator_count = n;
    f.columns         = *cols;
    f.representative  = origin_terms(res.origins, a.signature(), seed_terms);
    f.elements        = std::move(res.elements);
    // A generator may coincide with an earlier one (|A| = 1).
    for (std::size_t i = 0; i < n; ++i) {
      f.generator_indices.push_back(*f.find(seeds[i]));
    }
    return f;
  }

  inline Capped<std::size_t> free_spectrum(FiniteAlgebra const& a,
                                           std::size_t          n,
                                           std::size_t cap = default_free_cap) {
    auto f = build_free(a, n, cap);
    if (auto e = std::get_if<CapExceeded>(&f)) {
      return *e;
    }
    return std::get<FreeAlgebra>(f).size();
  }

  // Generators of B picked greedily in element order.
  inline std::vector<Element> greedy_generators(FiniteAlgebra const& b) {
    std::vector<Element> gens;
    std::vector<bool>    covered(b.size(), false);
    for (Element x = 0; x < b.size(); ++x) {
      if (covered[x]) {
        continue;
      }
      gens.push_back(x);
      for (Element y : generate_subalgebra(b, gens).elements) {
        covered[y] = true;
      }
    }
    return gens;
  }

  // Same arities in the same order; symbol names may differ.
  inline bool same_type(FiniteAlgebra const& a, FiniteAlgebra const& b) {
    if (a.signature().size() != b.signature().size()) {
      return false;
    }
    for (std::size_t i = 0; i < a.signature().size(); ++i) {
      if (a.arity(i) != b.arity(i)) {
        return false;
      }
    }
    return true;
  }

  // B with its symbols renamed positionally to those of `sig`.
  inline FiniteAlgebra with_signature(FiniteAlgebra const& b,
                                      Signature const&     sig) {
    return FiniteAlgebra(b.name(), b.size(), sig, b.tables());
  }

  namespace detail {
    inline void collect_vars(Term const&                      t,
                             std::vector<bool>&               used,
                             std::unordered_set<void const*>& seen) {
      if (!seen.insert(t.id()).second) {
        return;
      }
      if (t.is_var()) {
        if (t.var_index() >= used.size()) {
          used.resize(t.var_index() + 1, false);
        }
        used[t.var_index()] = true;
        return;
      }
      for (auto const& a : t.args()) {
        collect_vars(a, used, seen);
      }
    }
  }  // namespace detail

  // Renames the variables that occur to x0, x1, ... keeping their order.
  inline Identity compact_variables(Identity const& e) {
    std::vector<bool>               used;
    std::unordered_set<void const*> seen;
    detail::collect_vars(e.left, used, seen);
    detail::collect_vars(e.right, used, seen);
    std::vector<Term> subst;
    std::size_t       next = 0;
    for (bool u : used) {
      subst.push_back(Term::var(u ? next++ : 0));
    }
    return Identity(substitute(e.left, subst), substitute(e.right, subst), next);
  }

  struct MembershipVerdict {
    bool                  member = false;
    std::vector<Element>  generators;  // of B, sent to x0, x1, ...
    std::optional<Identity> witness;   // holds in A, fails in B
  };

  // Kalicki's test. Close {(projection_i, g_i)} in A^(A^k) × B where
  // g_0..g_{k-1} generate B. B ∈ HSP(A) iff the first components never
  // coincide while the second differ, i.e. iff g_i ↦ x_i extends to a
  // homomorphism F_{HSP(A)}(k) → B. A clash yields an identity of A that
  // fails in B.
  //
  // `generators` defaults to greedy_generators(B). B and A need only be of
  // the same type; the witness is written in A's symbols (evaluate it in
  // with_signature(B, A.signature())), with unused variables dropped.
  inline Capped<MembershipVerdict>
  hsp_member(FiniteAlgebra const&               b,
             FiniteAlgebra const&               a,
             std::size_t                        cap = default_free_cap,
             std::optional<std::vector<Element>> generators = std::nullopt,
             std::size_t column_cap = default_column_cap) {
    if (!same_type(a, b)) {
      throw Error("hsp_member: '" + b.name() + "' and '" + a.name()
                  + "' are not of the same type");
    }
    MembershipVerdict out;
    out.generators = generators ? *generators : greedy_generators(b);
    if (generate_subalgebra(b, out.generators).elements.size() != b.size()) {
      throw Error("hsp_member: the given elements do not generate B");
    }
    std::size_t const k    = out.generators.size();
    auto              cols = checked_power(a.size(), k, column_cap);
    if (!cols) {
      return CapExceeded{"|A|^" + std::to_string(k) + " columns exceed "
                             + std::to_string(column_cap),
                         0};
    }

    struct Pair {
      std::vector<Element> vec;
      Element              in_b;
    };
    std::vector<Pair> seeds;
    std::vector<Term> seed_terms;
    for (std::size_t i = 0; i < k; ++i) {
      seeds.push_back({projection_vector(a.size(), k, i), out.generators[i]});
      seed_terms.push_back(Term::var(i));
    }
    auto const                 ar = arities_of(a.signature());
    std::vector<Element>       args, bargs;
    std::optional<std::size_t> clash_with;
    std::optional<Origin>      clash_origin;

    auto res = bfs_closure(
        seeds,
        std::span<std::size_t const>(ar),
        [](Pair const& p) -> std::vector<Element> const& { return p.vec; },
        [&](std::size_t op, std::span<Pair const* const> xs) {
          std::vector<std::vector<Element> const*> vs;
          bargs.clear();
          for (auto p : xs) {
            vs.push_back(&p->vec);
            bargs.push_back(p->in_b);
          }
          return Pair{detail::apply_columns(
                          a,
                          op,
                          std::span<std::vector<Element> const* const>(vs),
                          *cols,
                          args),
                      b.apply(op, bargs)};
        },
        [&](std::size_t existing,
            Pair const& old,
            Pair const& fresh,
            Origin const& o) {
          if (old.in_b == fresh.in_b) {
            return true;
          }
          clash_with   = existing;
          clash_origin = o;
          return false;
        },
        cap,
        default_work_cap / *cols);

    if (res.status == ClosureStatus::cap_exceeded) {
      return CapExceeded{"membership closure exceeds " + std::to_string(cap)
                             + " elements or the work budget",
                         res.elements.size()};
    }
    if (res.status == ClosureStatus::complete) {
      out.member = true;
      return out;
    }
    auto terms = origin_terms(res.origins, a.signature(), seed_terms);
    Term right = seed_terms.front();
    if (clash_origin->is_seed()) {
      right = seed_terms[clash_origin->index];
    } else {
      std::vector<Term> sub;
      for (auto i : clash_origin->args) {
        sub.push_back(terms[i]);
      }
      right = Term::apply(a.signature()[clash_origin->op].name, std::move(sub));
    }
    out.witness.emplace(compact_variables(Identity(terms[*clash_with], right, k)));
    return out;
  }

}  // namespace unialg

#endif  // UNIALG_FREE_ALGEBRA_HPP_
