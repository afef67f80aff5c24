#ifndef UNIALG_CONGRUENCE_HPP_
#define UNIALG_CONGRUENCE_HPP_

#include <algorithm>
#include <array>
#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "unialg/algebra.hpp"
#include "unialg/error.hpp"
#include "unialg/partition.hpp"

namespace unialg {

  namespace detail {
    // Close the classes of `uf` under every basic translation, starting
    // from the pairs in `pending`. Each pair that merges two classes is
    // queued in turn; images of those pairs generate everything else.
    inline void close_under_translations(
        FiniteAlgebra const&                   a,
        UnionFind&                             uf,
        std::deque<std::pair<Element, Element>> pending) {
      std::vector<Element> args;
      while (!pending.empty()) {
        auto [x, y] = pending.front();
        pending.pop_front();
        for (std::size_t op = 0; op < a.signature().size(); ++op) {
          std::size_t const k = a.arity(op);
          for (std::size_t pos = 0; pos < k; ++pos) {
            for_each_tuple(a.size(), k - 1, [&](std::span<Element const> par) {
              args.assign(par.begin(), par.end());
              args.insert(args.begin() + pos, x);
              Element u = a.apply(op, args);
              args[pos] = y;
              Element v = a.apply(op, args);
              if (uf.unite(u, v)) {
                pending.emplace_back(u, v);
              }
            });
          }
        }
      }
    }
  }  // namespace detail

  inline Partition generated_congruence(
      FiniteAlgebra const&                         a,
      std::vector<std::pair<Element, Element>> const& pairs) {
    UnionFind                               uf(a.size());
    std::deque<std::pair<Element, Element>> pending;
    for (auto [x, y] : pairs) {
      if (x >= a.size() || y >= a.size()) {
        throw Error("pair element out of range");
      }
      if (uf.unite(x, y)) {
        pending.emplace_back(x, y);
      }
    }
    detail::close_under_translations(a, uf, std::move(pending));
    return Partition::from(uf);
  }

  inline Partition principal_congruence(FiniteAlgebra const& a,
                                        Element              x,
                                        Element              y) {
    return generated_congruence(a, {{x, y}});
  }

  // Cg(a,b) for every a < b, computed on demand.
  class PrincipalCongruences {
   public:
    explicit PrincipalCongruences(FiniteAlgebra const& a)
        : _alg(&a), _cache(a.size() * a.size()) {}

    Partition const& operator()(Element x, Element y) const {
      if (x > y) {
        std::swap(x, y);
      }
      auto& slot = _cache[x * _alg->size() + y];
      if (!slot) {
        slot = (x == y) ? Partition::identity(_alg->size())
                        : principal_congruence(*_alg, x, y);
      }
      return *slot;
    }

    FiniteAlgebra const& algebra() const noexcept {
      return *_alg;
    }

   private:
    FiniteAlgebra const*                          _alg;
    mutable std::vector<std::optional<Partition>> _cache;
  };

  inline constexpr std::size_t default_congruence_cap = 100'000;

  class CongruenceLattice {
   public:
    CongruenceLattice() = default;

    explicit CongruenceLattice(std::vector<Partition> congruences)
        : _cons(std::move(congruences)) {
      for (std::size_t i = 0; i < _cons.size(); ++i) {
        _index.emplace(_cons[i], i);
      }
    }

    std::size_t size() const noexcept {
      return _cons.size();
    }
    Partition const& operator[](std::size_t i) const {
      return _cons[i];
    }
    std::vector<Partition> const& congruences() const noexcept {
      return _cons;
    }

    std::optional<std::size_t> find(Partition const& p) const {
      auto it = _index.find(p);
      if (it == _index.end()) {
        return std::nullopt;
      }
      return it->second;
    }

    std::size_t meet(std::size_t i, std::size_t j) const {
      return index_of(_cons[i].meet(_cons[j]));
    }
    std::size_t join(std::size_t i, std::size_t j) const {
      return index_of(_cons[i].join(_cons[j]));
    }

    // Covering pairs (lower, upper).
    std::vector<std::pair<std::size_t, std::size_t>> hasse_edges() const {
      std::vector<std::pair<std::size_t, std::size_t>> out;
      for (std::size_t i = 0; i < _cons.size(); ++i) {
        for (std::size_t j = 0; j < _cons.size(); ++j) {
          if (i == j || !_cons[i].leq(_cons[j])) {
            continue;
          }
          bool cover = true;
          for (std::size_t k = 0; k < _cons.size() && cover; ++k) {
            if (k != i && k != j && _cons[i].leq(_cons[k])
                && _cons[k].leq(_cons[j])) {
              cover = false;
            }
          }
          if (cover) {
            out.emplace_back(i, j);
          }
        }
      }
      return out;
    }

   private:
    std::size_t index_of(Partition const& p) const {
      auto i = find(p);
      if (!i) {
        throw Error("lattice is not closed: " + p.to_string());
      }
      return *i;
    }

    std::vector<Partition>           _cons;
    std::map<Partition, std::size_t> _index;
  };

  // Con A as the join-closure of {0_A} and the principal congruences.
  // Order: 0_A, then distinct principals in pair order, then joins in
  // discovery order.
  inline Capped<CongruenceLattice>
  all_congruences(FiniteAlgebra const& a,
                  std::size_t          cap = default_congruence_cap) {
    std::vector<Partition>         list{Partition::identity(a.size())};
    std::map<Partition, bool>      seen{{list.front(), true}};
    std::vector<Partition>         principals;
    for (Element x = 0; x < a.size(); ++x) {
      for (Element y = x + 1; y < a.size(); ++y) {
        auto p = principal_congruence(a, x, y);
        if (seen.emplace(p, true).second) {
          principals.push_back(p);
          list.push_back(std::move(p));
        }
      }
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
      for (auto const& p : principals) {
        auto j = list[i].join(p);
        if (seen.emplace(j, true).second) {
          list.push_back(std::move(j));
          if (list.size() > cap) {
            return CapExceeded{"more than " + std::to_string(cap)
                                   + " congruences",
                               list.size()};
          }
        }
      }
    }
    if (list.size() > cap) {
      return CapExceeded{"more than " + std::to_string(cap) + " congruences",
                         list.size()};
    }
    return CongruenceLattice(std::move(list));
  }

  // First triple (x, y, z), in index order, with x∧y = x∧z but
  // x∧y ≠ x∧(y∨z); empty if the meet-semidistributive law holds.
  inline std::optional<std::array<std::size_t, 3>>
  sd_meet_law(CongruenceLattice const& lat) {
    std::size_t const n = lat.size();
    std::vector<std::size_t> meets(n * n), joins(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        meets[i * n + j] = lat.meet(i, j);
        joins[i * n + j] = lat.join(i, j);
      }
    }
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        for (std::size_t z = 0; z < n; ++z) {
          auto xy = meets[x * n + y];
          if (xy == meets[x * n + z] && xy != meets[x * n + joins[y * n + z]]) {
            return std::array<std::size_t, 3>{x, y, z};
          }
        }
      }
    }
    return std::nullopt;
  }

  struct MonolithResult {
    Partition monolith;
    bool      subdirectly_irreducible = false;
    bool      trivial = false;  // 1-element algebra: not SI by convention
  };

  inline MonolithResult monolith(FiniteAlgebra const&        a,
                                 PrincipalCongruences const* cache = nullptr) {
    if (a.size() == 1) {
      return {Partition::identity(1), false, true};
    }
    std::optional<PrincipalCongruences> own;
    if (!cache) {
      own.emplace(a);
      cache = &*own;
    }
    Partition m = Partition::total(a.size());
    for (Element x = 0; x < a.size() && !m.is_identity(); ++x) {
      for (Element y = x + 1; y < a.size() && !m.is_identity(); ++y) {
        m = m.meet((*cache)(x, y));
      }
    }
    bool si = !m.is_identity();
    return {std::move(m), si, false};
  }

  // M(x,y,z,w): x ≠ y, z ≠ w and Cg(x,y) ∩ Cg(z,w) ≠ 0.
  inline bool meet_relation_M(PrincipalCongruences const& cg,
                              Element x, Element y, Element z, Element w) {
    if (x == y || z == w) {
      return false;
    }
    return !cg(x, y).meet(cg(z, w)).is_identity();
  }

  inline bool meet_relation_M(FiniteAlgebra const& a,
                              Element x, Element y, Element z, Element w) {
    return meet_relation_M(PrincipalCongruences(a), x, y, z, w);
  }

  inline bool is_fsi(FiniteAlgebra const& a) {
    PrincipalCongruences cg(a);
    for (Element x = 0; x < a.size(); ++x) {
      for (Element y = 0; y < a.size(); ++y) {
        for (Element z = 0; z < a.size(); ++z) {
          for (Element w = 0; w < a.size(); ++w) {
            if (x != y && z != w && !meet_relation_M(cg, x, y, z, w)) {
              return false;
            }
          }
        }
      }
    }
    return true;
  }

  // A congruence containing `base`, omitting (u,v), and maximal with that
  // property. Greedy: fold in Cg(a,b) for pairs a < b in lexicographic
  // order whenever that keeps (u,v) out. One pass suffices: a pair rejected
  // against a smaller congruence stays rejected against a larger one.
  inline Partition max_omitting(FiniteAlgebra const&        a,
                                Partition const&            base,
                                Element                     u,
                                Element                     v,
                                PrincipalCongruences const* cache = nullptr) {
    if (base.related(u, v)) {
      throw Error("pair (" + std::to_string(u) + "," + std::to_string(v)
                  + ") already lies in the base congruence");
    }
    std::optional<PrincipalCongruences> own;
    if (!cache) {
      own.emplace(a);
      cache = &*own;
    }
    Partition theta = base;
    for (Element x = 0; x < a.size(); ++x) {
      for (Element y = x + 1; y < a.size(); ++y) {
        if (theta.related(x, y)) {
          continue;
        }
        auto cand = theta.join((*cache)(x, y));
        if (!cand.related(u, v)) {
          theta = std::move(cand);
        }
      }
    }
    return theta;
  }

  struct ChainStep {
    Element     from;
    Element     to;
    std::size_t label;  // 0: first congruence, 1: second

    bool operator==(ChainStep const&) const = default;
  };

  // Shortest chain s = e_0, ..., e_r = t whose steps alternate between the
  // blocks of d1 and d2 (breadth-first, smallest elements first; a step in
  // both is labelled 0). Empty when s == t.
  inline std::vector<ChainStep> join_chain(Partition const& d1,
                                           Partition const& d2,
                                           Element          s,
                                           Element          t) {
    std::size_t const n = d1.universe_size();
    if (d2.universe_size() != n || s >= n || t >= n) {
      throw Error("join_chain: universe mismatch");
    }
    if (s == t) {
      return {};
    }
    std::vector<Element> parent(n, Element(-1));
    std::vector<bool>    seen(n, false);
    std::deque<Element>  queue{s};
    seen[s] = true;
    while (!queue.empty() && !seen[t]) {
      Element x = queue.front();
      queue.pop_front();
      for (Element y = 0; y < n; ++y) {
        if (!seen[y] && (d1.related(x, y) || d2.related(x, y))) {
          seen[y]   = true;
          parent[y] = x;
          queue.push_back(y);
        }
      }
    }
    if (!seen[t]) {
      throw Error("join_chain: (" + std::to_string(s) + "," + std::to_string(t)
                  + ") is not in the join");
    }
    std::vector<ChainStep> out;
    for (Element y = t; y != s; y = parent[y]) {
      Element x = parent[y];
      out.push_back({x, y, d1.related(x, y) ? 0u : 1u});
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  struct BetaOmegaResult {
    Partition              beta_omega;
    Partition              gamma_omega;
    std::size_t            index = 0;  // first k with both stages stable
    std::vector<Partition> betas;      // beta_0 .. beta_k
    std::vector<Partition> gammas;     // gamma_0 .. gamma_k

    // Least j with (s,t) in beta_j, if any.
    std::optional<std::size_t> beta_level(Element s, Element t) const {
      for (std::size_t j = 0; j < betas.size(); ++j) {
        if (betas[j].related(s, t)) {
          return j;
        }
      }
      return std::nullopt;
    }
    std::optional<std::size_t> gamma_level(Element s, Element t) const {
      for (std::size_t j = 0; j < gammas.size(); ++j) {
        if (gammas[j].related(s, t)) {
          return j;
        }
      }
      return std::nullopt;
    }
  };

  // beta_{n+1} = beta ∨ (alpha ∩ gamma_n), gamma_{n+1} = gamma ∨ (alpha ∩
  // beta_n), iterated in lockstep until neither changes.
  inline BetaOmegaResult beta_omega(Partition const& alpha,
                                    Partition const& beta,
                                    Partition const& gamma) {
    BetaOmegaResult r;
    r.betas.push_back(beta);
    r.gammas.push_back(gamma);
    while (true) {
      auto const& b = r.betas.back();
      auto const& g = r.gammas.back();
      auto        nb = beta.join(alpha.meet(g));
      auto        ng = gamma.join(alpha.meet(b));
      if (nb == b && ng == g) {
        break;
      }
      r.betas.push_back(std::move(nb));
      r.gammas.push_back(std::move(ng));
    }
    r.index       = r.betas.size() - 1;
    r.beta_omega  = r.betas.back();
    r.gamma_omega = r.gammas.back();
    return r;
  }

  // The relation beta ∘ gamma ∘ beta ∘ ... with k factors (k - 1
  // compositions), as an n×n matrix.
  inline std::vector<std::vector<bool>>
  alternating_composition(Partition const& beta,
                          Partition const& gamma,
                          std::size_t      factors) {
    std::size_t const              n = beta.universe_size();
    std::vector<std::vector<bool>> rel(n, std::vector<bool>(n, false));
    for (Element a = 0; a < n; ++a) {
      for (Element b = 0; b < n; ++b) {
        rel[a][b] = beta.related(a, b);
      }
    }
    for (std::size_t f = 1; f < factors; ++f) {
      Partition const& next = (f % 2 == 1) ? gamma : beta;
      for (Element a = 0; a < n; ++a) {
        std::vector<bool> reach(n, false);
        for (Element b = 0; b < n; ++b) {
          if (rel[a][b]) {
            reach[next.rep(b)] = true;
          }
        }
        for (Element c = 0; c < n; ++c) {
          rel[a][c] = reach[next.rep(c)];
        }
      }
    }
    return rel;
  }

  // Checks alpha ∩ (beta ∘ gamma ∘ ...) ⊆ beta_omega, with k - 1
  // compositions. Returns the first failing ordered pair.
  inline std::optional<std::pair<Element, Element>>
  ck_instance(Partition const& alpha,
              Partition const& beta,
              Partition const& gamma,
              std::size_t      k) {
    if (k < 2) {
      throw Error("ck_instance needs k >= 2");
    }
    auto bo  = beta_omega(alpha, beta, gamma);
    auto rel = alternating_composition(beta, gamma, k);
    for (Element a = 0; a < rel.size(); ++a) {
      for (Element b = 0; b < rel.size(); ++b) {
        if (rel[a][b] && alpha.related(a, b) && !bo.beta_omega.related(a, b)) {
          return std::pair{a, b};
        }
      }
    }
    return std::nullopt;
  }

}  // namespace unialg

#endif  // UNIALG_CONGRUENCE_HPP_
