#ifndef UNIALG_RESIDUAL_HPP_
#define UNIALG_RESIDUAL_HPP_

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "unialg/alg_io.hpp"
#include "unialg/baker.hpp"
#include "unialg/congruence.hpp"
#include "unialg/construct.hpp"
#include "unialg/free_algebra.hpp"
#include "unialg/replay.hpp"
#include "unialg/sdmeet.hpp"

namespace unialg {

  // If an SD∧ variety V = HSP(A) has an SI member B with |B| > m, it has
  // one with m < |B| <= f_V(n*) <= k^(k^n*), where n* = 2^(m^2+7m) M',
  // k = |A| and M' = max(max arity, 3).
  struct TowerBound {
    std::size_t k = 0;
    unsigned    m = 0;
    std::size_t arity_bound = 3;  // M'
    BigInt      p;                // m^2 + 7m
    BigInt      n_star;           // 2^p M': generators needed
    // L 2^(6m+L) (M'-1) + m + 1 <= 2^p M'
    BigInt      witness_count;
    bool        inequality_holds = false;
    std::string expression;       // "k^(k^n*)" with the numbers filled in
    std::string as_written;       // T = k^{k(2^{p(m)}M')}, read as above
    std::optional<BigInt> exact;  // when the value has at most 2^20 bits
    // log2 log2 of the cap lies in [lo, hi]; lo == hi when exact.
    BigInt      log2log2_lo, log2log2_hi;
    bool        log2log2_exact = false;
    std::string log2;             // symbolic
  };

  namespace detail {
    // floor(log2 x) for x >= 1
    inline unsigned floor_log2(BigInt const& x) {
      return static_cast<unsigned>(boost::multiprecision::msb(x));
    }
    inline bool is_power_of_two(BigInt const& x) {
      return x > 0 && (x & (x - 1)) == 0;
    }
  }  // namespace detail

  inline TowerBound theorem51_bound(std::size_t k,
                                    unsigned    m,
                                    std::size_t arity_bound) {
    if (m < 2) {
      throw Error("residual bound needs m >= 2");
    }
    if (k == 0) {
      throw Error("empty algebra");
    }
    auto const c = constants(m);
    TowerBound b;
    b.k           = k;
    b.m           = m;
    b.arity_bound = std::max<std::size_t>(arity_bound, 3);
    b.p           = c.p;
    b.n_star      = (BigInt(1) << static_cast<unsigned>(c.p)) * b.arity_bound;
    b.witness_count = c.L * (BigInt(1) << static_cast<unsigned>(6 * m + c.L))
                          * (b.arity_bound - 1)
                      + m + 1;
    b.inequality_holds = b.witness_count <= b.n_star;
    b.expression = std::to_string(k) + "^(" + std::to_string(k) + "^"
                   + b.n_star.str() + ")";
    b.as_written = "T = k^{k(2^{p(m)}M')}, read as k^(k^(2^{p(m)}M'))";
    if (k == 1) {
      b.exact          = BigInt(1);
      b.log2           = "0";
      b.log2log2_exact = false;
      return b;
    }
    // log2 T = k^n* log2 k; log2 log2 T = n* log2 k + log2 log2 k.
    BigInt const   K(k);
    unsigned const a = detail::floor_log2(K);
    unsigned const ceil_a = detail::is_power_of_two(K) ? a : a + 1;
    b.log2 = std::to_string(k) + "^" + b.n_star.str() + " * log2("
             + std::to_string(k) + ")";
    if (detail::is_power_of_two(K) && detail::is_power_of_two(BigInt(a))) {
      b.log2log2_lo = b.log2log2_hi = b.n_star * a + detail::floor_log2(BigInt(a));
      b.log2log2_exact = true;
    } else {
      b.log2log2_lo = b.n_star * a;
      b.log2log2_hi = b.n_star * ceil_a + ceil_a;
    }
    // Bit length is about 2^(log2log2); never small once k >= 2, but keep
    // the exact value when it fits.
    if (b.log2log2_hi <= 20) {
      BigInt e = boost::multiprecision::pow(K, static_cast<unsigned>(b.n_star));
      b.exact  = boost::multiprecision::pow(K, static_cast<unsigned>(e));
    }
    return b;
  }

  inline std::size_t max_arity(FiniteAlgebra const& a) {
    std::size_t r = 0;
    for (auto const& s : a.signature()) {
      r = std::max(r, s.arity);
    }
    return r;
  }

  inline TowerBound theorem51_bound(FiniteAlgebra const& a, unsigned m) {
    return theorem51_bound(a.size(), m, max_arity(a));
  }

  struct SiQuotient {
    FiniteAlgebra        algebra;
    Partition            theta;
    std::vector<Element> block_of;
  };

  // Empty if w is a valid Φ_m witness on b.
  inline std::string phi_witness_problem(FiniteAlgebra const& b,
                                         unsigned             m,
                                         PhiWitness const&    w) {
    if (w.xs.size() != m + 1) {
      return "witness needs " + std::to_string(m + 1) + " elements";
    }
    if (w.yz.lo >= w.yz.hi || w.yz.hi >= b.size()) {
      return "target pair must be two distinct elements of the algebra";
    }
    for (std::size_t i = 0; i < w.xs.size(); ++i) {
      if (w.xs[i] >= b.size()) {
        return "element out of range";
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (w.xs[i] == w.xs[j]) {
          return "x_i must be pairwise distinct";
        }
      }
    }
    auto const  c = constants(m);
    std::size_t q = 0;
    if (w.chains.size() != (m + 1) * m / 2) {
      return "wrong number of chains";
    }
    for (std::size_t i = 0; i <= m; ++i) {
      for (std::size_t j = i + 1; j <= m; ++j, ++q) {
        auto const& ch = w.chains[q];
        if (ch.source != UnorderedPair::make(w.xs[i], w.xs[j])
            || ch.target() != w.yz) {
          return "chain " + std::to_string(q) + " has the wrong endpoints";
        }
        if (ch.depth_bound > c.two_6m || ch.length_bound > c.two_L) {
          return "chain " + std::to_string(q) + " exceeds the Φ_m bounds";
        }
        if (auto why = replay::check_chain(b, ch); !why.empty()) {
          return "chain " + std::to_string(q) + ": " + why;
        }
      }
    }
    return {};
  }

  // B/θ with θ maximal omitting (y,z). Collapsing any x_i, x_j would put
  // (y,z) in θ, so the quotient has more than m elements.
  inline SiQuotient si_quotient_from_phi(FiniteAlgebra const& b,
                                         unsigned             m,
                                         PhiWitness const&    w) {
    if (auto why = phi_witness_problem(b, m, w); !why.empty()) {
      throw Error("invalid witness: " + why);
    }
    auto theta = max_omitting(b, Partition::identity(b.size()), w.yz.lo, w.yz.hi);
    auto q     = quotient_algebra(b, theta);
    if (q.algebra.size() <= m || !monolith(q.algebra).subdirectly_irreducible) {
      throw Error("internal: quotient is not SI of size > m");
    }
    return {std::move(q.algebra), std::move(theta), std::move(q.block_of)};
  }

  struct SiSearchBudget {
    std::size_t max_power = 3;
    std::size_t max_gens  = 3;
    std::size_t max_size  = 64;
  };

  struct SiFound {
    FiniteAlgebra                     algebra;
    std::size_t                       power = 0;
    std::vector<std::vector<Element>> generators;  // tuples in A^power
    std::pair<Element, Element>       omitted;     // elements of A^power
  };

  struct SiSearchReport {
    std::vector<SiFound> found;
    // Every (power, generator count) combination finished.
    bool                 budget_completed = false;
    // The search covered the whole theoretical bound.
    bool                 exhausted = false;
    std::string          coverage;
  };

  namespace detail {
    // Serialized tables under a relabelling.
    inline std::vector<Element> relabelled(FiniteAlgebra const&        a,
                                           std::vector<Element> const& perm) {
      std::vector<Element> inv(perm.size());
      for (Element i = 0; i < perm.size(); ++i) {
        inv[perm[i]] = i;
      }
      std::vector<Element> out;
      std::vector<Element> args;
      for (std::size_t op = 0; op < a.signature().size(); ++op) {
        for_each_tuple(a.size(), a.arity(op), [&](std::span<Element const> t) {
          args.clear();
          for (Element x : t) {
            args.push_back(inv[x]);
          }
          out.push_back(perm[a.apply(op, args)]);
        });
      }
      return out;
    }

    // Isomorphism-invariant key for algebras up to 7 elements; larger ones
    // are keyed by their tables as given.
    inline std::vector<Element> canonical_tables(FiniteAlgebra const& a) {
      std::vector<Element> perm(a.size());
      std::iota(perm.begin(), perm.end(), 0);
      if (a.size() > 7) {
        return relabelled(a, perm);
      }
      std::vector<Element> best;
      do {
        auto t = relabelled(a, perm);
        if (best.empty() || t < best) {
          best = std::move(t);
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
      return best;
    }

    inline FiniteAlgebra from_canonical(FiniteAlgebra const&        shape,
                                        std::vector<Element> const& flat,
                                        std::string const&          name) {
      std::vector<FiniteAlgebra::Table> tables;
      std::size_t                       pos = 0;
      for (std::size_t op = 0; op < shape.signature().size(); ++op) {
        std::size_t len = shape.table(op).size();
        tables.emplace_back(flat.begin() + pos, flat.begin() + pos + len);
        pos += len;
      }
      return FiniteAlgebra(name, shape.size(), shape.signature(), std::move(tables));
    }
  }  // namespace detail

  // SI quotients of size >= m of subalgebras of A^j generated by at most g
  // tuples, each checked for SI and for membership in HSP(A).
  inline SiSearchReport si_search(FiniteAlgebra const&  a,
                                  unsigned              m,
                                  SiSearchBudget const& budget = {}) {
    if (budget.max_power == 0 || budget.max_gens == 0 || budget.max_size == 0) {
      throw Error("search budget entries must be positive");
    }
    SiSearchReport r;
    if (a.size() == 1) {
      r.budget_completed = r.exhausted = true;
      r.coverage = "one-element algebra: every member of HSP(A) is trivial, "
                   "no SI members";
      return r;
    }
    std::map<std::pair<std::size_t, std::vector<Element>>, SiFound> kept;
    std::vector<std::string> done, skipped;

    for (std::size_t j = 1; j <= budget.max_power; ++j) {
      auto pw = direct_power(a, j, std::max<std::size_t>(budget.max_size, 1) * 64);
      if (std::holds_alternative<CapExceeded>(pw)) {
        skipped.push_back("j=" + std::to_string(j) + " (power too large)");
        continue;
      }
      auto const& P = std::get<FiniteAlgebra>(pw);
      std::vector<std::vector<std::size_t>> perms;
      {
        std::vector<std::size_t> pi(j);
        std::iota(pi.begin(), pi.end(), 0);
        do {
          perms.push_back(pi);
        } while (std::next_permutation(pi.begin(), pi.end()));
      }
      auto permute = [&](Element e, std::vector<std::size_t> const& pi) {
        auto        c = power_coordinates(a.size(), j, e);
        std::size_t v = 0;
        for (std::size_t i = 0; i < j; ++i) {
          v = v * a.size() + c[pi[i]];
        }
        return static_cast<Element>(v);
      };
      std::set<std::vector<Element>> seen_subuniverses;
      for (std::size_t g = 1; g <= budget.max_gens; ++g) {
        if (g > P.size()) {
          done.push_back("j=" + std::to_string(j) + " g=" + std::to_string(g));
          continue;
        }
        bool                 too_big = false;
        std::vector<Element> gens(g);
        std::iota(gens.begin(), gens.end(), 0);
        while (true) {
          // Canonical under coordinate permutations only.
          bool canonical = true;
          for (auto const& pi : perms) {
            std::vector<Element> img;
            for (Element x : gens) {
              img.push_back(permute(x, pi));
            }
            std::sort(img.begin(), img.end());
            if (img < gens) {
              canonical = false;
              break;
            }
          }
          if (canonical) {
            auto sub = generate_subalgebra(P, gens).sorted();
            if (sub.size() > budget.max_size) {
              too_big = true;
            } else if (seen_subuniverses.insert(sub).second) {
              auto                 S = subalgebra(P, sub);
              PrincipalCongruences cg(S.algebra);
              std::vector<Element> local_gens;
              for (Element x : gens) {
                local_gens.push_back(static_cast<Element>(
                    std::lower_bound(sub.begin(), sub.end(), x) - sub.begin()));
              }
              for (Element u = 0; u < S.algebra.size(); ++u) {
                for (Element v = u + 1; v < S.algebra.size(); ++v) {
                  auto theta = max_omitting(S.algebra,
                                            Partition::identity(S.algebra.size()),
                                            u, v, &cg);
                  if (theta.block_count() < m) {
                    continue;
                  }
                  auto q   = quotient_algebra(S.algebra, theta);
                  auto key = detail::canonical_tables(q.algebra);
                  std::pair<std::size_t, std::vector<Element>> id{
                      q.algebra.size(), key};
                  if (kept.count(id)) {
                    continue;
                  }
                  SiFound f{q.algebra, j, {}, {sub[u], sub[v]}};
                  for (Element x : gens) {
                    f.generators.push_back(power_coordinates(a.size(), j, x));
                  }
                  // Double checks: SI, and in HSP(A) via the images of the
                  // generators.
                  if (!monolith(q.algebra).subdirectly_irreducible) {
                    throw Error("internal: quotient by a maximal omitting "
                                "congruence is not SI");
                  }
                  std::vector<Element> img;
                  for (Element x : local_gens) {
                    img.push_back(q.block_of[x]);
                  }
                  auto mem = hsp_member(q.algebra, a, default_free_cap, img);
                  auto mv  = std::get_if<MembershipVerdict>(&mem);
                  if (!mv || !mv->member) {
                    throw Error("internal: SI quotient failed the membership "
                                "check");
                  }
                  kept.emplace(std::move(id), std::move(f));
                }
              }
            }
          }
          // next g-subset of P
          std::size_t i = g;
          while (i > 0 && gens[i - 1] == P.size() - g + (i - 1)) {
            --i;
          }
          if (i == 0) {
            break;
          }
          ++gens[i - 1];
          for (std::size_t t = i; t < g; ++t) {
            gens[t] = gens[t - 1] + 1;
          }
        }
        (too_big ? skipped : done)
            .push_back("j=" + std::to_string(j) + " g=" + std::to_string(g)
                       + (too_big ? " (some subalgebras over the size cap)" : ""));
      }
    }

    std::size_t idx = 0;
    for (auto& [id, f] : kept) {
      f.algebra = detail::from_canonical(
          f.algebra, id.second, a.name() + "_si" + std::to_string(idx++));
      r.found.push_back(std::move(f));
    }
    r.budget_completed = skipped.empty();
    auto bound         = theorem51_bound(a, m);
    r.coverage         = "searched subalgebras of A^j generated by g tuples, "
                         "quotients by congruences maximal omitting a pair; "
                         "completed:";
    for (auto const& s : done) {
      r.coverage += " [" + s + "]";
    }
    if (!skipped.empty()) {
      r.coverage += "; incomplete:";
      for (auto const& s : skipped) {
        r.coverage += " [" + s + "]";
      }
    }
    r.coverage += "; a complete search needs SI members up to "
                  + bound.expression + " elements (generated by "
                  + bound.n_star.str() + " elements), far beyond this budget";
    r.exhausted = false;
    return r;
  }

  struct TheoremBResult {
    enum class Verdict { not_csd, no, yes, yes_within_budget, unknown };

    Verdict                  verdict = Verdict::unknown;
    unsigned                 m       = 0;
    SdMeetCertificate        gate;
    std::optional<SiFound>   witness;  // NO
    SiSearchReport           search;
    TowerBound               bound;
    std::string              note;
  };

  inline char const* verdict_name(TheoremBResult::Verdict v) {
    switch (v) {
      case TheoremBResult::Verdict::not_csd:
        return "NOT-CSD";
      case TheoremBResult::Verdict::no:
        return "NO";
      case TheoremBResult::Verdict::yes:
        return "YES";
      case TheoremBResult::Verdict::yes_within_budget:
        return "YES-within-budget";
      default:
        return "UNKNOWN";
    }
  }

  // Is HSP(A) SD∧ and residually less than m?
  inline TheoremBResult theoremB_decide(FiniteAlgebra const&  a,
                                        unsigned              m,
                                        SiSearchBudget const& budget = {},
                                        std::size_t free_cap = default_free_cap) {
    using V = TheoremBResult::Verdict;
    if (m < 2) {
      throw Error("m must be at least 2");
    }
    TheoremBResult r;
    r.m     = m;
    r.bound = theorem51_bound(a, m);
    r.gate  = decide_sd_meet(a, free_cap);
    if (r.gate.verdict == SdMeetCertificate::Verdict::no) {
      r.verdict = V::not_csd;
      r.note    = "HSP(A) is not congruence meet-semidistributive";
      return r;
    }
    if (r.gate.verdict == SdMeetCertificate::Verdict::resource_exceeded) {
      r.verdict = V::unknown;
      r.note    = "SD-meet gate undecided: " + r.gate.note;
      return r;
    }
    r.search = si_search(a, m, budget);
    if (!r.search.found.empty()) {
      // the smallest find of size >= m
      r.verdict = V::no;
      r.witness = r.search.found.front();
      r.note    = "SI member of size " + std::to_string(r.witness->algebra.size())
               + " >= " + std::to_string(m);
    } else if (r.search.exhausted) {
      r.verdict = V::yes;
      r.note    = "search covered the full bound";
    } else if (r.search.budget_completed) {
      r.verdict = V::yes_within_budget;
      r.note    = "no SI member of size >= " + std::to_string(m)
               + " within the budget";
    } else {
      r.verdict = V::unknown;
      r.note    = "budget search incomplete";
    }
    return r;
  }

}  // namespace unialg

#endif  // UNIALG_RESIDUAL_HPP_
