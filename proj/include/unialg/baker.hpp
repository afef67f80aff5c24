#ifndef UNIALG_BAKER_HPP_
#define UNIALG_BAKER_HPP_

#include <algorithm>
#include <cstddef>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "unialg/algebra.hpp"
#include "unialg/congruence.hpp"
#include "unialg/sdmeet.hpp"

namespace unialg {

  using BigInt = boost::multiprecision::cpp_int;

  // A step x ↦ F(p_0, .., x, .., p_{k-2}) with x at `position`.
  struct TranslationStep {
    std::string          symbol;
    std::size_t          position = 0;
    std::vector<Element> params;

    bool operator==(TranslationStep const&) const = default;
  };

  // Composition of basic translations, applied first to last. No steps is
  // the identity.
  struct Translation {
    std::vector<TranslationStep> steps;

    std::size_t depth() const noexcept {
      return steps.size();
    }

    Element operator()(FiniteAlgebra const& a, Element x) const {
      std::vector<Element> args;
      for (auto const& st : steps) {
        auto op = a.signature().index_of(st.symbol);
        if (st.position >= a.arity(op) || st.params.size() + 1 != a.arity(op)) {
          throw Error("malformed translation step on '" + st.symbol + "'");
        }
        args = st.params;
        args.insert(args.begin() + st.position, x);
        x = a.apply(op, args);
      }
      return x;
    }

    // This translation followed by g.
    Translation then(Translation const& g) const {
      Translation out = *this;
      out.steps.insert(out.steps.end(), g.steps.begin(), g.steps.end());
      return out;
    }

    bool operator==(Translation const&) const = default;
  };

  // The first k steps and the rest.
  inline std::pair<Translation, Translation>
  split_translation(Translation const& t, std::size_t k) {
    k = std::min(k, t.depth());
    return {Translation{{t.steps.begin(), t.steps.begin() + k}},
            Translation{{t.steps.begin() + k, t.steps.end()}}};
  }

  struct ChainLink {
    bool        equal = false;
    Translation translation;  // maps the source pair onto the link
  };

  // A witness for source ⇒_{k,n} {nodes.front(), nodes.back()}. Fewer than
  // n links is fine: equal steps pad a chain to any greater length.
  struct PairChain {
    UnorderedPair          source{0, 1};
    std::vector<Element>   nodes;
    std::vector<ChainLink> links;
    BigInt                 depth_bound  = 0;
    BigInt                 length_bound = 0;

    UnorderedPair target() const {
      return UnorderedPair::make(nodes.front(), nodes.back());
    }

    std::size_t depth() const {
      std::size_t d = 0;
      for (auto const& l : links) {
        if (!l.equal) {
          d = std::max(d, l.translation.depth());
        }
      }
      return d;
    }

    std::size_t length() const noexcept {
      return links.size();
    }
  };

  namespace detail {
    struct Basic {
      std::size_t          op;
      std::size_t          position;
      std::vector<Element> params;
      std::vector<Element> map;
    };

    // Every basic translation, as an element map; duplicate maps keep the
    // first occurrence (op, position, params in lexicographic order).
    inline std::vector<Basic> basic_translations(FiniteAlgebra const& a) {
      std::vector<Basic>                 out;
      std::vector<std::vector<Element>> seen;
      std::vector<Element>               args;
      for (std::size_t op = 0; op < a.signature().size(); ++op) {
        std::size_t const k = a.arity(op);
        for (std::size_t pos = 0; pos < k; ++pos) {
          for_each_tuple(a.size(), k - 1, [&](std::span<Element const> par) {
            std::vector<Element> map(a.size());
            for (Element x = 0; x < a.size(); ++x) {
              args.assign(par.begin(), par.end());
              args.insert(args.begin() + pos, x);
              map[x] = a.apply(op, args);
            }
            if (std::find(seen.begin(), seen.end(), map) != seen.end()) {
              return;
            }
            seen.push_back(map);
            out.push_back({op, pos, {par.begin(), par.end()}, std::move(map)});
          });
        }
      }
      return out;
    }
  }  // namespace detail

  // Least depth k with src →_k P, for every 2-element P reachable at all.
  class ReachMap {
   public:
    ReachMap(FiniteAlgebra const& a, UnorderedPair src)
        : ReachMap(a, src, std::make_shared<std::vector<detail::Basic> const>(
                               detail::basic_translations(a))) {}

    ReachMap(FiniteAlgebra const&                                  a,
             UnorderedPair                                         src,
             std::shared_ptr<std::vector<detail::Basic> const> basics)
        : _n(a.size()),
          _src(src),
          _basics(std::move(basics)),
          _sig(a.signature()),
          _depth(_n * _n, none),
          _parent(_n * _n, none),
          _step(_n * _n, none) {
      if (src.hi >= _n) {
        throw Error("pair out of range");
      }
      std::vector<std::size_t> level{code(src)};
      _depth[code(src)] = 0;
      for (std::size_t d = 1; !level.empty(); ++d) {
        std::vector<std::size_t> next;
        for (auto c : level) {
          Element lo = Element(c / _n), hi = Element(c % _n);
          for (std::size_t b = 0; b < _basics->size(); ++b) {
            auto const& map = (*_basics)[b].map;
            Element     u = map[lo], v = map[hi];
            if (u == v) {
              continue;
            }
            auto cc = code(UnorderedPair::make(u, v));
            if (_depth[cc] == none) {
              _depth[cc]  = d;
              _parent[cc] = c;
              _step[cc]   = b;
              next.push_back(cc);
            }
          }
        }
        if (!next.empty()) {
          _saturation = d;
        }
        // Once a level adds nothing, nothing later can: the next level is
        // computed from this one alone.
        level = std::move(next);
      }
    }

    UnorderedPair source() const noexcept {
      return _src;
    }
    std::size_t universe_size() const noexcept {
      return _n;
    }
    // The last depth at which a new pair appeared.
    std::size_t saturation() const noexcept {
      return _saturation;
    }

    std::optional<std::size_t> depth(UnorderedPair p) const {
      auto d = _depth.at(code(p));
      if (d == none) {
        return std::nullopt;
      }
      return d;
    }

    Translation witness(UnorderedPair p) const {
      auto c = code(p);
      if (_depth.at(c) == none) {
        throw Error("pair not reachable");
      }
      Translation t;
      for (; _parent[c] != none; c = _parent[c]) {
        auto const& b = (*_basics)[_step[c]];
        t.steps.push_back({_sig[b.op].name, b.position, b.params});
      }
      std::reverse(t.steps.begin(), t.steps.end());
      return t;
    }

    // Reachable pairs in order, with depths.
    std::vector<std::pair<UnorderedPair, std::size_t>> entries() const {
      std::vector<std::pair<UnorderedPair, std::size_t>> out;
      for (Element lo = 0; lo < _n; ++lo) {
        for (Element hi = lo + 1; hi < _n; ++hi) {
          if (auto d = _depth[lo * _n + hi]; d != none) {
            out.push_back({{lo, hi}, d});
          }
        }
      }
      return out;
    }

   private:
    static constexpr std::size_t none = SIZE_MAX;

    std::size_t code(UnorderedPair p) const {
      return p.lo * _n + p.hi;
    }

    std::size_t                                       _n;
    UnorderedPair                                     _src;
    std::shared_ptr<std::vector<detail::Basic> const> _basics;
    Signature                                         _sig;
    std::vector<std::size_t>                          _depth;
    std::vector<std::size_t>                          _parent;
    std::vector<std::size_t>                          _step;
    std::size_t                                       _saturation = 0;
  };

  inline ReachMap reach_min_depth(FiniteAlgebra const& a, UnorderedPair src) {
    return ReachMap(a, src);
  }

  // Exact src ⇒_{k,n} dst: the shortest chain dst.lo → dst.hi through pairs
  // of depth <= k, if it has at most n links. Depths beyond the saturation
  // depth add nothing, so k is effectively min(k, saturation).
  inline std::optional<PairChain> darrow(ReachMap const& reach,
                                         UnorderedPair   dst,
                                         BigInt const&   k,
                                         BigInt const&   n) {
    std::size_t const n_el = reach.universe_size();
    if (dst.hi >= n_el) {
      throw Error("pair out of range");
    }
    auto ok = [&](Element c, Element d) {
      if (c == d) {
        return false;
      }
      auto dd = reach.depth(UnorderedPair::make(c, d));
      return dd && BigInt(*dd) <= k;
    };
    std::vector<Element> parent(n_el, Element(-1));
    std::vector<bool>    seen(n_el, false);
    std::deque<Element>  queue{dst.lo};
    seen[dst.lo] = true;
    while (!queue.empty() && !seen[dst.hi]) {
      Element x = queue.front();
      queue.pop_front();
      for (Element y = 0; y < n_el; ++y) {
        if (!seen[y] && ok(x, y)) {
          seen[y]   = true;
          parent[y] = x;
          queue.push_back(y);
        }
      }
    }
    if (!seen[dst.hi]) {
      return std::nullopt;
    }
    std::vector<Element> path;
    for (Element y = dst.hi; y != dst.lo; y = parent[y]) {
      path.push_back(y);
    }
    path.push_back(dst.lo);
    std::reverse(path.begin(), path.end());
    if (BigInt(path.size() - 1) > n) {
      return std::nullopt;
    }
    PairChain c;
    c.source       = reach.source();
    c.nodes        = path;
    c.depth_bound  = k;
    c.length_bound = n;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      c.links.push_back(
          {false, reach.witness(UnorderedPair::make(path[i], path[i + 1]))});
    }
    return c;
  }

  inline std::optional<PairChain> darrow(FiniteAlgebra const& a,
                                         UnorderedPair        src,
                                         UnorderedPair        dst,
                                         BigInt const&        k,
                                         BigInt const&        n) {
    return darrow(ReachMap(a, src), dst, k, n);
  }

  struct CgEquivReport {
    std::size_t              checked = 0;
    std::vector<std::string> discrepancies;
  };

  // (c,d) ∈ Cg(a,b) iff {a,b} ⇒_k {c,d} for some k, on every pair of pairs.
  inline CgEquivReport cg_equiv_check(FiniteAlgebra const& a) {
    CgEquivReport r;
    auto          basics = std::make_shared<std::vector<detail::Basic> const>(
        detail::basic_translations(a));
    for (Element x = 0; x < a.size(); ++x) {
      for (Element y = x + 1; y < a.size(); ++y) {
        ReachMap reach(a, {x, y}, basics);
        auto     cg = principal_congruence(a, x, y);
        for (Element c = 0; c < a.size(); ++c) {
          for (Element d = c + 1; d < a.size(); ++d) {
            ++r.checked;
            bool by_chain
                = darrow(reach, {c, d}, reach.saturation(), a.size()).has_value();
            if (by_chain != cg.related(c, d)) {
              r.discrepancies.push_back(
                  "{" + std::to_string(x) + "," + std::to_string(y) + "} vs {"
                  + std::to_string(c) + "," + std::to_string(d) + "}: Cg says "
                  + (cg.related(c, d) ? "yes" : "no") + ", chains say "
                  + (by_chain ? "yes" : "no"));
            }
          }
        }
      }
    }
    return r;
  }

  inline BigInt binomial(unsigned n, unsigned k) {
    if (k > n) {
      return 0;
    }
    BigInt r = 1;
    for (unsigned i = 1; i <= k; ++i) {
      r = r * (n - k + i) / i;
    }
    return r;
  }

  struct BakerConstants {
    unsigned m = 0;
    BigInt   L, M, N, d, ell;
    BigInt   p;         // m^2 + 7m
    BigInt   two_6m;    // 2^(6m)
    BigInt   two_L;     // 2^L
  };

  inline BakerConstants constants(unsigned m) {
    if (m < 2) {
      throw Error("constants need m >= 2");
    }
    BakerConstants c;
    c.m      = m;
    c.L      = binomial(m + 1, 2);
    c.M      = binomial(2 * m, m) - 1;
    c.N      = 2 * binomial(static_cast<unsigned>(c.M) + 1, 2);
    c.d      = c.N + 3;
    c.ell    = c.d * c.M + 2;
    c.p      = BigInt(m) * m + 7 * m;
    c.two_6m = BigInt(1) << (6 * m);
    c.two_L  = BigInt(1) << static_cast<unsigned>(c.L);
    return c;
  }

  // The hypothesis of the sequence lemmas failed on the given algebra.
  class HypothesisFailure : public Error {
   public:
    using Error::Error;
  };

  // s_p, t_p given as ternary fundamental symbols.
  struct FundamentalPair {
    std::string s;
    std::string t;
  };

  inline std::vector<TermPair>
  fundamental_terms(std::vector<FundamentalPair> const& fam) {
    std::vector<TermPair> out;
    auto xyz = std::vector<Term>{Term::var(0), Term::var(1), Term::var(2)};
    for (auto const& [s, t] : fam) {
      out.push_back({Term::apply(s, xyz), Term::apply(t, xyz)});
    }
    return out;
  }

  // Throws HypothesisFailure unless every symbol is ternary and
  // fundamental and the family satisfies condition 6 on `a`.
  inline void check_lemma_hypotheses(FiniteAlgebra const&                a,
                                     std::vector<FundamentalPair> const& fam) {
    if (fam.empty()) {
      throw HypothesisFailure("empty family");
    }
    for (auto const& [s, t] : fam) {
      for (auto const* sym : {&s, &t}) {
        auto i = a.signature().find(*sym);
        if (!i || a.arity(*i) != 3) {
          throw HypothesisFailure("'" + *sym
                                  + "' is not a ternary fundamental symbol");
        }
      }
    }
    auto v = check_condition6(a, fundamental_terms(fam));
    if (v.failed_identity) {
      throw HypothesisFailure("s(x,y,x) = t(x,y,x) fails for pair "
                              + std::to_string(*v.failed_identity));
    }
    if (v.witness) {
      throw HypothesisFailure("the family does not separate "
                              + std::to_string(v.witness->first) + " and "
                              + std::to_string(v.witness->second));
    }
  }

  struct SingleSequenceResult {
    std::size_t   index = 0;         // the link a_i, a_{i+1}
    std::size_t   family_index = 0;  // the pair p used
    bool          mirrored = false;  // s = t at (a,b,b) rather than (a,a,b)
    UnorderedPair target{0, 1};      // {c, d}
    PairChain     link_chain;        // {a_i, a_{i+1}} ⇒_{1,2} {c, d}
    PairChain     end_chain;         // {a, b} ⇒_{1,2} {c, d}
  };

  namespace detail {
    inline PairChain three_node_chain(UnorderedPair             src,
                                      Element                   c,
                                      Element                   mid,
                                      Element                   d,
                                      Translation const&        f1,
                                      Translation const&        f2) {
      PairChain ch;
      ch.source       = src;
      ch.nodes        = {c, mid, d};
      ch.depth_bound  = 1;
      ch.length_bound = 2;
      ch.links.push_back({c == mid, c == mid ? Translation{} : f1});
      ch.links.push_back({mid == d, mid == d ? Translation{} : f2});
      return ch;
    }

    inline SingleSequenceResult
    single_sequence_unchecked(FiniteAlgebra const&      a,
                    std::vector<FundamentalPair> const& fam,
                    std::vector<Element> const&         seq) {
      if (seq.size() < 2 || seq.front() == seq.back()) {
        throw Error("sequence must run between two distinct elements");
      }
      Element const a0 = seq.front(), b0 = seq.back();
      auto          ev = [&](std::string const& sym, Element x, Element y,
                    Element z) {
        return a.apply(a.signature().index_of(sym), {x, y, z});
      };
      for (std::size_t p = 0; p < fam.size(); ++p) {
        auto const& [s, t] = fam[p];
        bool e_aab = ev(s, a0, a0, b0) == ev(t, a0, a0, b0);
        bool e_abb = ev(s, a0, b0, b0) == ev(t, a0, b0, b0);
        if (e_aab == e_abb) {
          continue;
        }
        // eq(j): s(a, a_j, b) = t(a, a_j, b). It flips between a_0 and a_n;
        // take the first flip in the direction of the change.
        auto eq = [&](std::size_t j) {
          return ev(s, a0, seq[j], b0) == ev(t, a0, seq[j], b0);
        };
        std::size_t i = 0;
        while (!(eq(i) == e_aab && eq(i + 1) != e_aab)) {
          ++i;
        }
        SingleSequenceResult r;
        r.index        = i;
        r.family_index = p;
        r.mirrored     = !e_aab;
        // Unequal side: w; equal side: e.
        Element w = e_aab ? seq[i + 1] : seq[i];
        Element e = e_aab ? seq[i] : seq[i + 1];
        Element c = ev(s, a0, w, b0);
        Element d = ev(t, a0, w, b0);
        Element u = ev(s, a0, e, b0);
        Element v = ev(s, a0, w, a0);
        Translation f1{{{s, 1, {a0, b0}}}}, f2{{{t, 1, {a0, b0}}}};
        Translation g1{{{s, 2, {a0, w}}}}, g2{{{t, 2, {a0, w}}}};
        r.target     = UnorderedPair::make(c, d);
        r.link_chain = three_node_chain(UnorderedPair::make(seq[i], seq[i + 1]),
                                        c, u, d, f1, f2);
        r.end_chain  = three_node_chain(UnorderedPair::make(a0, b0), c, v, d,
                                        g1, g2);
        return r;
      }
      throw HypothesisFailure("no pair of the family separates "
                              + std::to_string(a0) + " and "
                              + std::to_string(b0));
    }
  }  // namespace detail

  inline SingleSequenceResult
  single_sequence(FiniteAlgebra const&                a,
                  std::vector<FundamentalPair> const& fam,
                  std::vector<Element> const&         seq) {
    check_lemma_hypotheses(a, fam);
    return detail::single_sequence_unchecked(a, fam, seq);
  }

  // Chain with a single link from `src` via t, with bounds (k, 1).
  inline PairChain single_link_chain(FiniteAlgebra const& a,
                                     UnorderedPair        src,
                                     Translation const&   t,
                                     BigInt const&        k) {
    PairChain c;
    c.source = src;
    c.nodes  = {t(a, src.lo), t(a, src.hi)};
    if (c.nodes[0] == c.nodes[1]) {
      throw Error("translation collapses the pair");
    }
    c.links.push_back({false, t});
    c.depth_bound  = k;
    c.length_bound = 1;
    return c;
  }

  // From src ⇒_{k,m} P and P ⇒_{l,n} Q, a chain src ⇒_{k+l,mn} Q: each link
  // g of the second chain is applied to the whole first chain. Equal steps
  // are dropped.
  inline PairChain compose(FiniteAlgebra const& a,
                           PairChain const&     first,
                           PairChain const&     second) {
    if (first.target() != second.source) {
      throw Error("compose: chains do not meet");
    }
    PairChain out;
    out.source       = first.source;
    out.depth_bound  = first.depth_bound + second.depth_bound;
    out.length_bound = first.length_bound * second.length_bound;
    out.nodes        = {second.nodes.front()};
    for (std::size_t h = 0; h < second.links.size(); ++h) {
      Element from = second.nodes[h], to = second.nodes[h + 1];
      if (second.links[h].equal) {
        continue;
      }
      auto const&          g = second.links[h].translation;
      std::vector<Element> img;
      for (Element x : first.nodes) {
        img.push_back(g(a, x));
      }
      bool forward = img.front() == from;
      if (!forward && img.back() != from) {
        throw Error("compose: link does not map the pair onto its step");
      }
      std::size_t const L = first.links.size();
      for (std::size_t i = 0; i < L; ++i) {
        std::size_t j  = forward ? i : L - 1 - i;
        Element     nx = forward ? img[j + 1] : img[j];
        if (nx == out.nodes.back()) {
          continue;
        }
        out.nodes.push_back(nx);
        out.links.push_back({false, first.links[j].translation.then(g)});
      }
      if (out.nodes.back() != to) {
        throw Error("compose: image chain ends off its step");
      }
    }
    return out;
  }

  // Declares looser bounds on a chain that already meets them.
  inline PairChain relax(PairChain c, BigInt const& k, BigInt const& n) {
    if (BigInt(c.depth()) > k || BigInt(c.length()) > n || c.depth_bound > k
        || c.length_bound > n) {
      throw Error("relax: chain exceeds the requested bounds");
    }
    c.depth_bound  = k;
    c.length_bound = n;
    return c;
  }

  struct KeyLink {
    std::size_t   index = 0;  // position of the link in its sequence
    UnorderedPair link{0, 1};
    PairChain     chain;      // link ⇒_{N,2^N} target
  };

  struct MultiSequenceResult {
    std::size_t          N = 0;
    UnorderedPair        target{0, 1};  // {u, v}
    std::vector<KeyLink> keys;
    PairChain            end_chain;     // {a, b} ⇒_{N,2^N} {u, v}
  };

  namespace detail {
    inline MultiSequenceResult
    multi_sequence(FiniteAlgebra const&                     a,
                   std::vector<FundamentalPair> const&      fam,
                   std::vector<std::vector<Element>> const& seqs,
                   std::size_t                              count) {
      BigInt const N(count);
      BigInt const two_N = BigInt(1) << count;
      if (count == 1) {
        auto single = single_sequence_unchecked(a, fam, seqs[0]);
        MultiSequenceResult r;
        r.N      = 1;
        r.target = single.target;
        r.keys.push_back({single.index,
                          UnorderedPair::make(seqs[0][single.index],
                                              seqs[0][single.index + 1]),
                          single.link_chain});
        r.end_chain = single.end_chain;
        return r;
      }
      auto rec = multi_sequence(a, fam, seqs, count - 1);
      auto const& E = rec.end_chain;

      // Distinct c = c_0, .., c_m = d with {a,b} →_{N-1} {c_j, c_{j+1}}.
      std::vector<Element>     cs{E.nodes.front()};
      std::vector<Translation> fs;
      for (std::size_t h = 0; h < E.links.size(); ++h) {
        Element nx = E.nodes[h + 1];
        if (E.links[h].equal) {
          continue;
        }
        auto loop = std::find(cs.begin(), cs.end(), nx);
        if (loop != cs.end()) {
          auto keep = std::size_t(loop - cs.begin());
          cs.resize(keep + 1);
          fs.resize(keep);
          continue;
        }
        cs.push_back(nx);
        fs.push_back(E.links[h].translation);
      }

      auto const&   S  = seqs[count - 1];
      Element const sa = S.front(), sb = S.back();
      std::size_t const lam = S.size() - 1;
      // T: the images f_j(S) or their reverses, junctions merged; for each
      // link of T, the (j, k) it came from.
      std::vector<Element>                           T{cs.front()};
      std::vector<std::pair<std::size_t, std::size_t>> from;
      for (std::size_t j = 0; j < fs.size(); ++j) {
        bool fwd = fs[j](a, sa) == cs[j];
        if (!fwd && fs[j](a, sb) != cs[j]) {
          throw Error("internal: translation does not map {a,b} onto a link");
        }
        for (std::size_t t = 0; t < lam; ++t) {
          std::size_t k = fwd ? t : lam - 1 - t;
          T.push_back(fs[j](a, fwd ? S[k + 1] : S[k]));
          from.emplace_back(j, k);
        }
      }
      auto single = single_sequence_unchecked(a, fam, T);
      auto [j, k] = from[single.index];
      UnorderedPair key = UnorderedPair::make(S[k], S[k + 1]);

      MultiSequenceResult r;
      r.N      = count;
      r.target = single.target;
      for (auto const& kl : rec.keys) {
        r.keys.push_back(
            {kl.index, kl.link, compose(a, kl.chain, single.end_chain)});
      }
      auto step = single_link_chain(a, key, fs[j], BigInt(count - 1));
      r.keys.push_back({k, key, relax(compose(a, step, single.link_chain),
                                      N, two_N)});
      r.end_chain = compose(a, E, single.end_chain);
      return r;
    }
  }  // namespace detail

  // Sequences S_1..S_N, all from a to b (a != b).
  inline MultiSequenceResult
  multi_sequence(FiniteAlgebra const&                     a,
                 std::vector<FundamentalPair> const&      fam,
                 std::vector<std::vector<Element>> const& seqs) {
    if (seqs.empty()) {
      throw Error("no sequences given");
    }
    for (auto const& s : seqs) {
      if (s.size() < 2 || s.front() != seqs[0].front()
          || s.back() != seqs[0].back()) {
        throw Error("sequences must share their endpoints");
      }
      for (Element x : s) {
        if (x >= a.size()) {
          throw Error("sequence element out of range");
        }
      }
    }
    if (seqs[0].front() == seqs[0].back()) {
      throw Error("sequence endpoints must differ");
    }
    check_lemma_hypotheses(a, fam);
    return detail::multi_sequence(a, fam, seqs, seqs.size());
  }

  struct Corollary33Item {
    UnorderedPair pair{0, 1};
    UnorderedPair reached{0, 1};  // {r_i, s_i}
    PairChain     step;           // pair →_n {r_i, s_i}
    PairChain     key_chain;      // {r_i, s_i} ⇒_{N,2^N} {u', v'}
    PairChain     combined;       // pair ⇒_{n+N,2^N} {u', v'}
  };

  struct Corollary33Result {
    std::size_t                  n = 0;
    std::size_t                  N = 0;
    UnorderedPair                target{0, 1};  // {u', v'}
    std::vector<Corollary33Item> items;
    PairChain                    from_uv;       // {u,v} ⇒_{N,2^N} {u', v'}
  };

  inline Corollary33Result corollary33(FiniteAlgebra const&                a,
                                       std::vector<FundamentalPair> const& fam,
                                       std::vector<UnorderedPair> const& pairs,
                                       UnorderedPair                       uv,
                                       std::size_t                         n) {
    if (pairs.empty() || n == 0) {
      throw Error("need at least one pair and n > 0");
    }
    check_lemma_hypotheses(a, fam);
    auto basics = std::make_shared<std::vector<detail::Basic> const>(
        detail::basic_translations(a));
    std::vector<PairChain>            chains;
    std::vector<std::vector<Element>> seqs;
    for (auto const& p : pairs) {
      auto ch = darrow(ReachMap(a, p, basics), uv, n, a.size());
      if (!ch) {
        throw HypothesisFailure(
            "{" + std::to_string(p.lo) + "," + std::to_string(p.hi)
            + "} does not reach {" + std::to_string(uv.lo) + ","
            + std::to_string(uv.hi) + "} through depth " + std::to_string(n));
      }
      seqs.push_back(ch->nodes);
      chains.push_back(std::move(*ch));
    }
    auto ms = detail::multi_sequence(a, fam, seqs, seqs.size());

    Corollary33Result r;
    r.n       = n;
    r.N       = pairs.size();
    r.target  = ms.target;
    r.from_uv = ms.end_chain;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      auto const& key = ms.keys[i];
      auto step = single_link_chain(a, pairs[i],
                                    chains[i].links[key.index].translation, n);
      if (step.target() != key.link) {
        throw Error("internal: key link is not the image of its pair");
      }
      r.items.push_back({pairs[i], key.link, step, key.chain,
                         compose(a, step, key.chain)});
    }
    return r;
  }

  // For every source pair, which pairs it reaches under ⇒_{k,n}.
  class ArrowTable {
   public:
    ArrowTable(FiniteAlgebra const& a, BigInt k, BigInt n)
        : _n(a.size()), _k(std::move(k)), _len(std::move(n)) {
      auto basics = std::make_shared<std::vector<detail::Basic> const>(
          detail::basic_translations(a));
      _ok.assign(_n * _n, std::vector<bool>(_n * _n, false));
      for (Element x = 0; x < _n; ++x) {
        for (Element y = x + 1; y < _n; ++y) {
          _maps.emplace_back(a, UnorderedPair{x, y}, basics);
          auto const& reach = _maps.back();
          _max_saturation   = std::max(_max_saturation, reach.saturation());
          auto& row         = _ok[x * _n + y];
          // Distances in the graph of pairs of depth <= k.
          for (Element c = 0; c < _n; ++c) {
            std::vector<std::size_t> dist(_n, SIZE_MAX);
            std::deque<Element>      q{c};
            dist[c] = 0;
            while (!q.empty()) {
              Element u = q.front();
              q.pop_front();
              for (Element w = 0; w < _n; ++w) {
                if (w == u || dist[w] != SIZE_MAX) {
                  continue;
                }
                auto d = reach.depth(UnorderedPair::make(u, w));
                if (d && BigInt(*d) <= _k) {
                  dist[w] = dist[u] + 1;
                  q.push_back(w);
                }
              }
            }
            for (Element d = c + 1; d < _n; ++d) {
              row[c * _n + d] = dist[d] != SIZE_MAX && BigInt(dist[d]) <= _len;
            }
          }
        }
      }
    }

    bool operator()(UnorderedPair src, UnorderedPair dst) const {
      return _ok[src.lo * _n + src.hi][dst.lo * _n + dst.hi];
    }

    PairChain chain(UnorderedPair src, UnorderedPair dst) const {
      auto c = darrow(map(src), dst, _k, _len);
      if (!c) {
        throw Error("no chain");
      }
      return *c;
    }

    std::size_t max_saturation() const noexcept {
      return _max_saturation;
    }

   private:
    ReachMap const& map(UnorderedPair p) const {
      // pairs are stored in lexicographic order
      std::size_t idx = 0;
      for (Element x = 0; x < p.lo; ++x) {
        idx += _n - 1 - x;
      }
      return _maps[idx + (p.hi - p.lo - 1)];
    }

    std::size_t                    _n;
    BigInt                         _k, _len;
    std::vector<ReachMap>          _maps;
    std::vector<std::vector<bool>> _ok;
    std::size_t                    _max_saturation = 0;
  };

  struct PhiWitness {
    std::vector<Element>   xs;  // x_0 < .. < x_m
    UnorderedPair          yz{0, 1};
    std::vector<PairChain> chains;  // {x_i, x_j}, i < j, lexicographic
  };

  struct PhiResult {
    unsigned                  m = 0;
    BigInt                    depth_bound, length_bound;  // 2^(6m), 2^L
    // Saturation depth <= 2^(6m) and |A| - 1 <= 2^L: the relations with
    // these astronomic indices coincide with their saturated versions.
    bool                      saturated = false;
    std::optional<PhiWitness> witness;
  };

  inline constexpr std::size_t default_phi_cap = 64;

  // Evaluates the sentence Φ_m exactly.
  inline Capped<PhiResult> phi_m(FiniteAlgebra const& a,
                                 unsigned             m,
                                 std::size_t          cap = default_phi_cap) {
    if (a.size() > cap) {
      return CapExceeded{"algebra has " + std::to_string(a.size())
                             + " elements, cap is " + std::to_string(cap),
                         a.size()};
    }
    auto       k = constants(m);
    PhiResult  r;
    r.m            = m;
    r.depth_bound  = k.two_6m;
    r.length_bound = k.two_L;
    ArrowTable arrows(a, r.depth_bound, r.length_bound);
    r.saturated = BigInt(arrows.max_saturation()) <= r.depth_bound
                  && BigInt(a.size()) <= r.length_bound + 1;
    std::size_t const n = a.size();
    if (n < m + 1) {
      return r;
    }
    // (m+1)-subsets in lexicographic order.
    std::vector<Element> xs(m + 1);
    for (Element i = 0; i <= m; ++i) {
      xs[i] = i;
    }
    while (true) {
      for (Element y = 0; y < n; ++y) {
        for (Element z = y + 1; z < n; ++z) {
          bool all = true;
          for (std::size_t i = 0; i <= m && all; ++i) {
            for (std::size_t j = i + 1; j <= m && all; ++j) {
              all = arrows({xs[i], xs[j]}, {y, z});
            }
          }
          if (all) {
            PhiWitness w{xs, {y, z}, {}};
            for (std::size_t i = 0; i <= m; ++i) {
              for (std::size_t j = i + 1; j <= m; ++j) {
                w.chains.push_back(arrows.chain({xs[i], xs[j]}, {y, z}));
              }
            }
            r.witness = std::move(w);
            return r;
          }
        }
      }
      // next subset
      std::size_t i = m + 1;
      while (i > 0 && xs[i - 1] == n - (m + 1) + (i - 1)) {
        --i;
      }
      if (i == 0) {
        break;
      }
      ++xs[i - 1];
      for (std::size_t j = i; j <= m; ++j) {
        xs[j] = xs[j - 1] + 1;
      }
    }
    return r;
  }

  struct MuWitness {
    UnorderedPair uv{0, 1};
    PairChain     first;   // {x,y} ⇒_{ℓ,4} {u,v}
    PairChain     second;  // {z,w} ⇒_{ℓ,4} {u,v}
  };

  inline std::optional<MuWitness> mu(ArrowTable const& arrows,
                                     std::size_t       n,
                                     UnorderedPair     xy,
                                     UnorderedPair     zw) {
    for (Element u = 0; u < n; ++u) {
      for (Element v = u + 1; v < n; ++v) {
        if (arrows(xy, {u, v}) && arrows(zw, {u, v})) {
          return MuWitness{{u, v}, arrows.chain(xy, {u, v}),
                           arrows.chain(zw, {u, v})};
        }
      }
    }
    return std::nullopt;
  }

  inline std::optional<MuWitness> mu(FiniteAlgebra const& a,
                                     unsigned             m,
                                     UnorderedPair        xy,
                                     UnorderedPair        zw) {
    ArrowTable arrows(a, constants(m).ell, 4);
    return mu(arrows, a.size(), xy, zw);
  }

  struct DichotomyReport {
    bool                                phi_holds = false;
    std::optional<PhiWitness>           phi;
    std::size_t                         quadruples = 0;
    std::size_t                         related    = 0;  // M true
    std::vector<std::array<Element, 4>> mismatches;
  };

  // Either Φ_m holds, or M(a,b,c,d) iff μ(a,b,c,d) for all quadruples.
  inline Capped<DichotomyReport>
  dichotomy_check(FiniteAlgebra const& a,
                  unsigned             m,
                  std::size_t          cap = default_phi_cap) {
    auto phi = phi_m(a, m, cap);
    if (auto e = std::get_if<CapExceeded>(&phi)) {
      return *e;
    }
    DichotomyReport r;
    if (auto& w = std::get<PhiResult>(phi).witness) {
      r.phi_holds = true;
      r.phi       = std::move(w);
      return r;
    }
    ArrowTable           arrows(a, constants(m).ell, 4);
    PrincipalCongruences cg(a);
    for_each_tuple(a.size(), 4, [&](std::span<Element const> q) {
      ++r.quadruples;
      bool M  = meet_relation_M(cg, q[0], q[1], q[2], q[3]);
      bool mu_ = q[0] != q[1] && q[2] != q[3]
                 && mu(arrows, a.size(), UnorderedPair::make(q[0], q[1]),
                       UnorderedPair::make(q[2], q[3]))
                        .has_value();
      r.related += M;
      if (M != mu_) {
        r.mismatches.push_back({q[0], q[1], q[2], q[3]});
      }
    });
    return r;
  }

}  // namespace unialg

#endif  // UNIALG_BAKER_HPP_
