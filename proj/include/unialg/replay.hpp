#ifndef UNIALG_REPLAY_HPP_
#define UNIALG_REPLAY_HPP_

#include <string>

#include "unialg/baker.hpp"

// Re-checks chains against the raw operation tables. Shares no evaluation
// code with the search in baker.hpp.
namespace unialg::replay {

  inline std::string pair_text(Element a, Element b) {
    return "{" + std::to_string(a) + "," + std::to_string(b) + "}";
  }

  // Empty if every step of t is a basic translation of `a`.
  inline std::string check_translation(FiniteAlgebra const& a,
                                       Translation const&   t) {
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
      auto const& st = t.steps[i];
      auto        op = a.signature().find(st.symbol);
      if (!op) {
        return "step " + std::to_string(i) + ": unknown symbol '" + st.symbol
               + "'";
      }
      auto k = a.signature()[*op].arity;
      if (k == 0 || st.position >= k || st.params.size() + 1 != k) {
        return "step " + std::to_string(i) + ": bad shape for '" + st.symbol
               + "'";
      }
      for (Element p : st.params) {
        if (p >= a.size()) {
          return "step " + std::to_string(i) + ": parameter out of range";
        }
      }
    }
    return {};
  }

  inline Element apply(FiniteAlgebra const& a, Translation const& t, Element x) {
    for (auto const& st : t.steps) {
      auto const& table = a.tables()[*a.signature().find(st.symbol)];
      std::size_t idx = 0, pi = 0;
      std::size_t k = st.params.size() + 1;
      for (std::size_t i = 0; i < k; ++i) {
        Element v = i == st.position ? x : st.params[pi++];
        idx       = idx * a.size() + v;
      }
      x = table[idx];
    }
    return x;
  }

  // Empty if c witnesses c.source ⇒_{k,n} c.target() within its declared
  // bounds: consecutive nodes either equal (an equal step) or the image of
  // the source pair under a translation of depth at most k.
  inline std::string check_chain(FiniteAlgebra const& a, PairChain const& c) {
    if (c.nodes.size() < 2 || c.links.size() + 1 != c.nodes.size()) {
      return "chain shape is inconsistent";
    }
    if (c.source.lo >= c.source.hi || c.source.hi >= a.size()) {
      return "bad source pair";
    }
    if (c.nodes.front() == c.nodes.back()) {
      return "chain endpoints coincide";
    }
    if (BigInt(c.links.size()) > c.length_bound) {
      return "chain has " + std::to_string(c.links.size())
             + " links, bound is " + c.length_bound.str();
    }
    for (std::size_t i = 0; i < c.links.size(); ++i) {
      Element u = c.nodes[i], v = c.nodes[i + 1];
      if (u >= a.size() || v >= a.size()) {
        return "node out of range";
      }
      auto const& l = c.links[i];
      if (l.equal) {
        if (u != v) {
          return "link " + std::to_string(i) + " is marked equal but "
                 + pair_text(u, v) + " differ";
        }
        continue;
      }
      if (auto why = check_translation(a, l.translation); !why.empty()) {
        return "link " + std::to_string(i) + ": " + why;
      }
      if (BigInt(l.translation.depth()) > c.depth_bound) {
        return "link " + std::to_string(i) + " has depth "
               + std::to_string(l.translation.depth()) + ", bound is "
               + c.depth_bound.str();
      }
      Element x = apply(a, l.translation, c.source.lo);
      Element y = apply(a, l.translation, c.source.hi);
      bool    onto = (x == u && y == v) || (x == v && y == u);
      if (!onto || u == v) {
        return "link " + std::to_string(i) + " maps "
               + pair_text(c.source.lo, c.source.hi) + " to "
               + pair_text(x, y) + ", expected " + pair_text(u, v);
      }
    }
    return {};
  }

}  // namespace unialg::replay

#endif  // UNIALG_REPLAY_HPP_
