#ifndef UNIALG_TESTS_FIXTURES_HPP_
#define UNIALG_TESTS_FIXTURES_HPP_

#include <string>

#include "unialg/alg_io.hpp"
#include "unialg/baker.hpp"
#include "unialg/sdmeet.hpp"

namespace fixtures {

  inline unialg::FiniteAlgebra load(std::string const& name) {
    return unialg::load_algebra(std::string(UNIALG_DATA_DIR) + "/" + name + ".alg");
  }

  // Root b with green children 1 and 2; node 3 (blue) is the only child
  // of node 2.
  inline unialg::ColouredTree semilattice_tree() {
    using unialg::Colour;
    using unialg::ColouredTree;
    ColouredTree t;
    t.add(ColouredTree::none, Colour::b);
    t.add(0, Colour::g);
    t.add(0, Colour::g);
    t.add(2, Colour::b);
    return t;
  }

  // s1 = xy, t1 = xyz, s2 = xz, t2 = z, s3 = xyz, t3 = yz over the meet m.
  inline unialg::TermPairFamily semilattice_family() {
    auto P = [](char const* s) { return unialg::parse_term(s); };
    return {{P("x0"), P("x2")},
            {P("(m x0 x1)"), P("(m (m x0 x1) x2)")},
            {P("(m x0 x2)"), P("x2")},
            {P("(m (m x0 x1) x2)"), P("(m x1 x2)")}};
  }

  inline std::vector<unialg::FundamentalPair> semilattice_symbols() {
    return {{"s1", "t1"}, {"s2", "t2"}, {"s3", "t3"}};
  }

  inline std::vector<unialg::FundamentalPair> discriminator_symbols() {
    return {{"d", "thrd"}};
  }

}  // namespace fixtures

#endif  // UNIALG_TESTS_FIXTURES_HPP_
