#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "unialg/alg_io.hpp"
#include "unialg/construct.hpp"
#include "unialg/term.hpp"

using namespace unialg;

TEST_CASE("parse S2", "[algebra-core]") {
  auto s2 = parse_algebra("algebra S2\nsize 2\nop m 2\n0 0\n0 1\n");
  CHECK(s2.name() == "S2");
  CHECK(s2.size() == 2);
  CHECK(s2.table(0) == FiniteAlgebra::Table{0, 0, 0, 1});
}

TEST_CASE("short table is rejected", "[algebra-core]") {
  try {
    parse_algebra("algebra B\nsize 2\nop m 2\n0 0 0\n");
    FAIL("no error");
  } catch (ParseError const& e) {
    CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("expected 4 entries"));
  }
}

TEST_CASE("out of range entry is rejected", "[algebra-core]") {
  CHECK_THROWS_AS(parse_algebra("algebra B\nsize 2\nop m 2\n0 0 0 2\n"), ParseError);
}

TEST_CASE("D3 spot values", "[algebra-core]") {
  auto d3 = fixtures::load("D3");
  CHECK(d3.apply(0, {0, 1, 2}) == 2);
  CHECK(d3.apply(0, {1, 1, 0}) == 1);
  for (Element x = 0; x < 3; ++x) {
    for (Element y = 0; y < 3; ++y) {
      for (Element z = 0; z < 3; ++z) {
        CHECK(d3.apply(0, {x, y, z}) == (x == y ? x : z));
      }
    }
  }
}

TEST_CASE("serialize round trip", "[algebra-core]") {
  for (auto name : {"S2", "Z2", "C3", "D3", "D3x", "S2x", "C3x"}) {
    auto a    = fixtures::load(name);
    auto back = parse_algebra(serialize_algebra(a));
    CHECK(back == a);
    CHECK(back.signature() == a.signature());
  }
  auto d3x = fixtures::load("D3x");
  CHECK(d3x.signature()[0].name == "d");
  CHECK(d3x.signature()[1].name == "thrd");
}

TEST_CASE("eval_term", "[algebra-core]") {
  auto s2  = fixtures::load("S2");
  auto s2x = fixtures::load("S2x");
  auto d3  = fixtures::load("D3");
  CHECK(eval_term(s2, parse_term("(m x0 x1)"), std::vector<Element>{1, 1}) == 1);
  CHECK(eval_term(s2x, parse_term("(s1 x0 x1 x2)"), std::vector<Element>{1, 0, 1}) == 0);
  CHECK(eval_term(d3, parse_term("(d x0 x1 x2)"), std::vector<Element>{0, 1, 2}) == 2);
  CHECK_THROWS_AS(eval_term(s2, parse_term("(q x0)"), std::vector<Element>{0}), Error);
  CHECK_THROWS_AS(eval_term(s2, parse_term("(m x0)"), std::vector<Element>{0}), Error);
}

TEST_CASE("eval_term agrees with naive evaluation on random terms", "[algebra-core]") {
  std::mt19937 rng(7);
  auto         d3x = fixtures::load("D3x");
  std::vector<std::string> syms{"d", "thrd"};
  std::function<Term(int)> gen = [&](int depth) -> Term {
    if (depth == 0 || rng() % 3 == 0) {
      return Term::var(rng() % 3);
    }
    return Term::apply(syms[rng() % 2], {gen(depth - 1), gen(depth - 1), gen(depth - 1)});
  };
  for (int i = 0; i < 100; ++i) {
    auto t = gen(4);
    for_each_tuple(3, 3, [&](std::span<Element const> env) {
      std::vector<Element> e(env.begin(), env.end());
      CHECK(eval_term(d3x, t, e) == oracle::eval(d3x, t, e));
    });
  }
}

TEST_CASE("substitution commutes with evaluation", "[algebra-core]") {
  auto c3 = fixtures::load("C3");
  auto t  = parse_term("(m (m x0 x1) x2)");
  // t[x0 := x2, x1 := x0, x2 := x1]
  auto u = substitute(t, {Term::var(2), Term::var(0), Term::var(1)});
  for_each_tuple(3, 3, [&](std::span<Element const> s) {
    std::vector<Element> sigma(s.begin(), s.end());
    std::vector<Element> permuted{sigma[2], sigma[0], sigma[1]};
    CHECK(eval_term(c3, u, sigma) == eval_term(c3, t, permuted));
  });
}

TEST_CASE("check_identity", "[algebra-core]") {
  auto s2  = fixtures::load("S2");
  auto z2  = fixtures::load("Z2");
  auto s2x = fixtures::load("S2x");
  CHECK_FALSE(check_identity(s2, Identity(parse_term("(m x0 x0)"), parse_term("x0"))));
  auto bad = check_identity(z2, Identity(parse_term("(p x0 x0)"), parse_term("x0")));
  REQUIRE(bad);
  CHECK(*bad == std::vector<Element>{1});
  CHECK_FALSE(check_identity(s2x, Identity(parse_term("(t2 x0 x0 x1)"), parse_term("x1"))));
}

TEST_CASE("identities pass to subalgebras and quotients", "[algebra-core]") {
  auto c3 = fixtures::load("C3");
  std::vector<Identity> ids{
      Identity(parse_term("(m x0 x1)"), parse_term("(m x1 x0)")),
      Identity(parse_term("(m x0 (m x1 x2))"), parse_term("(m (m x0 x1) x2)")),
      Identity(parse_term("(m x0 x0)"), parse_term("x0"))};
  auto sub = subalgebra(c3, generate_subalgebra(c3, {1, 2}).elements).algebra;
  auto quo = quotient_algebra(c3, parse_partition("[[0,1],[2]]", 3)).algebra;
  for (auto const& e : ids) {
    REQUIRE_FALSE(check_identity(c3, e));
    CHECK_FALSE(check_identity(sub, e));
    CHECK_FALSE(check_identity(quo, e));
  }
}

TEST_CASE("generate_subalgebra", "[algebra-core]") {
  auto s2 = fixtures::load("S2");
  auto c3 = fixtures::load("C3");
  CHECK(generate_subalgebra(s2, {1}).sorted() == std::vector<Element>{1});
  CHECK(generate_subalgebra(s2, {0, 1}).sorted() == std::vector<Element>{0, 1});
  CHECK(generate_subalgebra(c3, {1, 2}).sorted() == std::vector<Element>{1, 2});

  auto d3 = fixtures::load("D3");
  auto w  = generate_subalgebra(d3, {0, 2}, true);
  for (std::size_t i = 0; i < w.elements.size(); ++i) {
    CHECK(eval_term(d3, w.witness[i], std::vector<Element>{0, 2}) == w.elements[i]);
  }
}

TEST_CASE("generate_subalgebra is monotone and idempotent", "[algebra-core]") {
  std::mt19937 rng(11);
  for (int i = 0; i < 50; ++i) {
    auto                 a = oracle::random_algebra(rng);
    std::vector<Element> small{Element(rng() % a.size())};
    std::vector<Element> big = small;
    big.push_back(Element(rng() % a.size()));
    auto s1 = generate_subalgebra(a, small).sorted();
    auto s2 = generate_subalgebra(a, big).sorted();
    CHECK(std::includes(s2.begin(), s2.end(), s1.begin(), s1.end()));
    CHECK(generate_subalgebra(a, s1).sorted() == s1);
  }
}

TEST_CASE("direct_power", "[algebra-core]") {
  auto s2 = fixtures::load("S2");
  auto z2 = fixtures::load("Z2");
  auto p1 = std::get<FiniteAlgebra>(direct_power(s2, 1));
  CHECK(p1.tables() == s2.tables());
  auto z22 = std::get<FiniteAlgebra>(direct_power(z2, 2));
  CHECK(z22.size() == 4);
  // (1,0) = 2, (0,1) = 1, (1,1) = 3
  CHECK(z22.apply(0, {2, 1}) == 3);
  auto s22 = std::get<FiniteAlgebra>(direct_power(s2, 2));
  for (Element x = 0; x < 4; ++x) {
    for (Element y = 0; y < 4; ++y) {
      CHECK(s22.apply(0, {x, y}) == (x & y));
    }
  }
  CHECK(exceeded(direct_power(s2, 40)));
}

TEST_CASE("quotient_algebra", "[algebra-core]") {
  auto c3 = fixtures::load("C3");
  auto s2 = fixtures::load("S2");
  auto q  = quotient_algebra(c3, parse_partition("[[0,1],[2]]", 3));
  CHECK(q.algebra.tables() == s2.tables());
  CHECK(q.block_of == std::vector<Element>{0, 0, 1});
  CHECK(quotient_algebra(c3, Partition::identity(3)).algebra.tables() == c3.tables());
  CHECK(quotient_algebra(c3, Partition::total(3)).algebra.size() == 1);
  try {
    quotient_algebra(c3, parse_partition("[[0,2],[1]]", 3));
    FAIL("no error");
  } catch (NotACongruence const& e) {
    CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("'m'"));
  }
}
