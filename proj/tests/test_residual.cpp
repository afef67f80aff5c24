#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "unialg/residual.hpp"

using namespace unialg;

namespace {
  // x ↦ (x, x) in A^2, for elements and for translation parameters.
  Element diag(std::size_t n, Element x) {
    return Element(x * n + x);
  }

  PhiWitness lift_diagonal(PhiWitness const& w, std::size_t n) {
    PhiWitness out;
    for (Element x : w.xs) {
      out.xs.push_back(diag(n, x));
    }
    out.yz = UnorderedPair::make(diag(n, w.yz.lo), diag(n, w.yz.hi));
    for (auto c : w.chains) {
      c.source = UnorderedPair::make(diag(n, c.source.lo), diag(n, c.source.hi));
      for (auto& e : c.nodes) {
        e = diag(n, e);
      }
      for (auto& l : c.links) {
        for (auto& st : l.translation.steps) {
          for (auto& p : st.params) {
            p = diag(n, p);
          }
        }
      }
      out.chains.push_back(std::move(c));
    }
    return out;
  }

  std::vector<std::size_t> sizes(SiSearchReport const& r) {
    std::vector<std::size_t> out;
    for (auto const& f : r.found) {
      out.push_back(f.algebra.size());
    }
    return out;
  }
}  // namespace

TEST_CASE("tower bound for k = 2, m = 2", "[residual]") {
  auto b = theorem51_bound(2, 2, 2);
  CHECK(b.arity_bound == 3);
  CHECK(b.p == 18);
  CHECK(b.n_star == 786432);
  CHECK(b.witness_count == 196611);
  CHECK(b.inequality_holds);
  CHECK(b.log2log2_exact);
  CHECK(b.log2log2_lo == 786432);
  CHECK(b.log2log2_hi == 786432);
  CHECK(b.expression == "2^(2^786432)");
  CHECK_FALSE(b.exact);
  CHECK_FALSE(b.as_written.empty());
}

TEST_CASE("tower bound invariants", "[residual]") {
  for (unsigned m = 2; m <= 6; ++m) {
    for (std::size_t ar : {1, 3, 5}) {
      auto b = theorem51_bound(3, m, ar);
      CHECK(b.p == m * m + 7 * m);
      CHECK(b.n_star == (BigInt(1) << (m * m + 7 * m)) * std::max<std::size_t>(ar, 3));
      CHECK(b.inequality_holds);
      CHECK(b.witness_count <= b.n_star);
      // k = 3 is not a power of two: an interval around n* log2 3
      CHECK_FALSE(b.log2log2_exact);
      CHECK(b.log2log2_lo <= b.log2log2_hi);
      CHECK(b.log2log2_lo == b.n_star);
    }
  }
  auto m3 = theorem51_bound(2, 3, 3);
  CHECK(m3.witness_count == 201326596);
  CHECK(m3.n_star == 3221225472);
  auto k4 = theorem51_bound(4, 2, 3);
  CHECK(k4.log2log2_exact);
  CHECK(k4.log2log2_lo == 786432 * 2 + 1);
}

TEST_CASE("tower bound for the one-element algebra", "[residual]") {
  auto b = theorem51_bound(1, 2, 2);
  REQUIRE(b.exact);
  CHECK(*b.exact == 1);
  CHECK_THROWS_AS(theorem51_bound(2, 1, 2), Error);
  CHECK(theorem51_bound(fixtures::load("D3"), 2).arity_bound == 3);
}

TEST_CASE("SI quotient from a Φ witness", "[residual]") {
  auto d3x = fixtures::load("D3x");
  auto phi = std::get<PhiResult>(phi_m(d3x, 2));
  REQUIRE(phi.witness);
  auto q = si_quotient_from_phi(d3x, 2, *phi.witness);
  CHECK(q.theta == Partition::identity(3));
  CHECK(q.algebra.size() == 3);
  CHECK(monolith(q.algebra).subdirectly_irreducible);

  auto sq = std::get<FiniteAlgebra>(direct_power(d3x, 2));
  auto w  = lift_diagonal(*phi.witness, 3);
  REQUIRE(phi_witness_problem(sq, 2, w).empty());
  auto q2 = si_quotient_from_phi(sq, 2, w);
  CHECK(q2.algebra.size() == 3);
  CHECK(monolith(q2.algebra).subdirectly_irreducible);
  CHECK_FALSE(q2.theta.related(w.yz.lo, w.yz.hi));
  for (std::size_t i = 0; i < w.xs.size(); ++i) {
    for (std::size_t j = i + 1; j < w.xs.size(); ++j) {
      CHECK_FALSE(q2.theta.related(w.xs[i], w.xs[j]));
    }
  }
}

TEST_CASE("invalid Φ witnesses are rejected", "[residual]") {
  auto d3x = fixtures::load("D3x");
  auto w   = *std::get<PhiResult>(phi_m(d3x, 2)).witness;
  auto bad = w;
  bad.yz   = UnorderedPair{1, 1};
  CHECK_THROWS_AS(si_quotient_from_phi(d3x, 2, bad), Error);
  bad = w;
  bad.xs[1] = bad.xs[0];
  CHECK_THROWS_AS(si_quotient_from_phi(d3x, 2, bad), Error);
  bad = w;
  bad.chains.pop_back();
  CHECK_THROWS_AS(si_quotient_from_phi(d3x, 2, bad), Error);
  // drop the translation from a link that needs one
  bad = w;
  bool forged = false;
  for (auto& c : bad.chains) {
    for (auto& l : c.links) {
      if (!forged && !l.translation.steps.empty()) {
        l.translation.steps.clear();
        forged = true;
      }
    }
  }
  REQUIRE(forged);
  CHECK_FALSE(phi_witness_problem(d3x, 2, bad).empty());
}

TEST_CASE("si_search on the semilattice", "[residual]") {
  auto s2 = fixtures::load("S2");
  auto r  = si_search(s2, 2);
  CHECK(sizes(r) == std::vector<std::size_t>{2});
  CHECK(r.budget_completed);
  CHECK_FALSE(r.exhausted);

  auto r3 = si_search(s2, 3);
  CHECK(r3.found.empty());
  CHECK_FALSE(r3.exhausted);
  CHECK_THAT(r3.coverage, Catch::Matchers::ContainsSubstring("j=3 g=3"));
}

TEST_CASE("si_search on D3 with first powers only", "[residual]") {
  auto r = si_search(fixtures::load("D3"), 2, {1, 3, 64});
  auto s = sizes(r);
  REQUIRE_FALSE(s.empty());
  CHECK(std::count(s.begin(), s.end(), 3) == 1);
  for (auto const& f : r.found) {
    CHECK(f.power == 1);
    if (f.algebra.size() == 3) {
      CHECK(f.algebra.tables() == fixtures::load("D3").tables());
    }
  }
}

TEST_CASE("every SI found is verified", "[residual]") {
  for (auto name : {"S2", "C3", "D3", "Z2"}) {
    auto a = fixtures::load(name);
    auto r = si_search(a, 2, {2, 2, 64});
    for (auto const& f : r.found) {
      CHECK(f.algebra.size() >= 2);
      CHECK(monolith(f.algebra).subdirectly_irreducible);
      auto v = hsp_member(f.algebra, a);
      REQUIRE_FALSE(exceeded(v));
      CHECK(std::get<MembershipVerdict>(v).member);
    }
  }
}

TEST_CASE("SI members above m satisfy Φ_m", "[residual]") {
  auto d3x = fixtures::load("D3x");
  // every subset of D3x is a subuniverse, so size 3 needs three generators
  auto r   = si_search(d3x, 2, {1, 3, 64});
  int  big = 0;
  for (auto const& f : r.found) {
    if (f.algebra.size() > 2) {
      ++big;
      CHECK(std::get<PhiResult>(phi_m(f.algebra, 2)).witness);
    }
  }
  CHECK(big > 0);
}

TEST_CASE("si_search budget validation and the trivial algebra", "[residual]") {
  CHECK_THROWS_AS(si_search(fixtures::load("S2"), 2, {0, 1, 1}), Error);
  auto t = si_search(parse_algebra("algebra T\nsize 1\nop m 2\n0\n"), 2);
  CHECK(t.exhausted);
  CHECK(t.found.empty());
}

TEST_CASE("si_search output is deterministic", "[residual]") {
  auto a = fixtures::load("C3");
  auto x = si_search(a, 2), y = si_search(a, 2);
  REQUIRE(x.found.size() == y.found.size());
  for (std::size_t i = 0; i < x.found.size(); ++i) {
    CHECK(serialize_algebra(x.found[i].algebra) == serialize_algebra(y.found[i].algebra));
  }
}

TEST_CASE("theoremB_decide examples", "[residual]") {
  using V = TheoremBResult::Verdict;
  auto s2 = fixtures::load("S2");

  auto no = theoremB_decide(s2, 2);
  CHECK(no.verdict == V::no);
  REQUIRE(no.witness);
  CHECK(no.witness->algebra.size() == 2);
  CHECK(no.witness->algebra.tables() == s2.tables());

  auto yes = theoremB_decide(s2, 3);
  CHECK(yes.verdict == V::yes_within_budget);
  CHECK_FALSE(yes.search.coverage.empty());
  CHECK(yes.bound.n_star == 3221225472);
  CHECK(std::string(verdict_name(yes.verdict)) == "YES-within-budget");

  auto z2 = theoremB_decide(fixtures::load("Z2"), 4);
  CHECK(z2.verdict == V::not_csd);
  CHECK(z2.gate.verdict == SdMeetCertificate::Verdict::no);
  CHECK(verify_no_certificate(fixtures::load("Z2"), z2.gate).empty());

  auto t = theoremB_decide(parse_algebra("algebra T\nsize 1\nop m 2\n0\n"), 2);
  CHECK(t.verdict == V::yes);

  CHECK_THROWS_AS(theoremB_decide(s2, 1), Error);
}

TEST_CASE("theoremB never answers an unqualified YES on a budget", "[residual]") {
  using V = TheoremBResult::Verdict;
  for (auto name : {"S2", "C3", "D3"}) {
    for (unsigned m = 2; m <= 4; ++m) {
      auto r = theoremB_decide(fixtures::load(name), m, {2, 2, 64});
      CHECK(r.verdict != V::yes);
      if (r.verdict == V::no) {
        CHECK(r.witness->algebra.size() >= m);
      }
    }
  }
}
