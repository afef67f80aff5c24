#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "unialg/baker.hpp"
#include "unialg/replay.hpp"

using namespace unialg;

namespace {
  UnorderedPair P(Element a, Element b) {
    return UnorderedPair::make(a, b);
  }

  // r with d(x,y,z) = (x if x = y else z) and thrd(x,y,z) = z appended;
  // {(d, thrd)} then satisfies the lemma hypotheses.
  FiniteAlgebra with_discriminator(FiniteAlgebra const& r) {
    auto                              sig    = r.signature();
    auto                              tables = r.tables();
    FiniteAlgebra::Table              d, t;
    std::size_t const                 n = r.size();
    for (Element x = 0; x < n; ++x) {
      for (Element y = 0; y < n; ++y) {
        for (Element z = 0; z < n; ++z) {
          d.push_back(x == y ? x : z);
          t.push_back(z);
        }
      }
    }
    sig.add({"d", 3});
    sig.add({"thrd", 3});
    tables.push_back(d);
    tables.push_back(t);
    return FiniteAlgebra(r.name() + "d", n, sig, tables);
  }

  // Minimal depth at which each pair is the image of src, by closing the
  // set of unary maps that are compositions of basic translations.
  std::map<UnorderedPair, std::size_t> depth_oracle(FiniteAlgebra const& a,
                                                    UnorderedPair        src) {
    std::size_t const              n = a.size();
    std::vector<oracle::Map>       basics;
    for (std::size_t op = 0; op < a.signature().size(); ++op) {
      auto k = a.signature()[op].arity;
      for (std::size_t pos = 0; pos < k; ++pos) {
        for_each_tuple(n, k - 1, [&](std::span<Element const> params) {
          oracle::Map f(n);
          for (Element x = 0; x < n; ++x) {
            std::vector<Element> args(params.begin(), params.end());
            args.insert(args.begin() + pos, x);
            f[x] = oracle::op_at(a, op, args);
          }
          basics.push_back(f);
        });
      }
    }
    std::map<UnorderedPair, std::size_t> out;
    std::set<oracle::Map>                seen;
    oracle::Map                          id(n);
    for (Element x = 0; x < n; ++x) {
      id[x] = x;
    }
    std::vector<oracle::Map> level{id};
    seen.insert(id);
    for (std::size_t depth = 0; !level.empty(); ++depth) {
      std::vector<oracle::Map> next;
      for (auto const& f : level) {
        if (f[src.lo] != f[src.hi]) {
          out.emplace(P(f[src.lo], f[src.hi]), depth);
        }
        for (auto const& b : basics) {
          oracle::Map g(n);
          for (Element x = 0; x < n; ++x) {
            g[x] = b[f[x]];
          }
          if (seen.insert(g).second) {
            next.push_back(g);
          }
        }
      }
      level = std::move(next);
    }
    return out;
  }

  void require_replays(FiniteAlgebra const& a, PairChain const& c) {
    INFO(replay::check_chain(a, c));
    REQUIRE(replay::check_chain(a, c).empty());
  }
}  // namespace

TEST_CASE("reach_min_depth examples", "[baker]") {
  auto s2 = reach_min_depth(fixtures::load("S2"), P(0, 1));
  CHECK(s2.saturation() == 0);
  CHECK(s2.entries() == std::vector<std::pair<UnorderedPair, std::size_t>>{{P(0, 1), 0}});

  auto d3 = fixtures::load("D3");
  auto r  = reach_min_depth(d3, P(0, 1));
  CHECK(r.depth(P(0, 1)) == 0u);
  CHECK(r.depth(P(0, 2)) == 1u);
  CHECK(r.depth(P(1, 2)) == 1u);
  // the witness is a real translation onto the pair
  auto w = r.witness(P(0, 2));
  CHECK(P(w(d3, 0), w(d3, 1)) == P(0, 2));
  CHECK(r.witness(P(0, 1)).depth() == 0);
}

TEST_CASE("reach_min_depth matches composition of basic translations", "[baker][oracle]") {
  std::mt19937 rng(2024);
  for (int i = 0; i < 120; ++i) {
    auto a = oracle::random_algebra(rng, 4, 2, 2);
    for (Element x = 0; x < a.size(); ++x) {
      for (Element y = x + 1; y < a.size(); ++y) {
        auto reach = reach_min_depth(a, P(x, y));
        auto ref   = depth_oracle(a, P(x, y));
        std::map<UnorderedPair, std::size_t> got;
        for (auto const& [p, d] : reach.entries()) {
          got.emplace(p, d);
          auto t = reach.witness(p);
          CHECK(t.depth() == d);
          CHECK(P(t(a, x), t(a, y)) == p);
        }
        REQUIRE(got == ref);
        std::size_t deepest = 0;
        for (auto const& [p, d] : got) {
          deepest = std::max(deepest, d);
        }
        CHECK(reach.saturation() == deepest);
      }
    }
  }
}

TEST_CASE("darrow examples", "[baker]") {
  auto d3x = fixtures::load("D3x");
  auto c   = darrow(d3x, P(0, 1), P(0, 2), 1, 2);
  REQUIRE(c);
  CHECK(c->target() == P(0, 2));
  CHECK(c->length() <= 2);
  CHECK(c->depth() <= 1);
  require_replays(d3x, *c);

  // src = dst: one identity step
  auto s2 = fixtures::load("S2");
  auto id = darrow(s2, P(0, 1), P(0, 1), 5, 1);
  REQUIRE(id);
  CHECK(id->length() == 1);
  CHECK(id->depth() == 0);
  require_replays(s2, *id);
  CHECK_FALSE(darrow(s2, P(0, 1), P(0, 1), 5, 0));

  // C3: {1,2} never reaches {0,1}
  auto c3 = fixtures::load("C3");
  CHECK_FALSE(darrow(c3, P(1, 2), P(0, 1), 100, 100));
  CHECK(darrow(c3, P(0, 2), P(0, 1), 1, 1));
}

TEST_CASE("darrow respects the length bound", "[baker]") {
  // 0 - 1 - 2 - 3 as a path: the unary f maps {0,1} to {1,2} to {2,3}
  auto a = parse_algebra("algebra P4\nsize 4\nop f 1\n1 2 3 3\n");
  auto reach = reach_min_depth(a, P(0, 1));
  CHECK(reach.depth(P(2, 3)) == 2u);
  auto c = darrow(reach, P(0, 3), 3, 3);
  REQUIRE(c);
  CHECK(c->length() == 3);
  require_replays(a, *c);
  CHECK_FALSE(darrow(reach, P(0, 3), 3, 2));
  CHECK_FALSE(darrow(reach, P(0, 3), 1, 3));
}

TEST_CASE("cg_equiv_check is consistent", "[baker]") {
  for (auto name : {"S2", "C3", "D3", "Z2", "S2x", "C3x", "D3x"}) {
    auto r = cg_equiv_check(fixtures::load(name));
    INFO(name);
    CHECK(r.discrepancies.empty());
    CHECK(r.checked > 0);
  }
  std::mt19937 rng(8);
  for (int i = 0; i < 100; ++i) {
    auto a = oracle::random_algebra(rng, 4, 2, 3);
    CHECK(cg_equiv_check(a).discrepancies.empty());
  }
}

TEST_CASE("constants", "[baker]") {
  auto c2 = constants(2);
  CHECK(c2.L == 3);
  CHECK(c2.M == 5);
  CHECK(c2.N == 30);
  CHECK(c2.d == 33);
  CHECK(c2.ell == 167);
  CHECK(c2.p == 18);
  CHECK(c2.two_6m == 4096);
  CHECK(c2.two_L == 8);
  CHECK(c2.d * c2.M + c2.L <= c2.two_6m);

  auto c3 = constants(3);
  CHECK(c3.L == 6);
  CHECK(c3.M == 19);
  CHECK(c3.N == 380);
  CHECK(c3.d == 383);
  CHECK(c3.ell == 7279);
  CHECK(c3.p == 30);
  CHECK(c3.d * c3.M + c3.L <= c3.two_6m);

  for (unsigned m = 2; m <= 12; ++m) {
    auto c = constants(m);
    CHECK(c.L == binomial(m + 1, 2));
    CHECK(c.M == binomial(2 * m, m) - 1);
    CHECK(c.N == 2 * binomial(static_cast<unsigned>(c.M) + 1, 2));
    CHECK(c.d == c.N + 3);
    CHECK(c.ell == c.d * c.M + 2);
    CHECK(c.p == m * m + 7 * m);
  }
  CHECK_THROWS_AS(constants(1), Error);
}

TEST_CASE("split_translation", "[baker]") {
  std::mt19937 rng(31);
  for (int i = 0; i < 200; ++i) {
    auto        a = oracle::random_algebra(rng, 4, 2, 3);
    Translation t;
    auto        len = rng() % 6;
    for (std::size_t s = 0; s < len; ++s) {
      auto const& sym = a.signature()[rng() % a.signature().size()];
      TranslationStep st{sym.name, rng() % sym.arity, {}};
      for (std::size_t p = 0; p + 1 < sym.arity; ++p) {
        st.params.push_back(Element(rng() % a.size()));
      }
      t.steps.push_back(st);
    }
    CHECK(replay::check_translation(a, t).empty());
    auto k       = rng() % (len + 1);
    auto [f, g]  = split_translation(t, k);
    CHECK(f.depth() == k);
    CHECK(g.depth() == len - k);
    CHECK(f.then(g) == t);
    for (Element x = 0; x < a.size(); ++x) {
      CHECK(g(a, f(a, x)) == t(a, x));
      CHECK(replay::apply(a, t, x) == t(a, x));
    }
    // a → u,v → c,d through the intermediate pair
    if (a.size() >= 2) {
      auto src = P(0, 1);
      auto u = f(a, 0), v = f(a, 1);
      if (u != v && t(a, 0) != t(a, 1)) {
        auto first  = single_link_chain(a, src, f, k);
        auto second = single_link_chain(a, P(u, v), g, len - k);
        auto both   = compose(a, first, second);
        require_replays(a, both);
        CHECK(both.target() == P(t(a, 0), t(a, 1)));
      }
    }
  }
}

TEST_CASE("compose is additive in depth and multiplicative in length", "[baker]") {
  std::mt19937 rng(77);
  int          composed = 0;
  for (int i = 0; i < 300; ++i) {
    auto a = oracle::random_algebra(rng, 4, 2, 2);
    if (a.size() < 3) {
      continue;
    }
    auto pick = [&] {
      Element x = rng() % a.size(), y = rng() % a.size();
      while (y == x) {
        y = rng() % a.size();
      }
      return P(x, y);
    };
    auto src = pick(), mid = pick(), dst = pick();
    auto first  = darrow(a, src, mid, 3, 3);
    auto second = darrow(a, mid, dst, 2, 3);
    if (!first || !second) {
      continue;
    }
    ++composed;
    auto c = compose(a, *first, *second);
    CHECK(c.source == src);
    CHECK(c.target() == dst);
    CHECK(c.depth_bound == 5);
    CHECK(c.length_bound == 9);
    CHECK(c.depth() <= first->depth() + second->depth());
    require_replays(a, c);
  }
  CHECK(composed > 20);
}

TEST_CASE("replay rejects forged chains", "[baker]") {
  auto d3x = fixtures::load("D3x");
  auto c   = *darrow(d3x, P(0, 1), P(1, 2), 1, 2);
  require_replays(d3x, c);
  auto bad = c;
  bad.nodes.back() = bad.nodes.back() == 2 ? 0 : 2;
  CHECK_FALSE(replay::check_chain(d3x, bad).empty());
  bad = c;
  bad.depth_bound = 0;
  CHECK_FALSE(replay::check_chain(d3x, bad).empty());
  bad = c;
  bad.links[0].translation.steps.push_back({"nope", 0, {0, 0}});
  CHECK_FALSE(replay::check_chain(d3x, bad).empty());
  bad = c;
  bad.length_bound = 0;
  CHECK_FALSE(replay::check_chain(d3x, bad).empty());
}

TEST_CASE("relax only loosens", "[baker]") {
  auto c = *darrow(fixtures::load("D3x"), P(0, 1), P(0, 2), 1, 2);
  CHECK(relax(c, 7, 9).depth_bound == 7);
  CHECK_THROWS_AS(relax(c, 0, 9), Error);
}

TEST_CASE("lemma hypotheses are enforced", "[baker]") {
  auto d3x = fixtures::load("D3x");
  CHECK_NOTHROW(check_lemma_hypotheses(d3x, fixtures::discriminator_symbols()));
  CHECK_THROWS_AS(check_lemma_hypotheses(d3x, {{"d", "d"}}), HypothesisFailure);
  CHECK_THROWS_AS(check_lemma_hypotheses(d3x, {{"d", "zz"}}), HypothesisFailure);
  CHECK_THROWS_AS(check_lemma_hypotheses(fixtures::load("S2x"), {{"m", "m"}}),
                  HypothesisFailure);
  CHECK_THROWS_AS(single_sequence(d3x, {{"d", "d"}}, {0, 2}), HypothesisFailure);
  CHECK_NOTHROW(check_lemma_hypotheses(fixtures::load("S2x"), fixtures::semilattice_symbols()));
}

TEST_CASE("single_sequence examples", "[baker]") {
  auto d3x = fixtures::load("D3x");
  auto fam = fixtures::discriminator_symbols();

  auto r = single_sequence(d3x, fam, {0, 2});
  CHECK(r.index == 0);
  CHECK(r.link_chain.source == P(0, 2));
  CHECK(r.end_chain.source == P(0, 2));

  for (std::vector<Element> seq : {std::vector<Element>{0, 2}, {0, 1, 2}, {2, 0, 1, 0}}) {
    auto s = single_sequence(d3x, fam, seq);
    REQUIRE(s.index + 1 < seq.size());
    CHECK(s.link_chain.source == P(seq[s.index], seq[s.index + 1]));
    CHECK(s.end_chain.source == P(seq.front(), seq.back()));
    CHECK(s.link_chain.target() == s.target);
    CHECK(s.end_chain.target() == s.target);
    CHECK(s.link_chain.depth_bound == 1);
    CHECK(s.link_chain.length_bound == 2);
    CHECK(s.end_chain.depth_bound == 1);
    CHECK(s.end_chain.length_bound == 2);
    require_replays(d3x, s.link_chain);
    require_replays(d3x, s.end_chain);
  }

  auto s2x = fixtures::load("S2x");
  auto q   = single_sequence(s2x, fixtures::semilattice_symbols(), {0, 1});
  CHECK(q.index == 0);
  CHECK(q.target == P(0, 1));
  require_replays(s2x, q.link_chain);
  require_replays(s2x, q.end_chain);

  CHECK_THROWS_AS(single_sequence(d3x, fam, {1, 0, 1}), Error);
}

TEST_CASE("multi_sequence examples", "[baker]") {
  auto d3x = fixtures::load("D3x");
  auto fam = fixtures::discriminator_symbols();

  auto one = multi_sequence(d3x, fam, {{0, 1, 2}});
  auto ref = single_sequence(d3x, fam, {0, 1, 2});
  CHECK(one.N == 1);
  CHECK(one.target == ref.target);
  REQUIRE(one.keys.size() == 1);
  CHECK(one.keys[0].index == ref.index);
  CHECK(one.end_chain.depth_bound == 1);
  CHECK(one.end_chain.length_bound == 2);

  std::vector<std::vector<Element>> seqs{{0, 1, 2}, {0, 2}};
  auto r = multi_sequence(d3x, fam, seqs);
  CHECK(r.N == 2);
  REQUIRE(r.keys.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    auto const& k = r.keys[i];
    REQUIRE(k.index + 1 < seqs[i].size());
    CHECK(k.link == P(seqs[i][k.index], seqs[i][k.index + 1]));
    CHECK(k.chain.source == k.link);
    CHECK(k.chain.target() == r.target);
    CHECK(k.chain.depth_bound == 2);
    CHECK(k.chain.length_bound == 4);
    require_replays(d3x, k.chain);
  }
  CHECK(r.end_chain.source == P(0, 2));
  CHECK(r.end_chain.target() == r.target);
  require_replays(d3x, r.end_chain);

  auto s2x = fixtures::load("S2x");
  auto q   = multi_sequence(s2x, fixtures::semilattice_symbols(), {{0, 1}, {0, 1}});
  REQUIRE(q.keys.size() == 2);
  CHECK(q.keys[0].link == P(0, 1));
  CHECK(q.keys[1].link == P(0, 1));

  CHECK_THROWS_AS(multi_sequence(d3x, fam, {{0, 1}, {0, 2}}), Error);
  CHECK_THROWS_AS(multi_sequence(d3x, fam, {}), Error);
}

TEST_CASE("sequence lemmas on random discriminator expansions", "[baker]") {
  std::mt19937 rng(555);
  for (int i = 0; i < 40; ++i) {
    auto base = oracle::random_algebra(rng, 4, 1, 2);
    if (base.size() < 2) {
      continue;
    }
    auto        a   = with_discriminator(base);
    auto        fam = fixtures::discriminator_symbols();
    Element     x   = 0;
    Element     y   = Element(1 + rng() % (a.size() - 1));
    std::size_t N   = 1 + rng() % 3;
    std::vector<std::vector<Element>> seqs;
    for (std::size_t s = 0; s < N; ++s) {
      std::vector<Element> seq{x};
      auto                 len = rng() % 4;
      for (std::size_t j = 0; j < len; ++j) {
        seq.push_back(Element(rng() % a.size()));
      }
      seq.push_back(y);
      seqs.push_back(seq);
    }
    auto r = multi_sequence(a, fam, seqs);
    BigInt two_N = BigInt(1) << N;
    for (std::size_t s = 0; s < N; ++s) {
      auto const& k = r.keys[s];
      CHECK(k.link == P(seqs[s][k.index], seqs[s][k.index + 1]));
      CHECK(k.chain.depth_bound == N);
      CHECK(k.chain.length_bound == two_N);
      require_replays(a, k.chain);
    }
    require_replays(a, r.end_chain);
    CHECK(r.end_chain.source == P(x, y));
  }
}

TEST_CASE("corollary33 examples", "[baker]") {
  auto d3x = fixtures::load("D3x");
  auto fam = fixtures::discriminator_symbols();

  auto r = corollary33(d3x, fam, {P(0, 1), P(1, 2)}, P(0, 2), 1);
  CHECK(r.N == 2);
  REQUIRE(r.items.size() == 2);
  for (auto const& it : r.items) {
    CHECK(it.step.source == it.pair);
    CHECK(it.step.target() == it.reached);
    CHECK(it.step.depth_bound == 1);
    CHECK(it.combined.source == it.pair);
    CHECK(it.combined.target() == r.target);
    CHECK(it.combined.depth_bound == 3);
    CHECK(it.combined.length_bound == 4);
    require_replays(d3x, it.step);
    require_replays(d3x, it.key_chain);
    require_replays(d3x, it.combined);
  }
  CHECK(r.from_uv.source == P(0, 2));
  require_replays(d3x, r.from_uv);

  auto one = corollary33(d3x, fam, {P(0, 2)}, P(0, 2), 1);
  REQUIRE(one.items.size() == 1);
  CHECK(one.items[0].combined.depth_bound == 2);
  CHECK(one.items[0].combined.length_bound == 2);
  require_replays(d3x, one.items[0].combined);

  CHECK_THROWS_AS(UnorderedPair::make(1, 1), Error);
  auto c3x = fixtures::load("C3x");
  CHECK_THROWS_AS(corollary33(c3x, fixtures::semilattice_symbols(), {P(1, 2)}, P(0, 1), 3),
                  Error);
}

TEST_CASE("phi_m examples", "[baker]") {
  auto s2x = std::get<PhiResult>(phi_m(fixtures::load("S2x"), 2));
  CHECK_FALSE(s2x.witness);
  auto c3x = std::get<PhiResult>(phi_m(fixtures::load("C3x"), 2));
  CHECK_FALSE(c3x.witness);

  auto d3x = fixtures::load("D3x");
  auto r   = std::get<PhiResult>(phi_m(d3x, 2));
  CHECK(r.saturated);
  CHECK(r.depth_bound == 4096);
  CHECK(r.length_bound == 8);
  REQUIRE(r.witness);
  CHECK(r.witness->xs == std::vector<Element>{0, 1, 2});
  CHECK(r.witness->chains.size() == 3);
  for (auto const& c : r.witness->chains) {
    CHECK(c.target() == r.witness->yz);
    require_replays(d3x, c);
  }
  CHECK(exceeded(phi_m(d3x, 2, 2)));
}

TEST_CASE("phi_m agrees with a direct search over darrow", "[baker]") {
  std::mt19937 rng(13);
  for (int i = 0; i < 40; ++i) {
    auto a = oracle::random_algebra(rng, 4, 2, 2);
    auto r = std::get<PhiResult>(phi_m(a, 2));
    bool any = false;
    for_each_tuple(a.size(), 3, [&](std::span<Element const> xs) {
      if (!(xs[0] < xs[1] && xs[1] < xs[2])) {
        return;
      }
      for (Element y = 0; y < a.size(); ++y) {
        for (Element z = y + 1; z < a.size(); ++z) {
          bool all = true;
          for (int p = 0; p < 3 && all; ++p) {
            for (int q = p + 1; q < 3 && all; ++q) {
              all = darrow(a, P(xs[p], xs[q]), P(y, z), 4096, 8).has_value();
            }
          }
          any = any || all;
        }
      }
    });
    CHECK(r.witness.has_value() == any);
  }
}

TEST_CASE("mu examples", "[baker]") {
  auto s2x = fixtures::load("S2x");
  auto w   = mu(s2x, 2, P(0, 1), P(0, 1));
  REQUIRE(w);
  CHECK(w->uv == P(0, 1));
  require_replays(s2x, w->first);

  CHECK_FALSE(mu(fixtures::load("C3x"), 2, P(0, 1), P(1, 2)));

  auto d3x = fixtures::load("D3x");
  for (auto a : {P(0, 1), P(0, 2), P(1, 2)}) {
    for (auto b : {P(0, 1), P(0, 2), P(1, 2)}) {
      auto v = mu(d3x, 2, a, b);
      REQUIRE(v);
      CHECK(v->first.source == a);
      CHECK(v->second.source == b);
      CHECK(v->first.depth_bound == 167);
      CHECK(v->first.length_bound == 4);
      require_replays(d3x, v->first);
      require_replays(d3x, v->second);
    }
  }
}

TEST_CASE("dichotomy", "[baker]") {
  auto s2x = std::get<DichotomyReport>(dichotomy_check(fixtures::load("S2x"), 2));
  CHECK_FALSE(s2x.phi_holds);
  CHECK(s2x.quadruples == 16);
  CHECK(s2x.mismatches.empty());

  auto c3x = std::get<DichotomyReport>(dichotomy_check(fixtures::load("C3x"), 2));
  CHECK_FALSE(c3x.phi_holds);
  CHECK(c3x.quadruples == 81);
  CHECK(c3x.mismatches.empty());
  CHECK(c3x.related < 81);
  CHECK_FALSE(meet_relation_M(fixtures::load("C3x"), 0, 1, 1, 2));

  auto d3x = std::get<DichotomyReport>(dichotomy_check(fixtures::load("D3x"), 2));
  CHECK(d3x.phi_holds);
  REQUIRE(d3x.phi);
}

TEST_CASE("phi_m on SI algebras larger than m", "[baker]") {
  // a subdirectly irreducible algebra with more than m elements satisfies Φ_m
  auto d3x = fixtures::load("D3x");
  REQUIRE(monolith(d3x).subdirectly_irreducible);
  CHECK(std::get<PhiResult>(phi_m(d3x, 2)).witness);
}
