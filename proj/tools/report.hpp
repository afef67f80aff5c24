#ifndef UNIALG_TOOLS_REPORT_HPP_
#define UNIALG_TOOLS_REPORT_HPP_

#include <string>
#include <vector>

#include <json.hpp>

#include "unialg/alg_io.hpp"
#include "unialg/baker.hpp"
#include "unialg/certificate.hpp"
#include "unialg/residual.hpp"

// JSON views of the library types. Big integers are decimal strings.
namespace unialg::report {

  using json = nlohmann::json;

  inline json pair_json(UnorderedPair p) {
    return json::array({p.lo, p.hi});
  }

  inline UnorderedPair pair_from_json(json const& j) {
    return UnorderedPair::make(j.at(0).get<Element>(), j.at(1).get<Element>());
  }

  inline json translation_json(Translation const& t) {
    json steps = json::array();
    for (auto const& s : t.steps) {
      steps.push_back(json::array({s.symbol, s.position, s.params}));
    }
    return steps;
  }

  inline Translation translation_from_json(json const& j) {
    Translation t;
    for (auto const& s : j) {
      t.steps.push_back({s.at(0).get<std::string>(),
                         s.at(1).get<std::size_t>(),
                         s.at(2).get<std::vector<Element>>()});
    }
    return t;
  }

  inline json chain_json(PairChain const& c) {
    json links = json::array();
    for (auto const& l : c.links) {
      links.push_back({{"equal", l.equal}, {"steps", translation_json(l.translation)}});
    }
    return {{"source", pair_json(c.source)},
            {"nodes", c.nodes},
            {"links", links},
            {"depth_bound", c.depth_bound.str()},
            {"length_bound", c.length_bound.str()}};
  }

  inline PairChain chain_from_json(json const& j) {
    PairChain c;
    c.source = pair_from_json(j.at("source"));
    c.nodes  = j.at("nodes").get<std::vector<Element>>();
    for (auto const& l : j.at("links")) {
      c.links.push_back({l.at("equal").get<bool>(),
                         translation_from_json(l.at("steps"))});
    }
    c.depth_bound  = BigInt(j.at("depth_bound").get<std::string>());
    c.length_bound = BigInt(j.at("length_bound").get<std::string>());
    return c;
  }

  inline json certificate_json(SdMeetCertificate const& c) {
    json j{{"verdict", verdict_name(c.verdict)}, {"certificate", certificate_text(c)}};
    if (c.verdict == SdMeetCertificate::Verdict::yes) {
      j["nodes"]     = c.tree.size();
      j["equations"] = c.equations.size();
    }
    if (!c.note.empty()) {
      j["note"] = c.note;
    }
    return j;
  }

  inline json tower_json(TowerBound const& b) {
    json j{{"k", b.k},
           {"m", b.m},
           {"M_prime", b.arity_bound},
           {"p", b.p.str()},
           {"n_star", b.n_star.str()},
           {"expression", b.expression},
           {"interpretation", b.as_written},
           {"witness_count", b.witness_count.str()},
           {"inequality_holds", b.inequality_holds},
           {"log2", b.log2}};
    if (b.exact) {
      j["exact"] = b.exact->str();
    }
    if (b.k > 1) {
      j["log2log2"] = b.log2log2_exact
                          ? json(b.log2log2_lo.str())
                          : json::array({b.log2log2_lo.str(), b.log2log2_hi.str()});
    }
    return j;
  }

  inline json si_found_json(SiFound const& f) {
    return {{"size", f.algebra.size()},
            {"power", f.power},
            {"generators", f.generators},
            {"omitted", json::array({f.omitted.first, f.omitted.second})},
            {"algebra", serialize_algebra(f.algebra)}};
  }

  inline json si_search_json(SiSearchReport const& r) {
    json found = json::array();
    for (auto const& f : r.found) {
      found.push_back(si_found_json(f));
    }
    return {{"found", found},
            {"budget_completed", r.budget_completed},
            {"exhausted", r.exhausted},
            {"coverage", r.coverage}};
  }

}  // namespace unialg::report

#endif  // UNIALG_TOOLS_REPORT_HPP_
