#ifndef UNIALG_TOOLS_CLI_HPP_
#define UNIALG_TOOLS_CLI_HPP_

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "report.hpp"
#include "unialg/alg_io.hpp"
#include "unialg/baker.hpp"
#include "unialg/certificate.hpp"
#include "unialg/congruence.hpp"
#include "unialg/free_algebra.hpp"
#include "unialg/replay.hpp"
#include "unialg/residual.hpp"
#include "unialg/sdmeet.hpp"

namespace unialg::cli {

  using json = nlohmann::json;

  // Exit codes.
  inline constexpr int definite   = 0;
  inline constexpr int usage      = 1;
  inline constexpr int indefinite = 2;

  struct Outcome {
    int         code = definite;
    json        report;
    std::string text;
  };

  inline std::vector<Element> parse_list(std::string const& s) {
    std::vector<Element> out;
    std::stringstream    in(s);
    std::string          item;
    while (std::getline(in, item, ',')) {
      try {
        std::size_t used = 0;
        auto        v    = std::stoul(item, &used);
        if (used != item.size()) {
          throw std::invalid_argument(item);
        }
        out.push_back(static_cast<Element>(v));
      } catch (std::exception const&) {
        throw Error("bad element list '" + s + "'");
      }
    }
    if (out.empty()) {
      throw Error("empty element list");
    }
    return out;
  }

  inline UnorderedPair parse_pair(std::string const& s) {
    auto v = parse_list(s);
    if (v.size() != 2) {
      throw Error("expected a pair a,b, got '" + s + "'");
    }
    return UnorderedPair::make(v[0], v[1]);
  }

  // "s1:t1,s2:t2"
  inline std::vector<FundamentalPair> parse_family(std::string const& s) {
    std::vector<FundamentalPair> out;
    std::stringstream            in(s);
    std::string                  item;
    while (std::getline(in, item, ',')) {
      auto colon = item.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == item.size()) {
        throw Error("family entries are s:t, got '" + item + "'");
      }
      out.push_back({item.substr(0, colon), item.substr(colon + 1)});
    }
    if (out.empty()) {
      throw Error("empty family");
    }
    return out;
  }

  inline BigInt parse_bound(std::string const& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
      throw Error("bound must be a nonnegative integer, got '" + s + "'");
    }
    return BigInt(s);
  }

  inline std::string translation_text(Translation const& t) {
    if (t.steps.empty()) {
      return "id";
    }
    std::string out;
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
      auto const& st = t.steps[i];
      out += (i ? " ; " : "") + st.symbol + "(";
      std::size_t q = 0;
      for (std::size_t j = 0; j <= st.params.size(); ++j) {
        out += j ? "," : "";
        out += j == st.position ? std::string("_") : std::to_string(st.params[q++]);
      }
      out += ")";
    }
    return out;
  }

  inline std::string chain_text(PairChain const& c, std::string const& indent = "") {
    std::ostringstream o;
    o << indent << "{" << c.source.lo << "," << c.source.hi << "} => {"
      << c.target().lo << "," << c.target().hi << "}: depth " << c.depth()
      << " <= " << c.depth_bound << ", length " << c.length() << " <= "
      << c.length_bound << '\n';
    for (std::size_t i = 0; i < c.links.size(); ++i) {
      o << indent << "  " << c.nodes[i] << " - " << c.nodes[i + 1] << ": "
        << (c.links[i].equal ? "equal" : translation_text(c.links[i].translation))
        << '\n';
    }
    return o.str();
  }

  inline std::string read_file(std::string const& path) {
    std::ifstream in(path);
    if (!in) {
      throw Error("cannot read '" + path + "'");
    }
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  inline void write_file(std::string const& path, std::string const& text) {
    std::ofstream out(path);
    if (!out) {
      throw Error("cannot write '" + path + "'");
    }
    out << text;
  }

  template <typename T>
  T const* capped(Capped<T> const& c, Outcome& o) {
    if (auto e = std::get_if<CapExceeded>(&c)) {
      o.code             = indefinite;
      o.report["status"] = "resource-exceeded";
      o.report["note"]   = e->what;
      o.text += "resource exceeded: " + e->what + "\n";
      return nullptr;
    }
    return &std::get<T>(c);
  }

  struct Options {
    std::string              file, file2, cert, out_path;
    std::vector<Element>     elems;
    unsigned                 m         = 2;
    std::size_t              cap       = 0;
    std::size_t              n         = 3;
    std::string              k_bound, n_bound;
    std::size_t              power     = SiSearchBudget{}.max_power;
    std::size_t              gens      = SiSearchBudget{}.max_gens;
    std::size_t              max_size  = SiSearchBudget{}.max_size;
    std::string              family, target;
    std::vector<std::string> seqs, pairs;
    bool                     json_out = false;
  };

  inline Outcome alg_validate(Options const& op) {
    auto    a = load_algebra(op.file);
    Outcome o;
    json    ops = json::array();
    std::string sig;
    for (auto const& s : a.signature()) {
      ops.push_back({{"symbol", s.name}, {"arity", s.arity}});
      sig += " " + s.name + "/" + std::to_string(s.arity);
    }
    o.report = {{"valid", true}, {"name", a.name()}, {"size", a.size()}, {"operations", ops}};
    o.text   = "valid: " + a.name() + ", size " + std::to_string(a.size())
             + ", operations" + sig + "\n";
    return o;
  }

  inline Outcome alg_print(Options const& op) {
    auto    a = load_algebra(op.file);
    Outcome o;
    o.text   = serialize_algebra(a);
    o.report = {{"algebra", o.text}};
    return o;
  }

  inline Outcome con_principal(Options const& op) {
    auto a = load_algebra(op.file);
    if (op.elems.size() != 2 || op.elems[0] >= a.size() || op.elems[1] >= a.size()) {
      throw Error("need two elements of the algebra");
    }
    auto    p = principal_congruence(a, op.elems[0], op.elems[1]);
    Outcome o;
    o.report = {{"pair", op.elems}, {"congruence", p.to_string()}};
    o.text   = "Cg(" + std::to_string(op.elems[0]) + "," + std::to_string(op.elems[1])
             + ") = " + p.to_string() + "\n";
    return o;
  }

  inline Outcome con_all(Options const& op) {
    auto    a = load_algebra(op.file);
    Outcome o;
    auto    lat = all_congruences(a, op.cap ? op.cap : default_congruence_cap);
    auto    l   = capped(lat, o);
    if (!l) {
      return o;
    }
    json list = json::array();
    for (auto const& c : l->congruences()) {
      list.push_back(c.to_string());
      o.text += c.to_string() + "\n";
    }
    o.report = {{"count", l->size()}, {"congruences", list}};
    o.text   = std::to_string(l->size()) + " congruences\n" + o.text;
    return o;
  }

  inline Outcome con_si(Options const& op) {
    auto    a = load_algebra(op.file);
    auto    r = monolith(a);
    Outcome o;
    o.report = {{"subdirectly_irreducible", r.subdirectly_irreducible},
                {"monolith", r.monolith.to_string()},
                {"trivial", r.trivial}};
    o.text = std::string(r.subdirectly_irreducible ? "SI" : "not SI")
             + (r.subdirectly_irreducible ? ", monolith " + r.monolith.to_string() : "")
             + "\n";
    return o;
  }

  inline Outcome con_fsi(Options const& op) {
    auto    a = load_algebra(op.file);
    bool    f = is_fsi(a);
    Outcome o;
    o.report = {{"finitely_subdirectly_irreducible", f}};
    o.text   = f ? "FSI\n" : "not FSI\n";
    return o;
  }

  inline Outcome con_law(Options const& op) {
    auto    a = load_algebra(op.file);
    Outcome o;
    auto    lat = all_congruences(a, op.cap ? op.cap : default_congruence_cap);
    auto    l   = capped(lat, o);
    if (!l) {
      return o;
    }
    auto bad = sd_meet_law(*l);
    o.report = {{"holds", !bad.has_value()}};
    if (bad) {
      json triple = json::array();
      for (auto i : *bad) {
        triple.push_back((*l)[i].to_string());
      }
      o.report["violation"] = triple;
      o.text = "SD-meet law fails at x = " + triple[0].get<std::string>()
               + ", y = " + triple[1].get<std::string>() + ", z = "
               + triple[2].get<std::string>() + "\n";
    } else {
      o.text = "SD-meet law holds in Con A\n";
    }
    return o;
  }

  inline Outcome free_build(Options const& op) {
    auto    a = load_algebra(op.file);
    Outcome o;
    auto    f  = build_free(a, op.n, op.cap ? op.cap : default_free_cap);
    auto    fr = capped(f, o);
    if (!fr) {
      return o;
    }
    json terms = json::array();
    for (auto const& t : fr->representative) {
      terms.push_back(t.to_string());
    }
    o.report = {{"generators", op.n}, {"size", fr->size()}, {"elements", terms}};
    o.text   = "F(" + std::to_string(op.n) + ") has " + std::to_string(fr->size())
             + " elements\n";
    for (std::size_t i = 0; i < terms.size(); ++i) {
      o.text += "  " + std::to_string(i) + " " + terms[i].get<std::string>() + "\n";
    }
    return o;
  }

  inline Outcome free_spectrum_cmd(Options const& op) {
    auto    a = load_algebra(op.file);
    Outcome o;
    json    sizes = json::array();
    for (std::size_t i = 1; i <= op.n; ++i) {
      auto s  = free_spectrum(a, i, op.cap ? op.cap : default_free_cap);
      auto sz = capped(s, o);
      if (!sz) {
        o.report["spectrum"] = sizes;
        return o;
      }
      sizes.push_back(*sz);
      o.text += "f(" + std::to_string(i) + ") = " + std::to_string(*sz) + "\n";
    }
    o.report = {{"spectrum", sizes}};
    return o;
  }

  inline Outcome member(Options const& op) {
    auto    b = load_algebra(op.file);
    auto    a = load_algebra(op.file2);
    Outcome o;
    auto    v  = hsp_member(b, a, op.cap ? op.cap : default_free_cap);
    auto    mv = capped(v, o);
    if (!mv) {
      return o;
    }
    o.report = {{"member", mv->member}, {"generators", mv->generators}};
    o.text   = b.name() + (mv->member ? " is" : " is not") + " in HSP(" + a.name() + ")\n";
    if (mv->witness) {
      auto bad = check_identity(with_signature(b, a.signature()), *mv->witness);
      o.report["identity"]   = mv->witness->to_string();
      o.report["fails_at"]   = *bad;
      o.text += "identity " + mv->witness->to_string() + " holds in " + a.name()
                + " and fails in " + b.name() + "\n";
    }
    return o;
  }

  inline Outcome sdmeet_decide(Options const& op) {
    auto    a = load_algebra(op.file);
    auto    c = decide_sd_meet(a, op.cap ? op.cap : default_free_cap);
    Outcome o;
    o.report = report::certificate_json(c);
    o.text   = certificate_text(c);
    if (c.verdict == SdMeetCertificate::Verdict::resource_exceeded) {
      o.code = indefinite;
    }
    if (!op.out_path.empty()) {
      write_file(op.out_path, certificate_text(c));
    }
    return o;
  }

  inline SdMeetCertificate load_certificate(std::string const& path) {
    return read_certificate(read_file(path));
  }

  inline Outcome sdmeet_verify(Options const& op) {
    auto    a = load_algebra(op.file);
    auto    c = load_certificate(op.cert);
    Outcome o;
    switch (c.verdict) {
      case SdMeetCertificate::Verdict::yes: {
        auto v   = verify_c2t(a, c.tree, c.family);
        o.report = {{"verdict", "yes"}, {"valid", v.holds()}, {"equations", v.equations.size()}};
        if (v.holds()) {
          o.text = "valid: all " + std::to_string(v.equations.size()) + " equations hold\n";
        } else {
          auto const& e         = v.equations[*v.failed];
          o.report["failed"]    = e.text;
          o.report["clause"]    = e.clause;
          o.report["assignment"] = v.assignment;
          o.text = "invalid: clause " + std::to_string(e.clause) + " " + e.text + " fails\n";
        }
        break;
      }
      case SdMeetCertificate::Verdict::no: {
        auto why = verify_no_certificate(a, c, op.cap ? op.cap : default_free_cap);
        o.report = {{"verdict", "no"}, {"valid", why.empty()}};
        if (!why.empty()) {
          o.report["problem"] = why;
        }
        o.text = why.empty() ? "valid: the triple violates the SD-meet law\n"
                             : "invalid: " + why + "\n";
        break;
      }
      default:
        o.code   = indefinite;
        o.report = {{"verdict", "resource-exceeded"}};
        o.text   = "certificate carries no verdict to verify\n";
    }
    return o;
  }

  inline Outcome sdmeet_cond6(Options const& op) {
    auto a = load_algebra(op.file);
    auto c = load_certificate(op.cert);
    if (c.verdict != SdMeetCertificate::Verdict::yes) {
      throw Error("condition 6 needs a yes certificate");
    }
    auto    v = check_condition6(a, {c.family.begin(), c.family.end()});
    Outcome o;
    o.report = {{"holds", v.holds()}};
    if (v.failed_identity) {
      o.report["failed_pair"] = *v.failed_identity;
      o.text = "fails: s(x,y,x) = t(x,y,x) for pair " + std::to_string(*v.failed_identity) + "\n";
    } else if (v.witness) {
      o.report["witness"] = json::array({v.witness->first, v.witness->second});
      o.text = "fails: " + std::to_string(v.witness->first) + " and "
               + std::to_string(v.witness->second) + " are not separated\n";
    } else {
      o.text = "condition 6 holds\n";
    }
    return o;
  }

  inline Outcome sdmeet_expand(Options const& op) {
    auto a = load_algebra(op.file);
    auto c = load_certificate(op.cert);
    if (c.verdict != SdMeetCertificate::Verdict::yes) {
      throw Error("expansion needs a yes certificate");
    }
    auto    x = expand_algebra(a, family_symbols(c.tree, c.family));
    Outcome o;
    o.text   = serialize_algebra(x);
    o.report = {{"algebra", o.text}};
    if (!op.out_path.empty()) {
      write_file(op.out_path, o.text);
    }
    return o;
  }

  inline Outcome baker_constants(Options const& op) {
    auto    k = constants(op.m);
    Outcome o;
    o.report = {{"m", op.m},     {"L", k.L.str()},   {"M", k.M.str()},
                {"N", k.N.str()}, {"d", k.d.str()},   {"ell", k.ell.str()},
                {"p", k.p.str()}, {"two_6m", k.two_6m.str()}, {"two_L", k.two_L.str()}};
    o.text = "m=" + std::to_string(op.m) + " L=" + k.L.str() + " M=" + k.M.str()
             + " N=" + k.N.str() + " d=" + k.d.str() + " ell=" + k.ell.str()
             + " p=" + k.p.str() + "\n";
    return o;
  }

  inline Outcome baker_reach(Options const& op) {
    auto a = load_algebra(op.file);
    if (op.elems.size() != 2) {
      throw Error("need a pair");
    }
    ReachMap r(a, UnorderedPair::make(op.elems[0], op.elems[1]));
    Outcome  o;
    json     list = json::array();
    o.text = "saturation depth " + std::to_string(r.saturation()) + "\n";
    for (auto const& [p, d] : r.entries()) {
      list.push_back({{"pair", report::pair_json(p)},
                      {"depth", d},
                      {"translation", report::translation_json(r.witness(p))}});
      o.text += "  {" + std::to_string(p.lo) + "," + std::to_string(p.hi) + "} depth "
                + std::to_string(d) + ": " + translation_text(r.witness(p)) + "\n";
    }
    o.report = {{"saturation", r.saturation()}, {"reached", list}};
    return o;
  }

  inline Outcome baker_chain(Options const& op) {
    auto a = load_algebra(op.file);
    if (op.elems.size() != 4) {
      throw Error("need a source pair and a target pair");
    }
    auto    src = UnorderedPair::make(op.elems[0], op.elems[1]);
    auto    dst = UnorderedPair::make(op.elems[2], op.elems[3]);
    auto    ch  = darrow(a, src, dst, parse_bound(op.k_bound), parse_bound(op.n_bound));
    Outcome o;
    o.report = {{"holds", ch.has_value()}};
    if (ch) {
      o.report["chain"] = report::chain_json(*ch);
      o.text            = chain_text(*ch);
    } else {
      o.text = "no chain\n";
    }
    return o;
  }

  inline Outcome baker_single(Options const& op) {
    auto a = load_algebra(op.file);
    if (op.seqs.size() != 1) {
      throw Error("single takes exactly one --seq");
    }
    auto    r = single_sequence(a, parse_family(op.family), parse_list(op.seqs[0]));
    Outcome o;
    o.report = {{"index", r.index},
                {"family_index", r.family_index},
                {"mirrored", r.mirrored},
                {"target", report::pair_json(r.target)},
                {"link_chain", report::chain_json(r.link_chain)},
                {"end_chain", report::chain_json(r.end_chain)}};
    o.text = "link " + std::to_string(r.index) + ", pair "
             + std::to_string(r.family_index) + "\n" + chain_text(r.link_chain)
             + chain_text(r.end_chain);
    return o;
  }

  inline Outcome baker_multi(Options const& op) {
    auto                              a = load_algebra(op.file);
    std::vector<std::vector<Element>> seqs;
    for (auto const& s : op.seqs) {
      seqs.push_back(parse_list(s));
    }
    auto    r = multi_sequence(a, parse_family(op.family), seqs);
    Outcome o;
    json    keys = json::array();
    o.text       = "target {" + std::to_string(r.target.lo) + ","
             + std::to_string(r.target.hi) + "}\n";
    for (std::size_t i = 0; i < r.keys.size(); ++i) {
      auto const& k = r.keys[i];
      keys.push_back({{"index", k.index},
                      {"link", report::pair_json(k.link)},
                      {"chain", report::chain_json(k.chain)}});
      o.text += "S" + std::to_string(i + 1) + " key link "
                + std::to_string(k.index) + "\n" + chain_text(k.chain, "  ");
    }
    o.text += "ends\n" + chain_text(r.end_chain, "  ");
    o.report = {{"N", r.N},
                {"target", report::pair_json(r.target)},
                {"keys", keys},
                {"end_chain", report::chain_json(r.end_chain)}};
    return o;
  }

  inline Outcome baker_cor33(Options const& op) {
    auto                       a = load_algebra(op.file);
    std::vector<UnorderedPair> pairs;
    for (auto const& s : op.pairs) {
      pairs.push_back(parse_pair(s));
    }
    auto r = corollary33(a, parse_family(op.family), pairs, parse_pair(op.target), op.n);
    Outcome o;
    json    items = json::array();
    o.text        = "target {" + std::to_string(r.target.lo) + ","
             + std::to_string(r.target.hi) + "}\n";
    for (auto const& it : r.items) {
      items.push_back({{"pair", report::pair_json(it.pair)},
                       {"reached", report::pair_json(it.reached)},
                       {"chain", report::chain_json(it.combined)}});
      o.text += chain_text(it.combined);
    }
    o.report = {{"n", r.n},
                {"N", r.N},
                {"target", report::pair_json(r.target)},
                {"items", items},
                {"from_uv", report::chain_json(r.from_uv)}};
    return o;
  }

  inline json phi_witness_json(PhiWitness const& w) {
    json chains = json::array();
    for (auto const& c : w.chains) {
      chains.push_back(report::chain_json(c));
    }
    return {{"xs", w.xs}, {"yz", report::pair_json(w.yz)}, {"chains", chains}};
  }

  inline std::string phi_witness_text(PhiWitness const& w) {
    std::string t = "witness x =";
    for (auto x : w.xs) {
      t += " " + std::to_string(x);
    }
    t += ", {y,z} = {" + std::to_string(w.yz.lo) + "," + std::to_string(w.yz.hi) + "}\n";
    for (auto const& c : w.chains) {
      t += chain_text(c, "  ");
    }
    return t;
  }

  inline Outcome baker_phi(Options const& op) {
    auto    a = load_algebra(op.file);
    Outcome o;
    auto    res = phi_m(a, op.m, op.cap ? op.cap : default_phi_cap);
    auto    r   = capped(res, o);
    if (!r) {
      return o;
    }
    o.report = {{"m", op.m},
                {"holds", r->witness.has_value()},
                {"saturated", r->saturated},
                {"depth_bound", r->depth_bound.str()},
                {"length_bound", r->length_bound.str()}};
    if (r->witness) {
      o.report["witness"] = phi_witness_json(*r->witness);
      o.text = "Phi_" + std::to_string(op.m) + " holds\n" + phi_witness_text(*r->witness);
    } else {
      o.text = "Phi_" + std::to_string(op.m) + " fails\n";
    }
    return o;
  }

  inline Outcome baker_mu(Options const& op) {
    auto a = load_algebra(op.file);
    if (op.elems.size() != 4) {
      throw Error("need two pairs");
    }
    auto    w = mu(a, op.m, UnorderedPair::make(op.elems[0], op.elems[1]),
                   UnorderedPair::make(op.elems[2], op.elems[3]));
    Outcome o;
    o.report = {{"holds", w.has_value()}};
    if (w) {
      o.report["uv"]     = report::pair_json(w->uv);
      o.report["first"]  = report::chain_json(w->first);
      o.report["second"] = report::chain_json(w->second);
      o.text = "mu holds via {" + std::to_string(w->uv.lo) + "," + std::to_string(w->uv.hi)
               + "}\n" + chain_text(w->first, "  ") + chain_text(w->second, "  ");
    } else {
      o.text = "mu fails\n";
    }
    return o;
  }

  inline Outcome baker_dichotomy(Options const& op) {
    auto    a = load_algebra(op.file);
    Outcome o;
    auto    res = dichotomy_check(a, op.m, op.cap ? op.cap : default_phi_cap);
    auto    r   = capped(res, o);
    if (!r) {
      return o;
    }
    o.report = {{"phi_holds", r->phi_holds},
                {"quadruples", r->quadruples},
                {"related", r->related},
                {"mismatches", r->mismatches}};
    if (r->phi_holds) {
      o.report["phi_witness"] = phi_witness_json(*r->phi);
      o.text = "Phi_" + std::to_string(op.m) + " holds; the mu branch is vacuous\n";
    } else {
      o.text = "Phi_" + std::to_string(op.m) + " fails; " + std::to_string(r->quadruples)
               + " quadruples, " + std::to_string(r->mismatches.size())
               + " where M and mu disagree\n";
    }
    return o;
  }

  inline Outcome residual_bound(Options const& op) {
    auto    a = load_algebra(op.file);
    auto    b = theorem51_bound(a, op.m);
    Outcome o;
    o.report = report::tower_json(b);
    o.text   = "n* = " + b.n_star.str() + ", cap " + b.expression + " (" + b.as_written
             + ")\n";
    if (b.k > 1) {
      o.text += "log2 log2 cap " + std::string(b.log2log2_exact ? "= " : ">= ")
                + b.log2log2_lo.str() + "\n";
    }
    o.text += "witness count " + b.witness_count.str() + (b.inequality_holds ? " <= " : " > ")
              + b.n_star.str() + "\n";
    return o;
  }

  inline SiSearchBudget budget_of(Options const& op) {
    return {op.power, op.gens, op.max_size};
  }

  inline std::string found_text(SiSearchReport const& r) {
    std::string t;
    for (auto const& f : r.found) {
      t += "SI of size " + std::to_string(f.algebra.size()) + " from A^"
           + std::to_string(f.power) + "\n" + serialize_algebra(f.algebra);
    }
    return t;
  }

  inline Outcome residual_search(Options const& op) {
    auto    a = load_algebra(op.file);
    auto    r = si_search(a, op.m, budget_of(op));
    Outcome o;
    o.report = report::si_search_json(r);
    o.text   = std::to_string(r.found.size()) + " SI algebras of size >= "
             + std::to_string(op.m) + "\n" + found_text(r) + "coverage: " + r.coverage + "\n";
    return o;
  }

  inline Outcome residual_decide(Options const& op) {
    auto    a = load_algebra(op.file);
    auto    r = theoremB_decide(a, op.m, budget_of(op), op.cap ? op.cap : default_free_cap);
    Outcome o;
    using V  = TheoremBResult::Verdict;
    o.code   = r.verdict == V::not_csd || r.verdict == V::no || r.verdict == V::yes
                   ? definite
                   : indefinite;
    o.report = {{"verdict", verdict_name(r.verdict)},
                {"m", op.m},
                {"note", r.note},
                {"tower_bound", report::tower_json(r.bound)},
                {"gate", report::certificate_json(r.gate)}};
    o.text = std::string(verdict_name(r.verdict)) + ": " + r.note + "\n";
    if (r.verdict != V::not_csd && r.gate.verdict == SdMeetCertificate::Verdict::yes) {
      o.report["search"] = report::si_search_json(r.search);
    }
    if (r.verdict == V::not_csd) {
      o.text += certificate_text(r.gate);
    }
    if (r.witness) {
      o.report["witness"] = report::si_found_json(*r.witness);
      o.text += serialize_algebra(r.witness->algebra);
    }
    if (r.verdict == V::yes_within_budget || r.verdict == V::unknown) {
      o.text += "coverage: " + r.search.coverage + "\n";
    }
    o.text += "tower bound " + r.bound.expression + " (" + r.bound.as_written + ")\n";
    return o;
  }

  // Parses and runs one command. Reports go to `out`, diagnostics to `err`.
  inline int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Finite algebras: congruences, SD-meet decisions, translation chains, "
                 "residual bounds"};
    app.require_subcommand(1);
    Options                  op;
    std::function<Outcome()> action;
    std::string              command;

    app.add_flag("--json", op.json_out, "print one JSON document");

    auto leaf = [&](CLI::App* parent, std::string const& name, std::string const& help,
                    Outcome (*fn)(Options const&)) {
      auto* sub = parent->add_subcommand(name, help);
      sub->callback([&, fn, sub] {
        command = sub->get_parent()->get_name() == "" ? sub->get_name()
                  : sub->get_parent()->get_name() + " " + sub->get_name();
        action = [fn, &op] { return fn(op); };
      });
      sub->add_flag("--json", op.json_out, "print one JSON document");
      return sub;
    };
    auto file = [&](CLI::App* s) {
      s->add_option("file", op.file, "algebra (.alg)")->required();
    };
    auto with_cap = [&](CLI::App* s) {
      s->add_option("--cap", op.cap, "size cap for the underlying search");
    };
    auto with_m = [&](CLI::App* s) {
      s->add_option("-m", op.m, "m >= 2")->check(CLI::Range(2u, 64u));
    };

    auto* alg = app.add_subcommand("alg", "read and print algebras");
    alg->require_subcommand(1);
    file(leaf(alg, "validate", "check an .alg file", alg_validate));
    file(leaf(alg, "print", "print in canonical form", alg_print));

    auto* con = app.add_subcommand("con", "congruences");
    con->require_subcommand(1);
    {
      auto* s = leaf(con, "principal", "Cg(a,b)", con_principal);
      file(s);
      s->add_option("elements", op.elems, "a b")->expected(2)->required();
      s = leaf(con, "all", "Con A", con_all);
      file(s);
      with_cap(s);
      file(leaf(con, "si", "subdirect irreducibility and monolith", con_si));
      file(leaf(con, "fsi", "finite subdirect irreducibility", con_fsi));
      s = leaf(con, "law", "SD-meet law in Con A", con_law);
      file(s);
      with_cap(s);
    }

    auto* fr = app.add_subcommand("free", "free algebras of HSP(A)");
    fr->require_subcommand(1);
    for (auto [name, fn] : {std::pair{"build", free_build}, std::pair{"spectrum", free_spectrum_cmd}}) {
      auto* s = leaf(fr, name, name == std::string("build") ? "F(n)" : "f(1..n)", fn);
      file(s);
      with_cap(s);
      s->add_option("-n", op.n, "generators")->check(CLI::Range(1u, 8u));
    }

    {
      auto* s = leaf(&app, "member", "is B in HSP(A)?", member);
      s->add_option("B", op.file, "candidate algebra")->required();
      s->add_option("A", op.file2, "generating algebra")->required();
      with_cap(s);
    }

    auto* sd = app.add_subcommand("sdmeet", "congruence meet-semidistributivity");
    sd->require_subcommand(1);
    {
      auto* s = leaf(sd, "decide", "decide SD-meet for HSP(A)", sdmeet_decide);
      file(s);
      with_cap(s);
      s->add_option("-o", op.out_path, "also write the certificate here");
      s = leaf(sd, "verify-terms", "check a certificate", sdmeet_verify);
      file(s);
      s->add_option("certificate", op.cert)->required();
      with_cap(s);
      s = leaf(sd, "cond6", "condition 6 for a certificate's family", sdmeet_cond6);
      file(s);
      s->add_option("certificate", op.cert)->required();
      s = leaf(sd, "expand", "add the family as fundamental symbols", sdmeet_expand);
      file(s);
      s->add_option("certificate", op.cert)->required();
      s->add_option("-o", op.out_path, "also write the algebra here");
    }

    auto* bk = app.add_subcommand("baker", "translation chains");
    bk->require_subcommand(1);
    {
      auto* s = leaf(bk, "constants", "L, M, N, d, ell for m", baker_constants);
      with_m(s);
      s = leaf(bk, "reach", "least depths from a pair", baker_reach);
      file(s);
      s->add_option("pair", op.elems, "a b")->expected(2)->required();
      s = leaf(bk, "chain", "{a,b} =>_{k,n} {c,d}", baker_chain);
      file(s);
      s->add_option("pairs", op.elems, "a b c d")->expected(4)->required();
      s->add_option("-k", op.k_bound, "depth bound")->required();
      s->add_option("-n", op.n_bound, "length bound")->required();
      for (auto [name, fn] : {std::pair{"single", baker_single}, std::pair{"multi", baker_multi}}) {
        s = leaf(bk, name, "sequence lemma", fn);
        file(s);
        s->add_option("--family", op.family, "s1:t1,s2:t2,...")->required();
        s->add_option("--seq", op.seqs, "a,...,b (repeatable)")->required();
      }
      s = leaf(bk, "cor33", "pairs reaching a common pair", baker_cor33);
      file(s);
      s->add_option("--family", op.family, "s1:t1,...")->required();
      s->add_option("--pair", op.pairs, "a,b (repeatable)")->required();
      s->add_option("--target", op.target, "u,v")->required();
      s->add_option("-n", op.n, "depth")->required();
      s = leaf(bk, "phi", "evaluate Phi_m", baker_phi);
      file(s);
      with_m(s);
      with_cap(s);
      s = leaf(bk, "mu", "evaluate mu", baker_mu);
      file(s);
      with_m(s);
      s->add_option("pairs", op.elems, "a b c d")->expected(4)->required();
      s = leaf(bk, "dichotomy", "Phi_m, or M iff mu", baker_dichotomy);
      file(s);
      with_m(s);
      with_cap(s);
    }

    auto* rs = app.add_subcommand("residual", "residual bounds");
    rs->require_subcommand(1);
    {
      auto* s = leaf(rs, "bound", "the tower bound", residual_bound);
      file(s);
      with_m(s);
      for (auto [name, fn] :
           {std::pair{"search", residual_search}, std::pair{"decide", residual_decide}}) {
        s = leaf(rs, name, name == std::string("search") ? "search for SI members"
                                                         : "SD-meet and residually < m?",
                 fn);
        file(s);
        with_m(s);
        with_cap(s);
        s->add_option("--power", op.power, "largest power j")->check(CLI::Range(1u, 6u));
        s->add_option("--gens", op.gens, "most generators")->check(CLI::Range(1u, 6u));
        s->add_option("--max-size", op.max_size, "largest subalgebra")
            ->check(CLI::Range(1u, 4096u));
      }
    }

    std::vector<std::string> argv_store{"unialg"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_store) {
      argv.push_back(s.data());
    }
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (CLI::CallForHelp const& e) {
      return app.exit(e, out, err);
    } catch (CLI::CallForAllHelp const& e) {
      return app.exit(e, out, err);
    } catch (CLI::ParseError const& e) {
      app.exit(e, out, err);
      return usage;
    }
    if (!action) {
      err << "no command given\n";
      return usage;
    }
    try {
      Outcome o = action();
      if (op.json_out) {
        o.report["command"] = command;
        o.report["exit"]    = o.code;
        out << o.report.dump(2) << '\n';
      } else {
        out << o.text;
      }
      return o.code;
    } catch (Error const& e) {
      err << "error: " << e.what() << '\n';
      return usage;
    }
  }

}  // namespace unialg::cli

#endif  // UNIALG_TOOLS_CLI_HPP_
