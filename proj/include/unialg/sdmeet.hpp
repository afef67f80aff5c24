#ifndef UNIALG_SDMEET_HPP_
#define UNIALG_SDMEET_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "unialg/algebra.hpp"
#include "unialg/congruence.hpp"
#include "unialg/free_algebra.hpp"
#include "unialg/partition.hpp"
#include "unialg/term.hpp"

namespace unialg {

  enum class Colour { b, g };

  inline char colour_char(Colour c) {
    return c == Colour::b ? 'b' : 'g';
  }

  inline Colour opposite(Colour c) {
    return c == Colour::b ? Colour::g : Colour::b;
  }

  // A finite rooted tree with ordered children and a two-colouring in
  // which every child has the colour opposite to its parent.
  class ColouredTree {
   public:
    static constexpr std::size_t none = SIZE_MAX;

    ColouredTree() = default;

    // Appends a node; `parent` must already exist (or be `none` for the
    // root). The new node becomes the last child of its parent.
    std::size_t add(std::size_t parent, Colour colour) {
      std::size_t id = _parent.size();
      if (parent == none) {
        if (_root != none) {
          throw Error("tree already has a root");
        }
        _root = id;
      } else if (parent >= id) {
        throw Error("parent " + std::to_string(parent) + " does not exist");
      } else if (_colour[parent] == colour) {
        throw Error("node " + std::to_string(id)
                    + " has the same colour as its parent");
      }
      _parent.push_back(parent);
      _colour.push_back(colour);
      _children.emplace_back();
      if (parent != none) {
        _children[parent].push_back(id);
      }
      return id;
    }

    std::size_t size() const noexcept {
      return _parent.size();
    }
    std::size_t root() const {
      if (_root == none) {
        throw Error("empty tree");
      }
      return _root;
    }
    std::size_t parent(std::size_t p) const {
      return _parent.at(p);
    }
    Colour colour(std::size_t p) const {
      return _colour.at(p);
    }
    std::vector<std::size_t> const& children(std::size_t p) const {
      return _children.at(p);
    }
    bool is_leaf(std::size_t p) const {
      return _children.at(p).empty();
    }

    std::vector<std::size_t> preorder() const {
      std::vector<std::size_t> out;
      std::vector<std::size_t> stack{root()};
      while (!stack.empty()) {
        auto p = stack.back();
        stack.pop_back();
        out.push_back(p);
        for (auto it = _children[p].rbegin(); it != _children[p].rend(); ++it) {
          stack.push_back(*it);
        }
      }
      return out;
    }

    std::size_t height() const {
      std::vector<std::size_t> h(size(), 0);
      auto                     order = preorder();
      for (auto it = order.rbegin(); it != order.rend(); ++it) {
        for (auto c : _children[*it]) {
          h[*it] = std::max(h[*it], h[c] + 1);
        }
      }
      return h[root()];
    }

    bool operator==(ColouredTree const&) const = default;

   private:
    std::vector<std::size_t>              _parent;
    std::vector<Colour>                   _colour;
    std::vector<std::vector<std::size_t>> _children;
    std::size_t                           _root = none;
  };

  struct TermPair {
    Term s;
    Term t;

    bool operator==(TermPair const&) const = default;
  };

  // s_p, t_p indexed by tree node.
  using TermPairFamily = std::vector<TermPair>;

  namespace detail {
    inline Term const& xx(std::size_t i) {
      static Term const v[3] = {Term::var(0), Term::var(1), Term::var(2)};
      return v[i];
    }
    // t(x,x,y), t(x,y,y), t(x,y,x) as binary terms.
    inline Term at_xxy(Term const& t) {
      return substitute(t, {xx(0), xx(0), xx(1)});
    }
    inline Term at_xyy(Term const& t) {
      return substitute(t, {xx(0), xx(1), xx(1)});
    }
    inline Term at_xyx(Term const& t) {
      return substitute(t, {xx(0), xx(1), xx(0)});
    }

    inline void require_ternary(Term const& t) {
      if (t.variable_bound() > 3) {
        throw Error("term " + t.to_string() + " is not ternary");
      }
    }
  }  // namespace detail

  // One equation demanded by the tree condition, tagged with the clause
  // (1..10) that produced it.
  struct C2TEquation {
    int         clause;
    std::size_t node;
    std::size_t other;  // the related node, or ColouredTree::none
    Identity    identity;
    std::string text;
  };

  // All equations of the tree condition for (T, family), clause by clause,
  // nodes in preorder.
  inline std::vector<C2TEquation> c2t_equations(ColouredTree const&   tree,
                                                TermPairFamily const& fam) {
    if (fam.size() != tree.size()) {
      throw Error("family has " + std::to_string(fam.size())
                  + " term pairs but the tree has " + std::to_string(tree.size())
                  + " nodes");
    }
    for (auto const& [s, t] : fam) {
      detail::require_ternary(s);
      detail::require_ternary(t);
    }
    using detail::at_xxy;
    using detail::at_xyx;
    using detail::at_xyy;
    auto const               none  = ColouredTree::none;
    auto const               order = tree.preorder();
    std::size_t const        root  = tree.root();
    std::vector<C2TEquation> out;
    auto name = [](char st, std::size_t p, char const* args) {
      return std::string(1, st) + "_" + std::to_string(p) + "(" + args + ")";
    };
    auto add = [&](int c, std::size_t p, std::size_t q, Term l, Term r,
                   std::string text) {
      out.push_back({c, p, q, Identity(std::move(l), std::move(r), 2),
                     std::move(text)});
    };

    out.push_back({1, root, none, Identity(fam[root].s, detail::xx(0), 3),
                   name('s', root, "x,y,z") + " = x"});
    out.push_back({1, root, none, Identity(fam[root].t, detail::xx(2), 3),
                   name('t', root, "x,y,z") + " = z"});
    for (auto p : order) {
      add(2, p, none, at_xyx(fam[p].s), at_xyx(fam[p].t),
          name('s', p, "x,y,x") + " = " + name('t', p, "x,y,x"));
    }
    // Clauses 3..6: first and last children.
    for (int c = 3; c <= 6; ++c) {
      Colour want  = (c == 3 || c == 5) ? Colour::b : Colour::g;
      bool   first = (c == 3 || c == 4);
      bool   sside = first;
      for (auto p : order) {
        if (tree.colour(p) != want || tree.is_leaf(p)) {
          continue;
        }
        auto r = first ? tree.children(p).front() : tree.children(p).back();
        auto const& tp = sside ? fam[p].s : fam[p].t;
        auto const& tr = sside ? fam[r].s : fam[r].t;
        char const* args = want == Colour::b ? "x,x,y" : "x,y,y";
        auto        sub  = want == Colour::b ? at_xxy : at_xyy;
        add(c, p, r, sub(tp), sub(tr),
            name(sside ? 's' : 't', p, args) + " = "
                + name(sside ? 's' : 't', r, args));
      }
    }
    // Clauses 7, 8: consecutive children.
    for (int c = 7; c <= 8; ++c) {
      Colour want = c == 7 ? Colour::b : Colour::g;
      for (auto p : order) {
        if (tree.colour(p) != want) {
          continue;
        }
        auto const& ch   = tree.children(p);
        char const* args = want == Colour::b ? "x,x,y" : "x,y,y";
        auto        sub  = want == Colour::b ? at_xxy : at_xyy;
        for (std::size_t i = 0; i + 1 < ch.size(); ++i) {
          add(c, ch[i], ch[i + 1], sub(fam[ch[i]].t), sub(fam[ch[i + 1]].s),
              name('t', ch[i], args) + " = " + name('s', ch[i + 1], args));
        }
      }
    }
    // Clauses 9, 10: leaves.
    for (int c = 9; c <= 10; ++c) {
      Colour want = c == 9 ? Colour::b : Colour::g;
      for (auto p : order) {
        if (tree.colour(p) != want || !tree.is_leaf(p)) {
          continue;
        }
        char const* args = want == Colour::b ? "x,x,y" : "x,y,y";
        auto        sub  = want == Colour::b ? at_xxy : at_xyy;
        add(c, p, none, sub(fam[p].s), sub(fam[p].t),
            name('s', p, args) + " = " + name('t', p, args));
      }
    }
    return out;
  }

  struct C2TVerdict {
    std::vector<C2TEquation>   equations;
    std::optional<std::size_t> failed;  // index into equations
    std::vector<Element>       assignment;

    bool holds() const noexcept {
      return !failed.has_value();
    }
  };

  // Checks every equation of the tree condition in A.
  inline C2TVerdict verify_c2t(FiniteAlgebra const&  a,
                               ColouredTree const&   tree,
                               TermPairFamily const& fam) {
    C2TVerdict v{c2t_equations(tree, fam), std::nullopt, {}};
    for (std::size_t i = 0; i < v.equations.size(); ++i) {
      if (auto bad = check_identity(a, v.equations[i].identity)) {
        v.failed     = i;
        v.assignment = std::move(*bad);
        break;
      }
    }
    return v;
  }

  struct Condition6Verdict {
    // First pair whose identity s(x,y,x) = t(x,y,x) fails, with assignment.
    std::optional<std::size_t>               failed_identity;
    std::vector<Element>                     assignment;
    // Else a pair a != b satisfying every biconditional.
    std::optional<std::pair<Element, Element>> witness;

    bool holds() const noexcept {
      return !failed_identity && !witness;
    }
  };

  // For all a, b: a = b iff, for every p, s_p(a,a,b) = t_p(a,a,b) <->
  // s_p(a,b,b) = t_p(a,b,b); plus the identities s_p(x,y,x) = t_p(x,y,x).
  // Checked in A only.
  inline Condition6Verdict check_condition6(FiniteAlgebra const&         a,
                                            std::vector<TermPair> const& fam) {
    Condition6Verdict v;
    std::vector<std::pair<CompiledTerm, CompiledTerm>> ops;
    for (std::size_t p = 0; p < fam.size(); ++p) {
      detail::require_ternary(fam[p].s);
      detail::require_ternary(fam[p].t);
      Identity e(detail::at_xyx(fam[p].s), detail::at_xyx(fam[p].t), 2);
      if (auto bad = check_identity(a, e)) {
        v.failed_identity = p;
        v.assignment      = std::move(*bad);
        return v;
      }
      ops.emplace_back(CompiledTerm(a, fam[p].s), CompiledTerm(a, fam[p].t));
    }
    for (Element x = 0; x < a.size(); ++x) {
      for (Element y = 0; y < a.size(); ++y) {
        if (x == y) {
          continue;
        }
        bool all = true;
        for (auto const& [s, t] : ops) {
          std::array<Element, 3> xxy{x, x, y}, xyy{x, y, y};
          bool                   e1 = s(xxy) == t(xxy);
          bool                   e2 = s(xyy) == t(xyy);
          if (e1 != e2) {
            all = false;
            break;
          }
        }
        if (all) {
          v.witness = std::pair{x, y};
          return v;
        }
      }
    }
    return v;
  }

  // For every sequence a_0..a_n (1 <= n <= max_steps) with a_0 != a_n some
  // link has Cg(a_0,a_n) ∩ Cg(a_i,a_{i+1}) nonzero. Returns the first
  // failing sequence.
  inline std::optional<std::vector<Element>>
  check_condition7(FiniteAlgebra const& a, std::size_t max_steps) {
    PrincipalCongruences cg(a);
    for (std::size_t n = 1; n <= max_steps; ++n) {
      std::optional<std::vector<Element>> bad;
      for_each_tuple(a.size(), n + 1, [&](std::span<Element const> seq) {
        if (bad || seq.front() == seq.back()) {
          return;
        }
        for (std::size_t i = 0; i < n; ++i) {
          if (meet_relation_M(cg, seq.front(), seq.back(), seq[i], seq[i + 1])) {
            return;
          }
        }
        bad.emplace(seq.begin(), seq.end());
      });
      if (bad) {
        return bad;
      }
    }
    return std::nullopt;
  }

  struct SdMeetCertificate {
    enum class Verdict { yes, no, resource_exceeded };

    Verdict     verdict = Verdict::resource_exceeded;
    std::string note;

    // yes
    ColouredTree             tree;
    TermPairFamily           family;
    std::vector<C2TEquation> equations;

    // no: congruences of F(x,y,z), whose elements are named by free_terms
    std::vector<Term> free_terms;
    Partition         alpha, beta_omega, gamma_omega;
    Element           x = 0, z = 0;
  };

  inline char const* verdict_name(SdMeetCertificate::Verdict v) {
    switch (v) {
      case SdMeetCertificate::Verdict::yes:
        return "yes";
      case SdMeetCertificate::Verdict::no:
        return "no";
      default:
        return "resource-exceeded";
    }
  }

  namespace detail {
    struct Extractor {
      Partition const&        alpha;
      BetaOmegaResult const&  bo;
      std::vector<Term> const& names;
      ColouredTree            tree;
      TermPairFamily          family;

      // (s,t) lies in alpha and in beta_j (colour b) or gamma_j (colour g).
      void build(Element s, Element t, Colour c, std::size_t parent) {
        auto level = c == Colour::b ? bo.beta_level(s, t) : bo.gamma_level(s, t);
        if (!level) {
          throw Error("extraction: pair not in the limit congruence");
        }
        std::size_t node = tree.add(parent, c);
        family.push_back({names[s], names[t]});
        if (*level == 0) {
          return;
        }
        auto const& same  = c == Colour::b ? bo.betas[0] : bo.gammas[0];
        auto const& other = c == Colour::b ? bo.gammas[*level - 1]
                                           : bo.betas[*level - 1];
        Partition delta = alpha.meet(other);
        // A shortest chain alternates; its delta-steps become the children,
        // and the same-side steps around them are the clause 3/5/7 links.
        for (auto const& step : join_chain(same, delta, s, t)) {
          if (step.label == 1) {
            build(step.from, step.to, opposite(c), node);
          }
        }
      }
    };
  }  // namespace detail

  // Decides whether HSP(A) is congruence meet-semidistributive, by testing
  // (x,z) ∈ beta_omega in F(x,y,z) for alpha = Cg(x,z), beta = Cg(x,y),
  // gamma = Cg(y,z).
  inline SdMeetCertificate decide_sd_meet(FiniteAlgebra const& a,
                                          std::size_t cap = default_free_cap) {
    SdMeetCertificate cert;
    auto              built = build_free(a, 3, cap);
    if (auto e = std::get_if<CapExceeded>(&built)) {
      cert.note = e->what;
      return cert;
    }
    auto const& fr = std::get<FreeAlgebra>(built);
    auto        fa = fr.as_algebra();
    if (auto e = std::get_if<CapExceeded>(&fa)) {
      cert.note = e->what;
      return cert;
    }
    auto const& f = std::get<FiniteAlgebra>(fa);
    Element     x = static_cast<Element>(fr.generator_indices[0]);
    Element     y = static_cast<Element>(fr.generator_indices[1]);
    Element     z = static_cast<Element>(fr.generator_indices[2]);
    Partition   alpha = principal_congruence(f, x, z);
    Partition   beta  = principal_congruence(f, x, y);
    Partition   gamma = principal_congruence(f, y, z);
    auto        bo    = beta_omega(alpha, beta, gamma);

    if (!bo.beta_omega.related(x, z)) {
      cert.verdict     = SdMeetCertificate::Verdict::no;
      cert.free_terms  = fr.representative;
      cert.alpha       = std::move(alpha);
      cert.beta_omega  = bo.beta_omega;
      cert.gamma_omega = bo.gamma_omega;
      cert.x           = x;
      cert.z           = z;
      return cert;
    }

    detail::Extractor ex{alpha, bo, fr.representative, {}, {}};
    ex.build(x, z, Colour::b, ColouredTree::none);
    // The root names x and z; with |A| = 1 these coincide in F.
    ex.family[ex.tree.root()] = {Term::var(0), Term::var(2)};
    auto v = verify_c2t(a, ex.tree, ex.family);
    if (!v.holds()) {
      throw Error("internal: extracted family fails "
                  + v.equations[*v.failed].text);
    }
    cert.verdict   = SdMeetCertificate::Verdict::yes;
    cert.tree      = std::move(ex.tree);
    cert.family    = std::move(ex.family);
    cert.equations = std::move(v.equations);
    return cert;
  }

  // Re-derives F(x,y,z) and checks a no-certificate: the named elements are
  // F's elements in order, alpha = Cg(x,z), beta_omega ⊇ Cg(x,y), gamma_omega
  // ⊇ Cg(y,z) are congruences with alpha ∩ beta_omega = alpha ∩ gamma_omega,
  // and (x,z) ∈ alpha ∩ (beta_omega ∨ gamma_omega) but not in beta_omega.
  // Empty string on success.
  inline std::string verify_no_certificate(FiniteAlgebra const&     a,
                                           SdMeetCertificate const& c,
                                           std::size_t cap = default_free_cap) {
    auto built = build_free(a, 3, cap);
    if (std::holds_alternative<CapExceeded>(built)) {
      return "free algebra exceeds cap";
    }
    auto const& fr = std::get<FreeAlgebra>(built);
    if (c.free_terms.size() != fr.size()) {
      return "certificate lists " + std::to_string(c.free_terms.size())
             + " elements, F has " + std::to_string(fr.size());
    }
    for (std::size_t i = 0; i < fr.size(); ++i) {
      if (fr.element_of(c.free_terms[i]) != i) {
        return "element " + std::to_string(i) + " is misnamed";
      }
    }
    auto const f  = std::get<FiniteAlgebra>(fr.as_algebra());
    Element    gx = static_cast<Element>(fr.generator_indices[0]);
    Element    gy = static_cast<Element>(fr.generator_indices[1]);
    Element    gz = static_cast<Element>(fr.generator_indices[2]);
    if (c.x != gx || c.z != gz) {
      return "pair is not (x,z)";
    }
    for (auto const* p : {&c.alpha, &c.beta_omega, &c.gamma_omega}) {
      if (p->universe_size() != f.size() || !is_congruence(f, *p)) {
        return "partition " + p->to_string() + " is not a congruence of F";
      }
    }
    if (c.alpha != principal_congruence(f, gx, gz)) {
      return "alpha is not Cg(x,z)";
    }
    if (!principal_congruence(f, gx, gy).leq(c.beta_omega)
        || !principal_congruence(f, gy, gz).leq(c.gamma_omega)) {
      return "beta_omega or gamma_omega does not extend Cg(x,y), Cg(y,z)";
    }
    if (c.alpha.meet(c.beta_omega) != c.alpha.meet(c.gamma_omega)) {
      return "alpha ∩ beta_omega differs from alpha ∩ gamma_omega";
    }
    if (!c.alpha.related(gx, gz)
        || !c.beta_omega.join(c.gamma_omega).related(gx, gz)) {
      return "(x,z) not in alpha ∩ (beta_omega ∨ gamma_omega)";
    }
    if (c.beta_omega.related(gx, gz)) {
      return "(x,z) lies in beta_omega";
    }
    return {};
  }

  struct NamedTerm {
    std::string name;
    Term        term;
  };

  // A with one ternary fundamental operation appended per entry, whose
  // table is the term operation. An entry that is literally name(x0,x1,x2)
  // for an existing ternary symbol is already fundamental and is skipped.
  inline FiniteAlgebra expand_algebra(FiniteAlgebra const&          a,
                                      std::vector<NamedTerm> const& extra,
                                      std::string const&            name = "") {
    Signature                         sig    = a.signature();
    std::vector<FiniteAlgebra::Table> tables = a.tables();
    for (auto const& [sym, t] : extra) {
      detail::require_ternary(t);
      if (auto i = sig.find(sym)) {
        bool literal = !t.is_var() && t.symbol() == sym && sig[*i].arity == 3
                       && t.args().size() == 3;
        for (std::size_t j = 0; literal && j < 3; ++j) {
          literal = t.args()[j].is_var() && t.args()[j].var_index() == j;
        }
        if (!literal) {
          throw Error("symbol '" + sym + "' already exists");
        }
        continue;
      }
      CompiledTerm         f(a, t);
      FiniteAlgebra::Table tab;
      for_each_tuple(a.size(), 3, [&](std::span<Element const> xs) {
        tab.push_back(f(xs));
      });
      sig.add({sym, 3});
      tables.push_back(std::move(tab));
    }
    return FiniteAlgebra(name.empty() ? a.name() + "x" : name,
                         a.size(),
                         std::move(sig),
                         std::move(tables));
  }

  // Names s<p>, t<p> for every node except a root carrying the projection
  // pair (x, z), which needs no symbols.
  inline std::vector<NamedTerm> family_symbols(ColouredTree const&   tree,
                                               TermPairFamily const& fam) {
    std::vector<NamedTerm> out;
    for (auto p : tree.preorder()) {
      if (p == tree.root() && fam[p].s == Term::var(0)
          && fam[p].t == Term::var(2)) {
        continue;
      }
      out.push_back({"s" + std::to_string(p), fam[p].s});
      out.push_back({"t" + std::to_string(p), fam[p].t});
    }
    return out;
  }

}  // namespace unialg

#endif  // UNIALG_SDMEET_HPP_
