#ifndef UNIALG_CERTIFICATE_HPP_
#define UNIALG_CERTIFICATE_HPP_

#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "unialg/error.hpp"
#include "unialg/partition.hpp"
#include "unialg/sdmeet.hpp"
#include "unialg/term.hpp"

namespace unialg {

  // Text form:
  //
  //   verdict yes
  //   node <id> parent <id|-> colour <b|g> s <term> t <term>
  //   ...
  //
  //   verdict no
  //   element <i> <term>          (one per element of F(x,y,z))
  //   pair <x> <z>
  //   alpha [[...]]
  //   beta_omega [[...]]
  //   gamma_omega [[...]]
  //
  //   verdict resource-exceeded
  //   note <text>
  //
  // Children are ordered by line order. Lines starting with '#' are
  // comments.

  inline void write_certificate(std::ostream& out, SdMeetCertificate const& c) {
    out << "verdict " << verdict_name(c.verdict) << '\n';
    switch (c.verdict) {
      case SdMeetCertificate::Verdict::yes:
        for (auto p : c.tree.preorder()) {
          out << "node " << p << " parent ";
          if (p == c.tree.root()) {
            out << '-';
          } else {
            out << c.tree.parent(p);
          }
          out << " colour " << colour_char(c.tree.colour(p)) << " s "
              << c.family[p].s.to_string() << " t "
              << c.family[p].t.to_string() << '\n';
        }
        break;
      case SdMeetCertificate::Verdict::no:
        for (std::size_t i = 0; i < c.free_terms.size(); ++i) {
          out << "element " << i << ' ' << c.free_terms[i].to_string() << '\n';
        }
        out << "pair " << c.x << ' ' << c.z << '\n';
        out << "alpha " << c.alpha.to_string() << '\n';
        out << "beta_omega " << c.beta_omega.to_string() << '\n';
        out << "gamma_omega " << c.gamma_omega.to_string() << '\n';
        break;
      default:
        out << "note " << c.note << '\n';
    }
  }

  inline std::string certificate_text(SdMeetCertificate const& c) {
    std::ostringstream out;
    write_certificate(out, c);
    return out.str();
  }

  namespace detail {
    struct NodeLine {
      std::size_t id;
      std::size_t parent;  // ColouredTree::none for the root
      Colour      colour;
      TermPair    terms;
      std::size_t line;
    };

    inline std::string_view next_word(std::string_view& s) {
      while (!s.empty() && s.front() == ' ') {
        s.remove_prefix(1);
      }
      auto end = s.find(' ');
      auto w   = s.substr(0, end);
      s.remove_prefix(end == std::string_view::npos ? s.size() : end);
      return w;
    }

    inline std::size_t to_index(std::string_view w, std::size_t line) {
      std::size_t v = 0;
      if (w.empty()) {
        throw ParseError(line, "expected a number");
      }
      for (char c : w) {
        if (c < '0' || c > '9') {
          throw ParseError(line, "expected a number, got '" + std::string(w) + "'");
        }
        v = v * 10 + std::size_t(c - '0');
      }
      return v;
    }

    inline void expect(std::string_view& s, std::string_view word,
                       std::size_t line) {
      if (next_word(s) != word) {
        throw ParseError(line, "expected '" + std::string(word) + "'");
      }
    }

    // Rebuilds the tree with children in line order.
    inline void assemble_tree(std::vector<NodeLine> const& nodes,
                              SdMeetCertificate&           c) {
      std::map<std::size_t, std::size_t> pos;
      std::size_t                        root = ColouredTree::none;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!pos.emplace(nodes[i].id, i).second) {
          throw ParseError(nodes[i].line,
                           "duplicate node " + std::to_string(nodes[i].id));
        }
        if (nodes[i].parent == ColouredTree::none) {
          if (root != ColouredTree::none) {
            throw ParseError(nodes[i].line, "second root");
          }
          root = i;
        }
      }
      if (root == ColouredTree::none) {
        throw Error("certificate tree has no root");
      }
      std::vector<std::vector<std::size_t>> kids(nodes.size());
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].parent != ColouredTree::none) {
          auto it = pos.find(nodes[i].parent);
          if (it == pos.end()) {
            throw ParseError(nodes[i].line, "unknown parent");
          }
          kids[it->second].push_back(i);
        }
      }
      // Insert in preorder, so a file written by write_certificate reads
      // back with the same node ids.
      std::vector<std::size_t> new_id(nodes.size(), ColouredTree::none);
      std::vector<std::size_t> order;
      ColouredTree             tree;
      auto visit = [&](auto& self, std::size_t i, std::size_t parent) -> void {
        new_id[i] = tree.add(parent, nodes[i].colour);
        order.push_back(i);
        for (auto ch : kids[i]) {
          self(self, ch, new_id[i]);
        }
      };
      visit(visit, root, ColouredTree::none);
      if (order.size() != nodes.size()) {
        throw Error("certificate tree is not connected");
      }
      TermPairFamily fam(nodes.size());
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        fam[new_id[i]] = nodes[i].terms;
      }
      c.tree   = std::move(tree);
      c.family = std::move(fam);
    }
  }  // namespace detail

  inline SdMeetCertificate read_certificate(std::istream& in) {
    SdMeetCertificate              c;
    std::vector<detail::NodeLine>  nodes;
    std::map<std::size_t, Term>    elements;
    bool                           have_verdict = false;
    std::string                    raw;
    std::size_t                    line = 0;
    while (std::getline(in, raw)) {
      ++line;
      std::string_view s = raw;
      auto             key = detail::next_word(s);
      if (key.empty() || key.front() == '#') {
        continue;
      }
      if (key == "verdict") {
        auto v = detail::next_word(s);
        if (v == "yes") {
          c.verdict = SdMeetCertificate::Verdict::yes;
        } else if (v == "no") {
          c.verdict = SdMeetCertificate::Verdict::no;
        } else if (v == "resource-exceeded") {
          c.verdict = SdMeetCertificate::Verdict::resource_exceeded;
        } else {
          throw ParseError(line, "unknown verdict '" + std::string(v) + "'");
        }
        have_verdict = true;
      } else if (key == "node") {
        detail::NodeLine n;
        n.line = line;
        n.id   = detail::to_index(detail::next_word(s), line);
        detail::expect(s, "parent", line);
        auto par = detail::next_word(s);
        n.parent = par == "-" ? ColouredTree::none : detail::to_index(par, line);
        detail::expect(s, "colour", line);
        auto col = detail::next_word(s);
        if (col != "b" && col != "g") {
          throw ParseError(line, "colour must be b or g");
        }
        n.colour = col == "b" ? Colour::b : Colour::g;
        detail::expect(s, "s", line);
        try {
          n.terms.s = read_term(s);
          detail::expect(s, "t", line);
          n.terms.t = read_term(s);
        } catch (ParseError const&) {
          throw;
        } catch (Error const& e) {
          throw ParseError(line, e.what());
        }
        nodes.push_back(std::move(n));
      } else if (key == "element") {
        auto i = detail::to_index(detail::next_word(s), line);
        try {
          elements.insert_or_assign(i, read_term(s));
        } catch (ParseError const&) {
          throw;
        } catch (Error const& e) {
          throw ParseError(line, e.what());
        }
      } else if (key == "pair") {
        c.x = static_cast<Element>(detail::to_index(detail::next_word(s), line));
        c.z = static_cast<Element>(detail::to_index(detail::next_word(s), line));
      } else if (key == "alpha" || key == "beta_omega" || key == "gamma_omega") {
        auto& p = key == "alpha"        ? c.alpha
                  : key == "beta_omega" ? c.beta_omega
                                        : c.gamma_omega;
        p = parse_partition(std::string(s), elements.size());
      } else if (key == "note") {
        while (!s.empty() && s.front() == ' ') {
          s.remove_prefix(1);
        }
        c.note = std::string(s);
      } else {
        throw ParseError(line, "unexpected '" + std::string(key) + "'");
      }
    }
    if (!have_verdict) {
      throw Error("certificate has no verdict line");
    }
    if (c.verdict == SdMeetCertificate::Verdict::yes) {
      detail::assemble_tree(nodes, c);
    }
    for (std::size_t i = 0; i < elements.size(); ++i) {
      if (!elements.count(i)) {
        throw Error("element " + std::to_string(i) + " missing");
      }
      c.free_terms.push_back(elements.at(i));
    }
    return c;
  }

  inline SdMeetCertificate read_certificate(std::string const& text) {
    std::istringstream in(text);
    return read_certificate(in);
  }

}  // namespace unialg

#endif  // UNIALG_CERTIFICATE_HPP_
