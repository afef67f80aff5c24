#ifndef UNIALG_TESTS_ORACLES_HPP_
#define UNIALG_TESTS_ORACLES_HPP_

// Brute-force reference implementations. They read the operation tables
// directly and share no code with the library beyond FiniteAlgebra itself.

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "unialg/algebra.hpp"
#include "unialg/term.hpp"

namespace oracle {

  using unialg::Element;
  using unialg::FiniteAlgebra;
  using Map = std::vector<Element>;

  inline Element op_at(FiniteAlgebra const& a, std::size_t op,
                       std::vector<Element> const& args) {
    std::size_t idx = 0;
    for (Element x : args) {
      idx = idx * a.size() + x;
    }
    return a.tables()[op][idx];
  }

  // Every unary polynomial of A as a map, by closing the identity and the
  // constants under the operations applied pointwise.
  inline std::set<Map> unary_polynomials(FiniteAlgebra const& a) {
    std::size_t const n = a.size();
    std::set<Map>     all;
    std::vector<Map>  list;
    auto              add = [&](Map m) {
      if (all.insert(m).second) {
        list.push_back(std::move(m));
      }
    };
    Map id(n);
    for (Element x = 0; x < n; ++x) {
      id[x] = x;
    }
    add(id);
    for (Element c = 0; c < n; ++c) {
      add(Map(n, c));
    }
    bool grew = true;
    while (grew) {
      grew                = false;
      std::size_t const s = list.size();
      for (std::size_t op = 0; op < a.signature().size(); ++op) {
        std::size_t const k = a.signature()[op].arity;
        if (k == 0) {
          continue;
        }
        std::vector<std::size_t> pick(k, 0);
        while (true) {
          Map out(n);
          for (Element x = 0; x < n; ++x) {
            std::vector<Element> args;
            for (auto i : pick) {
              args.push_back(list[i][x]);
            }
            out[x] = op_at(a, op, args);
          }
          if (!all.count(out)) {
            add(std::move(out));
            grew = true;
          }
          std::size_t i = k;
          while (i > 0 && ++pick[i - 1] == s) {
            pick[--i] = 0;
          }
          if (i == 0) {
            break;
          }
        }
      }
    }
    return all;
  }

  // Cg(a,b) as the equivalence generated by {(p(a),p(b))}. Returned as a
  // map to the least element of each block.
  inline std::vector<Element> principal(FiniteAlgebra const& a,
                                        std::set<Map> const& polys,
                                        Element x, Element y) {
    std::size_t const              n = a.size();
    std::vector<std::vector<bool>> rel(n, std::vector<bool>(n, false));
    for (Element i = 0; i < n; ++i) {
      rel[i][i] = true;
    }
    for (auto const& p : polys) {
      rel[p[x]][p[y]] = rel[p[y]][p[x]] = true;
    }
    for (Element k = 0; k < n; ++k) {
      for (Element i = 0; i < n; ++i) {
        for (Element j = 0; j < n; ++j) {
          if (rel[i][k] && rel[k][j]) {
            rel[i][j] = true;
          }
        }
      }
    }
    std::vector<Element> rep(n);
    for (Element i = 0; i < n; ++i) {
      for (Element j = 0; j <= i; ++j) {
        if (rel[i][j]) {
          rep[i] = j;
          break;
        }
      }
    }
    return rep;
  }

  // Is the block map `rep` compatible with every operation, checked on all
  // pairs of related argument tuples?
  inline bool is_congruence(FiniteAlgebra const& a, std::vector<Element> const& rep) {
    std::size_t const n = a.size();
    for (std::size_t op = 0; op < a.signature().size(); ++op) {
      std::size_t const k = a.signature()[op].arity;
      std::size_t       total = 1;
      for (std::size_t i = 0; i < k; ++i) {
        total *= n;
      }
      for (std::size_t u = 0; u < total; ++u) {
        for (std::size_t v = 0; v < total; ++v) {
          std::vector<Element> xs(k), ys(k);
          bool                 related = true;
          std::size_t          uu = u, vv = v;
          for (std::size_t i = k; i-- > 0;) {
            xs[i] = Element(uu % n);
            ys[i] = Element(vv % n);
            uu /= n;
            vv /= n;
            related = related && rep[xs[i]] == rep[ys[i]];
          }
          if (related && rep[op_at(a, op, xs)] != rep[op_at(a, op, ys)]) {
            return false;
          }
        }
      }
    }
    return true;
  }

  inline Element eval(FiniteAlgebra const& a, unialg::Term const& t,
                      std::vector<Element> const& env) {
    if (t.is_var()) {
      return env.at(t.var_index());
    }
    std::vector<Element> args;
    for (auto const& s : t.args()) {
      args.push_back(eval(a, s, env));
    }
    return op_at(a, *a.signature().find(t.symbol()), args);
  }

  // |F(n)|: distinct n-ary term operations, closing the projections.
  inline std::size_t free_size(FiniteAlgebra const& a, std::size_t n) {
    std::size_t cols = 1;
    for (std::size_t i = 0; i < n; ++i) {
      cols *= a.size();
    }
    std::set<Map>    all;
    std::vector<Map> list;
    for (std::size_t g = 0; g < n; ++g) {
      Map m(cols);
      for (std::size_t c = 0; c < cols; ++c) {
        std::size_t stride = 1;
        for (std::size_t i = g + 1; i < n; ++i) {
          stride *= a.size();
        }
        m[c] = Element((c / stride) % a.size());
      }
      if (all.insert(m).second) {
        list.push_back(m);
      }
    }
    bool grew = true;
    while (grew) {
      grew                = false;
      std::size_t const s = list.size();
      for (std::size_t op = 0; op < a.signature().size(); ++op) {
        std::size_t const k = a.signature()[op].arity;
        if (k == 0) {
          Map m(cols, a.tables()[op][0]);
          if (all.insert(m).second) {
            list.push_back(m);
            grew = true;
          }
          continue;
        }
        std::vector<std::size_t> pick(k, 0);
        while (true) {
          Map out(cols);
          for (std::size_t c = 0; c < cols; ++c) {
            std::vector<Element> args;
            for (auto i : pick) {
              args.push_back(list[i][c]);
            }
            out[c] = op_at(a, op, args);
          }
          if (all.insert(out).second) {
            list.push_back(std::move(out));
            grew = true;
          }
          std::size_t i = k;
          while (i > 0 && ++pick[i - 1] == s) {
            pick[--i] = 0;
          }
          if (i == 0) {
            break;
          }
        }
      }
    }
    return all.size();
  }

  // A random algebra of size 1..max_size with 1..max_ops operations of
  // arity 1..max_arity.
  inline FiniteAlgebra random_algebra(std::mt19937& rng,
                                      std::size_t   max_size  = 4,
                                      std::size_t   max_ops   = 2,
                                      std::size_t   max_arity = 2) {
    std::uniform_int_distribution<std::size_t> size_d(1, max_size);
    std::uniform_int_distribution<std::size_t> ops_d(1, max_ops);
    std::uniform_int_distribution<std::size_t> ar_d(1, max_arity);
    std::size_t const                          n = size_d(rng);
    std::uniform_int_distribution<Element>     el_d(0, Element(n - 1));
    unialg::Signature                          sig;
    std::vector<FiniteAlgebra::Table>          tables;
    std::size_t const                          ops = ops_d(rng);
    for (std::size_t i = 0; i < ops; ++i) {
      std::size_t k = ar_d(rng);
      sig.add({"f" + std::to_string(i), k});
      std::size_t len = 1;
      for (std::size_t j = 0; j < k; ++j) {
        len *= n;
      }
      FiniteAlgebra::Table t(len);
      for (auto& e : t) {
        e = el_d(rng);
      }
      tables.push_back(std::move(t));
    }
    return FiniteAlgebra("R", n, std::move(sig), std::move(tables));
  }

  // A random term over a's signature in x0..x{vars-1}.
  inline unialg::Term random_term(std::mt19937& rng, FiniteAlgebra const& a,
                                  std::size_t vars, int depth) {
    if (depth == 0 || rng() % 3 == 0 || a.signature().size() == 0) {
      return unialg::Term::var(rng() % vars);
    }
    auto const& s = a.signature()[rng() % a.signature().size()];
    std::vector<unialg::Term> args;
    for (std::size_t i = 0; i < s.arity; ++i) {
      args.push_back(random_term(rng, a, vars, depth - 1));
    }
    return unialg::Term::apply(s.name, std::move(args));
  }

}  // namespace oracle

#endif  // UNIALG_TESTS_ORACLES_HPP_
