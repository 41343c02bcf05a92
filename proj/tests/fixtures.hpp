#pragma once

#include <random>
#include <string>
#include <vector>

#include "relboost/fact_base.hpp"
#include "relboost/pipeline.hpp"
#include "relboost/solver.hpp"
#include "relboost/text_format.hpp"
#include "relboost/tree.hpp"

namespace fixtures {

using relboost::Symbol;
using relboost::logic::Atom;
using relboost::logic::FactBase;
using relboost::logic::Term;
using relboost::rrt::RegressionTree;
using Node = RegressionTree::Node;

inline Node inner(const char* test, int t, int f) {
  Node n;
  n.test = relboost::logic::parse_conjunction(test);
  n.on_true = t;
  n.on_false = f;
  return n;
}

inline Node leaf(double v) {
  Node n;
  n.value = v;
  return n;
}

/// The nine-leaf authorship tree used as the worked example throughout.
inline RegressionTree worked_tree() {
  std::vector<Node> nodes(17);
  nodes[0] = inner("ref(A, C), pub(C, B)", 1, 2);
  nodes[1] = leaf(0.856);
  nodes[2] = inner("ref(A, D), title(D, E)", 3, 4);
  nodes[3] = leaf(0.067);
  nodes[4] = inner("ref(F, A), aff(F, G)", 5, 6);
  nodes[5] = inner("ref(A, H), aff(A, G)", 7, 8);
  nodes[6] = inner("ref(A, I), coa(A, J)", 9, 10);
  nodes[7] = inner("pub(F, B)", 11, 12);
  nodes[8] = inner("pub(F, B)", 13, 14);
  nodes[9] = leaf(0.182);
  nodes[10] = inner("coa(A, K), ven(A, M)", 15, 16);
  nodes[11] = leaf(0.858);
  nodes[12] = leaf(0.060);
  nodes[13] = leaf(0.858);
  nodes[14] = leaf(0.087);
  nodes[15] = leaf(0.204);
  nodes[16] = leaf(0.191);
  return RegressionTree(relboost::pipeline::default_target(), std::move(nodes));
}

/// Random structures over the default schema with a handful of constants.
struct RandomWorld {
  std::mt19937_64 rng;
  std::vector<Symbol> pubs, authors, values;

  explicit RandomWorld(std::uint64_t seed, std::size_t n = 4) : rng(seed) {
    for (std::size_t i = 0; i < n; ++i) {
      pubs.push_back(Symbol::intern("p" + std::to_string(i)));
      authors.push_back(Symbol::intern("a" + std::to_string(i)));
      values.push_back(Symbol::intern("v" + std::to_string(i)));
    }
  }

  Symbol pick(const std::vector<Symbol>& from) { return from[rng() % from.size()]; }

  FactBase facts(std::size_t count) {
    FactBase fb(relboost::pipeline::default_schema());
    static const char* attrs[] = {"aut", "aff", "ven", "coa", "title"};
    for (std::size_t i = 0; i < count; ++i) {
      switch (rng() % 3) {
        case 0: fb.add(atom("pub", pick(pubs), pick(authors))); break;
        case 1: fb.add(atom("ref", pick(pubs), pick(pubs))); break;
        default: fb.add(atom(attrs[rng() % 5], pick(pubs), pick(values))); break;
      }
    }
    return fb;
  }

  Atom example() { return atom("pub", pick(pubs), pick(authors)); }

  static Atom atom(const char* pred, Symbol a, Symbol b) {
    return Atom(Symbol::intern(pred), {Term::constant(a), Term::constant(b)});
  }

  /// Literal over publication-typed variables: `visible` ones plus at most
  /// one fresh variable, whose name is appended to `visible`.
  Atom literal(std::vector<std::string>& visible, std::size_t& next) {
    auto var = [&](bool allow_fresh) {
      if (allow_fresh && rng() % 3 == 0) {
        visible.push_back(relboost::rrt::variable_name(next++));
        return Term::variable(visible.back());
      }
      return Term::variable(visible[rng() % visible.size()]);
    };
    switch (rng() % 4) {
      case 0: return Atom(Symbol::intern("ref"), {var(false), var(true)});
      case 1: return Atom(Symbol::intern("ref"), {var(true), var(false)});
      case 2: return Atom(Symbol::intern("pub"), {var(true), Term::variable("B")});
      default: {
        static const char* attrs[] = {"aut", "aff", "ven", "coa"};
        return Atom(Symbol::intern(attrs[rng() % 4]), {var(false), Term::constant(pick(values))});
      }
    }
  }

  /// Random tree of depth at most `depth`; variables introduced by a test
  /// are visible only below its true branch.
  RegressionTree tree(int depth) {
    std::vector<Node> nodes;
    std::size_t next = 2;
    std::vector<std::string> visible = {"A"};
    build(nodes, depth, visible, next);
    return RegressionTree(relboost::pipeline::default_target(), std::move(nodes));
  }

 private:
  int build(std::vector<Node>& nodes, int depth, std::vector<std::string> visible, std::size_t& next) {
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    if (depth == 0 || rng() % 4 == 0) {
      nodes[id].value = static_cast<double>(rng() % 2001) / 1000.0 - 1.0;
      return id;
    }
    std::vector<std::string> inside = visible;
    std::vector<Atom> test;
    const std::size_t literals = 1 + rng() % 2;
    for (std::size_t i = 0; i < literals; ++i) test.push_back(literal(inside, next));
    nodes[id].test = test;
    const int t = build(nodes, depth - 1, inside, next);
    const int f = build(nodes, depth - 1, visible, next);
    nodes[id].on_true = t;
    nodes[id].on_false = f;
    return id;
  }
};

}  // namespace fixtures
