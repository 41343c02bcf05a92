#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "relboost/boosting.hpp"
#include "relboost/error.hpp"
#include "relboost/pipeline.hpp"
#include "relboost/text_format.hpp"
#include "relboost/tree.hpp"

using namespace relboost;
using namespace relboost::rrt;
using logic::Atom;
using logic::FactBase;
using logic::parse_atom;

namespace {

FactBase facts(const std::string& text) { return logic::parse_facts(text, pipeline::default_schema()); }

// Direct reading of the semantics: each inner node tests the conjunction of
// the true-branch tests above it plus its own, under the head binding.
double reference_evaluate(const RegressionTree& tree, const Atom& example, const FactBase& fb) {
  logic::Substitution head;
  head.bind(Symbol::intern("A"), example.args[0].symbol());
  head.bind(Symbol::intern("B"), example.args[1].symbol());
  std::vector<Atom> path;
  std::size_t node = 0;
  while (!tree.nodes()[node].is_leaf()) {
    const auto& n = tree.nodes()[node];
    std::vector<Atom> query = path;
    query.insert(query.end(), n.test.begin(), n.test.end());
    if (logic::satisfy(query, head, fb, {&example})) {
      path = query;
      node = static_cast<std::size_t>(n.on_true);
    } else {
      node = static_cast<std::size_t>(n.on_false);
    }
  }
  return tree.nodes()[node].value;
}

}  // namespace

TEST(WorkedTree, ReferenceChainLeaf) {
  const auto tree = fixtures::worked_tree();
  EXPECT_DOUBLE_EQ(evaluate(tree, parse_atom("pub(p1, alice)"), facts("ref(p1, p2).\npub(p2, alice).\n")), 0.856);
}

TEST(WorkedTree, EmptyFactBaseReachesDefault) {
  const auto tree = fixtures::worked_tree();
  EXPECT_DOUBLE_EQ(evaluate(tree, parse_atom("pub(p1, alice)"), FactBase(pipeline::default_schema())), 0.191);
}

TEST(WorkedTree, EveryLeafReachable) {
  const auto tree = fixtures::worked_tree();
  const Atom ex = parse_atom("pub(p1, alice)");
  struct Case {
    const char* facts;
    double value;
  };
  const Case cases[] = {
      {"ref(p1, p2).\ntitle(p2, t).\n", 0.067},
      {"ref(p0, p1).\naff(p0, x).\nref(p1, p9).\naff(p1, x).\npub(p0, alice).\n", 0.858},
      {"ref(p0, p1).\naff(p0, x).\nref(p1, p9).\naff(p1, x).\n", 0.060},
      {"ref(p0, p1).\naff(p0, x).\npub(p0, alice).\n", 0.858},
      {"ref(p0, p1).\naff(p0, x).\n", 0.087},
      {"ref(p1, p9).\ncoa(p1, bob).\n", 0.182},
      {"coa(p1, bob).\nven(p1, icml).\n", 0.204},
      {"ven(p1, icml).\n", 0.191},
  };
  for (const auto& c : cases) {
    const FactBase fb = facts(c.facts);
    EXPECT_DOUBLE_EQ(evaluate(tree, ex, fb), c.value) << c.facts;
    EXPECT_DOUBLE_EQ(evaluate_list(to_decision_list(tree), ex, fb), c.value) << c.facts;
  }
}

TEST(WorkedTree, DecisionListValues) {
  const auto list = to_decision_list(fixtures::worked_tree());
  ASSERT_EQ(list.size(), 9u);
  const double expected[] = {0.856, 0.067, 0.858, 0.060, 0.858, 0.087, 0.182, 0.204, 0.191};
  for (std::size_t i = 0; i < 9; ++i) {
    EXPECT_DOUBLE_EQ(list[i].value, expected[i]);
    ASSERT_TRUE(list[i].clause.weight.has_value());
    EXPECT_DOUBLE_EQ(*list[i].clause.weight, expected[i]);
  }
  EXPECT_TRUE(list.back().clause.body.empty());
  EXPECT_EQ(logic::render_clause(list.front().clause), "0.856 pub(A, B) ⇐ ref(A, C) ∧ pub(C, B).");
  EXPECT_EQ(logic::render_clause(list.back().clause), "0.191 pub(A, B) ⇐ .");
}

TEST(WorkedTree, ProbabilityOfFirstLeaf) {
  boosting::BoostedModel model(pipeline::default_target(), 0.0);
  model.add_tree(fixtures::worked_tree());
  const double p =
      boosting::probability(model, parse_atom("pub(p1, alice)"), facts("ref(p1, p2).\npub(p2, alice).\n"));
  EXPECT_NEAR(p, 1.0 / (1.0 + std::exp(-0.856)), 1e-15);
  EXPECT_NEAR(p, 0.7018, 5e-5);
}

TEST(Tree, SingleLeaf) {
  const auto tree = RegressionTree::leaf(pipeline::default_target(), 0.0);
  const FactBase fb = facts("ref(p1, p2).\n");
  EXPECT_EQ(evaluate(tree, parse_atom("pub(p1, a)"), fb), 0.0);
  EXPECT_EQ(evaluate(tree, parse_atom("pub(zz, q)"), fb), 0.0);
  const auto list = to_decision_list(RegressionTree::leaf(pipeline::default_target(), 0.25));
  ASSERT_EQ(list.size(), 1u);
  EXPECT_EQ(logic::render_clause(list[0].clause), "0.25 pub(A, B) ⇐ .");
}

TEST(Tree, DepthOneGivesTwoClauses) {
  std::vector<RegressionTree::Node> nodes = {fixtures::inner("ref(A, C)", 1, 2), fixtures::leaf(1), fixtures::leaf(-1)};
  const RegressionTree tree(pipeline::default_target(), nodes);
  EXPECT_EQ(tree.depth(), 1);
  EXPECT_EQ(to_decision_list(tree).size(), 2u);
}

TEST(Tree, RejectsMalformedStructure) {
  using N = RegressionTree::Node;
  auto target = pipeline::default_target();
  EXPECT_THROW(RegressionTree(target, {}), Error);
  EXPECT_THROW(RegressionTree(target, {fixtures::inner("ref(A, C)", 1, 5), fixtures::leaf(0)}), Error);
  EXPECT_THROW(RegressionTree(target, {fixtures::inner("ref(A, C)", 1, 1), fixtures::leaf(0)}), Error);
  N bad = fixtures::leaf(std::nan(""));
  EXPECT_THROW(RegressionTree(target, {bad}), Error);
  N empty_test = fixtures::inner("ref(A, C)", 1, 2);
  empty_test.test.clear();
  EXPECT_THROW(RegressionTree(target, {empty_test, fixtures::leaf(0), fixtures::leaf(1)}), Error);
}

TEST(Tree, WrongExampleIsSchemaError) {
  const auto tree = fixtures::worked_tree();
  const FactBase fb = facts("");
  try {
    evaluate(tree, parse_atom("ref(p1, p2)"), fb);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::Schema);
  }
  EXPECT_THROW(evaluate(tree, parse_atom("pub(p1, B)"), fb), Error);
}

TEST(Tree, ExampleNeverProvesItself) {
  std::vector<RegressionTree::Node> nodes = {fixtures::inner("pub(R, B)", 1, 2), fixtures::leaf(1), fixtures::leaf(-1)};
  const RegressionTree tree(pipeline::default_target(), nodes);
  EXPECT_EQ(evaluate(tree, parse_atom("pub(p1, a)"), facts("pub(p1, a).\n")), -1.0);
  EXPECT_EQ(evaluate(tree, parse_atom("pub(p1, a)"), facts("pub(p1, a).\npub(p2, a).\n")), 1.0);
}

TEST(Tree, SerializationRoundTrip) {
  const auto tree = fixtures::worked_tree();
  const std::string text = serialize_tree(tree);
  std::istringstream in(text);
  std::string header, line;
  std::getline(in, header);
  EXPECT_EQ(header, "tree 17");
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  const auto back = parse_tree(pipeline::default_target(), lines);
  EXPECT_EQ(serialize_tree(back), text);
}

TEST(Tree, RandomTreesMatchDecisionListsAndReference) {
  fixtures::RandomWorld world(11);
  int mismatches = 0;
  for (int t = 0; t < 150; ++t) {
    const auto tree = world.tree(3);
    const auto list = to_decision_list(tree);
    EXPECT_EQ(list.size(), tree.leaf_count());
    const FactBase fb = world.facts(4 + world.rng() % 14);
    const CompiledTree compiled(tree, fb);
    const CompiledDecisionList compiled_list(list, fb);
    for (int e = 0; e < 20; ++e) {
      const Atom ex = world.example();
      const double a = compiled.evaluate(ex);
      if (a != compiled_list.evaluate(ex) || a != reference_evaluate(tree, ex, fb)) ++mismatches;
    }
  }
  EXPECT_EQ(mismatches, 0);
}
