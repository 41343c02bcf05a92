#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "relboost/combine.hpp"
#include "relboost/pipeline.hpp"
#include "relboost/text_format.hpp"

using namespace relboost;
using namespace relboost::combine;
using logic::parse_atom;

namespace {

CombinedClause clause_with(std::size_t literals, double value, std::size_t pos = 0, std::size_t neg = 0) {
  CombinedClause c;
  c.clause.head = parse_atom("pub(A, B)");
  for (std::size_t i = 0; i < literals; ++i) c.clause.body.push_back(parse_atom("ven(A, v" + std::to_string(i) + ")"));
  c.value = value;
  c.positives = pos;
  c.negatives = neg;
  return c;
}

std::vector<LabeledExample> labelled(std::vector<logic::Atom> atoms) {
  std::vector<LabeledExample> out;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    out.push_back({atoms[i], i % 3 == 2 ? Label::Unobserved : i % 2 ? Label::Negative : Label::Positive});
  }
  return out;
}

// True when the body holds aut(A, X), aut(Y, X), pub(Y, B) for some X, Y.
bool has_shared_name_chain(const std::vector<logic::Atom>& body) {
  for (const auto& a : body) {
    if (a.predicate.str() != "aut" || a.args[0].symbol().str() != "A") continue;
    for (const auto& b : body) {
      if (b.predicate.str() != "aut" || b.args[1] != a.args[1] || b.args[0].symbol().str() == "A") continue;
      for (const auto& c : body) {
        if (c.predicate.str() == "pub" && c.args[0] == b.args[0] && c.args[1].symbol().str() == "B") return true;
      }
    }
  }
  return false;
}

}  // namespace

TEST(Combine, EmptyBodiesSumToOneClause) {
  boosting::BoostedModel model(pipeline::default_target(), 0.0);
  model.add_tree(rrt::RegressionTree::leaf(pipeline::default_target(), 0.3));
  model.add_tree(rrt::RegressionTree::leaf(pipeline::default_target(), -0.1));
  const logic::FactBase fb(pipeline::default_schema());
  const auto combined = combine::combine(model, fb, labelled({parse_atom("pub(p1, a)")}));
  ASSERT_EQ(combined.clauses.size(), 1u);
  EXPECT_DOUBLE_EQ(combined.clauses[0].value, 0.3 + -0.1);
  EXPECT_TRUE(combined.clauses[0].clause.body.empty());
  EXPECT_EQ(combined.clauses[0].sources, (std::vector<std::size_t>{0, 0}));
}

TEST(Combine, SingleTreeIsItsDecisionList) {
  const auto tree = fixtures::worked_tree();
  boosting::BoostedModel model(pipeline::default_target(), 0.0);
  model.add_tree(tree);
  const auto list = rrt::to_decision_list(tree);
  // One example per leaf, built from the fact patterns that reach it.
  const logic::FactBase fb = logic::parse_facts(
      "ref(p1, p2).\npub(p2, alice).\n"
      "ref(p3, p4).\ntitle(p4, t).\n"
      "ref(p5, p6).\naff(p5, x).\nref(p6, p9).\naff(p6, x).\npub(p5, bob).\n"
      "ref(p7, p8).\naff(p7, y).\nref(p8, p10).\naff(p8, y).\n"
      "ref(p11, p12).\naff(p11, z).\npub(p11, cy).\n"
      "ref(p13, p14).\naff(p13, w).\n"
      "ref(p15, p16).\ncoa(p15, dee).\n"
      "coa(p17, dee).\nven(p17, icml).\n",
      pipeline::default_schema());
  const auto examples = labelled({parse_atom("pub(p1, alice)"), parse_atom("pub(p3, alice)"), parse_atom("pub(p6, bob)"),
                                  parse_atom("pub(p8, bob)"), parse_atom("pub(p12, cy)"), parse_atom("pub(p14, cy)"),
                                  parse_atom("pub(p15, alice)"), parse_atom("pub(p17, alice)"),
                                  parse_atom("pub(p20, alice)")});
  const auto combined = combine::combine(model, fb, examples);
  ASSERT_EQ(combined.clauses.size(), list.size());
  for (std::size_t i = 0; i < list.size(); ++i) {
    EXPECT_EQ(combined.clauses[i].value, list[i].value);
    EXPECT_EQ(combined.clauses[i].sources, std::vector<std::size_t>{i});
    EXPECT_EQ(combined.clauses[i].clause.body.size(), list[i].clause.body.size());
  }
  for (const auto& e : examples) EXPECT_EQ(evaluate(combined, e.atom, fb), rrt::evaluate(tree, e.atom, fb));
}

TEST(Combine, AdditiveEquivalenceOnRandomModels) {
  fixtures::RandomWorld world(41, 5);
  double worst = 0;
  for (int m = 0; m < 40; ++m) {
    boosting::BoostedModel model(pipeline::default_target(), 0.0);
    const std::size_t trees = 1 + world.rng() % 4;
    for (std::size_t t = 0; t < trees; ++t) model.add_tree(world.tree(2));
    const auto fb = world.facts(10 + world.rng() % 20);
    std::vector<logic::Atom> atoms;
    for (int e = 0; e < 25; ++e) atoms.push_back(world.example());
    const auto examples = labelled(atoms);
    const auto combined = combine::combine(model, fb, examples);
    const CompiledCombined compiled(combined, fb);
    for (const auto& e : examples) {
      double sum = 0;
      for (const auto& t : model.trees()) sum += rrt::evaluate(t, e.atom, fb);
      worst = std::max(worst, std::abs(compiled.evaluate(e.atom) - sum));
    }
    for (const auto& c : combined.clauses) EXPECT_EQ(c.sources.size(), trees);
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(Combine, DefaultTupleComesLastAndVariablesAreApart) {
  fixtures::RandomWorld world(42, 5);
  boosting::BoostedModel model(pipeline::default_target(), 0.0);
  for (int t = 0; t < 3; ++t) model.add_tree(world.tree(2));
  const auto fb = world.facts(20);
  std::vector<logic::Atom> atoms;
  for (int e = 0; e < 20; ++e) atoms.push_back(world.example());
  const auto combined = combine::combine(model, fb, labelled(atoms));
  const auto& last = combined.clauses.back();
  for (std::size_t t = 0; t < 3; ++t) {
    EXPECT_EQ(last.sources[t] + 1, rrt::to_decision_list(model.trees()[t]).size());
  }
  for (const auto& c : combined.clauses) {
    for (const auto& lit : c.clause.body) {
      for (const auto& arg : lit.args) {
        if (arg.is_variable() && arg.symbol().str() != "A" && arg.symbol().str() != "B") {
          EXPECT_NE(arg.symbol().str().find('_'), std::string::npos) << arg.symbol().str();
        }
      }
    }
  }
  for (std::size_t i = 1; i < combined.clauses.size(); ++i) {
    EXPECT_TRUE(std::lexicographical_compare(combined.clauses[i - 1].sources.begin(),
                                             combined.clauses[i - 1].sources.end(),
                                             combined.clauses[i].sources.begin(), combined.clauses[i].sources.end()));
  }
}

TEST(Stats, Examples) {
  const std::vector<CombinedClause> one = {clause_with(0, 0.1)};
  const auto a = clause_stats(one);
  EXPECT_EQ(a.count, 1u);
  EXPECT_EQ(a.avg_length, 0.0);
  EXPECT_EQ(a.max_length, 0u);
  std::vector<CombinedClause> two = {clause_with(2, 0.1), clause_with(4, 0.2)};
  const auto b = clause_stats(two);
  EXPECT_EQ(b.count, 2u);
  EXPECT_DOUBLE_EQ(b.avg_length, 3.0);
  EXPECT_EQ(b.max_length, 4u);
  std::reverse(two.begin(), two.end());
  EXPECT_DOUBLE_EQ(clause_stats(two).avg_length, 3.0);
  EXPECT_EQ(clause_stats(std::vector<CombinedClause>{}).count, 0u);
}

TEST(Stats, OrderInvariantOnRandomLists) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    std::vector<CombinedClause> clauses;
    for (int c = 0; c < 1 + static_cast<int>(rng() % 12); ++c) clauses.push_back(clause_with(rng() % 7, 0.0));
    const auto before = clause_stats(clauses);
    std::shuffle(clauses.begin(), clauses.end(), rng);
    const auto after = clause_stats(clauses);
    EXPECT_EQ(before.count, after.count);
    EXPECT_NEAR(before.avg_length, after.avg_length, 1e-12);
    EXPECT_EQ(before.max_length, after.max_length);
  }
}

TEST(TopClauses, FiltersAndRanks) {
  CombinedModel model{pipeline::default_target(), {}, 10, 10};
  for (int i = 0; i < 8; ++i) model.clauses.push_back(clause_with(1 + i % 3, 0.1 * i, 2, 1));
  model.clauses.push_back(clause_with(0, 5.0, 5, 0));
  model.clauses[7].negatives = 9;
  const auto top = top_clauses(model, 3);
  ASSERT_EQ(top.size(), 3u);
  for (const auto& c : top) EXPECT_FALSE(c.clause.body.empty());
  EXPECT_DOUBLE_EQ(top[0].value, 0.6);
  EXPECT_DOUBLE_EQ(top[1].value, 0.5);

  CombinedModel hopeless{pipeline::default_target(), {clause_with(0, 1.0, 3, 0), clause_with(2, 1.0, 0, 4)}, 10, 10};
  EXPECT_TRUE(top_clauses(hopeless, 3).empty());
}

TEST(TopClauses, PlantedRuleLeads) {
  logic::FactBase fb(pipeline::default_schema());
  std::vector<LabeledExample> examples;
  for (int a = 0; a < 10; ++a) {
    for (int k = 0; k < 4; ++k) {
      const std::string p = "p" + std::to_string(a * 4 + k), me = "a" + std::to_string(a),
                        other = "a" + std::to_string((a + 1) % 10);
      fb.add(parse_atom("aut(" + p + ", name" + std::to_string(a) + ")"));
      fb.add(parse_atom("pub(" + p + ", " + me + ")"));
      examples.push_back({parse_atom("pub(" + p + ", " + me + ")"), Label::Positive});
      examples.push_back({parse_atom("pub(" + p + ", " + other + ")"), Label::Negative});
    }
  }
  boosting::TrainingConfig config;
  config.num_trees = 2;
  config.alpha = 1.0;
  config.tree.max_literals_per_node = 3;
  const auto model = boosting::train(examples, fb, pipeline::default_modes(), {}, config, pipeline::default_target());
  const auto combined = combine::combine(model, fb, examples);
  const auto top = top_clauses(combined, 3);
  ASSERT_FALSE(top.empty());
  EXPECT_TRUE(has_shared_name_chain(top[0].clause.body)) << logic::render(top[0].clause.body);
}
