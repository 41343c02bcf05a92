#include "relboost/combine.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

#include "relboost/error.hpp"
#include "relboost/text_format.hpp"
#include "relboost/tree.hpp"

namespace relboost::combine {

using logic::Atom;
using logic::Term;

namespace {

std::vector<Symbol> head_parameters(const Atom& head) {
  std::vector<Symbol> out;
  for (const auto& arg : head.args) out.push_back(arg.symbol());
  return out;
}

std::vector<Symbol> example_values(const Atom& example) {
  std::vector<Symbol> out;
  for (const auto& arg : example.args) out.push_back(arg.symbol());
  return out;
}

std::vector<Atom> standardize(const std::vector<Atom>& body, const std::unordered_set<Symbol>& keep, std::size_t k) {
  std::vector<Atom> out = body;
  const std::string suffix = "_" + std::to_string(k);
  for (auto& atom : out) {
    for (auto& arg : atom.args) {
      if (arg.is_variable() && !keep.contains(arg.symbol())) arg = Term::variable(arg.symbol().str() + suffix);
    }
  }
  return out;
}

}  // namespace

CombinedModel combine(const boosting::BoostedModel& model, const logic::FactBase& facts,
                      std::span<const LabeledExample> examples) {
  const auto& trees = model.trees();
  if (trees.empty()) throw Error(ErrorCategory::Training, "cannot combine a model without trees");

  std::vector<rrt::DecisionList> lists;
  for (const auto& tree : trees) lists.push_back(rrt::to_decision_list(tree));
  std::vector<std::unique_ptr<rrt::CompiledDecisionList>> compiled;
  for (const auto& list : lists) compiled.push_back(std::make_unique<rrt::CompiledDecisionList>(list, facts));

  struct Counts {
    std::size_t positives = 0, negatives = 0;
  };
  std::map<std::vector<std::size_t>, Counts> tuples;
  CombinedModel out{model.target(), {}, 0, 0};
  std::vector<std::size_t> tuple(trees.size());
  for (const auto& example : examples) {
    for (std::size_t k = 0; k < trees.size(); ++k) tuple[k] = compiled[k]->fired(example.atom);
    Counts& counts = tuples[tuple];
    if (example.label == Label::Positive) {
      ++counts.positives;
      ++out.positives;
    } else if (example.label == Label::Negative) {
      ++counts.negatives;
      ++out.negatives;
    }
  }
  for (std::size_t k = 0; k < trees.size(); ++k) tuple[k] = lists[k].size() - 1;
  tuples.try_emplace(tuple);

  const Atom head = rrt::head_atom(model.target());
  std::unordered_set<Symbol> keep;
  for (const auto& arg : head.args) keep.insert(arg.symbol());
  for (const auto& [sources, counts] : tuples) {
    CombinedClause clause;
    clause.clause.head = head;
    for (std::size_t k = 0; k < sources.size(); ++k) {
      const auto& source = lists[k][sources[k]];
      const auto body = standardize(source.clause.body, keep, k);
      clause.clause.body.insert(clause.clause.body.end(), body.begin(), body.end());
      clause.value += source.value;
    }
    clause.clause.weight = clause.value;
    clause.sources = sources;
    clause.positives = counts.positives;
    clause.negatives = counts.negatives;
    out.clauses.push_back(std::move(clause));
  }
  return out;
}

CompiledCombined::CompiledCombined(const CombinedModel& model, const logic::FactBase& facts) : model_(&model) {
  for (const auto& clause : model.clauses) {
    queries_.push_back(
        std::make_unique<logic::CompiledQuery>(clause.clause.body, head_parameters(clause.clause.head), facts));
  }
}

std::size_t CompiledCombined::fired(const Atom& example) const {
  const auto values = example_values(example);
  for (std::size_t i = 0; i < queries_.size(); ++i) {
    if (model_->clauses[i].clause.body.empty() || queries_[i]->holds(values, &example)) return i;
  }
  return queries_.size();
}

double CompiledCombined::evaluate(const Atom& example) const {
  const std::size_t i = fired(example);
  if (i == queries_.size()) throw Error(ErrorCategory::Schema, "no combined clause fires for " + logic::render(example));
  return model_->clauses[i].value;
}

double evaluate(const CombinedModel& model, const Atom& example, const logic::FactBase& facts) {
  return CompiledCombined(model, facts).evaluate(example);
}

std::string render(const CombinedModel& model) {
  std::string out;
  for (const auto& clause : model.clauses) out += logic::render_clause(clause.clause) + "\n";
  return out;
}

ClauseStats clause_stats(std::span<const CombinedClause> clauses) {
  ClauseStats stats;
  stats.count = clauses.size();
  std::size_t total = 0;
  for (const auto& clause : clauses) {
    total += clause.clause.body.size();
    stats.max_length = std::max(stats.max_length, clause.clause.body.size());
  }
  if (stats.count > 0) stats.avg_length = static_cast<double>(total) / static_cast<double>(stats.count);
  return stats;
}

void measure_coverage(CombinedModel& model, const logic::FactBase& facts, std::span<const LabeledExample> examples) {
  for (auto& clause : model.clauses) clause.positives = clause.negatives = 0;
  model.positives = model.negatives = 0;
  const CompiledCombined compiled(model, facts);
  for (const auto& example : examples) {
    if (example.label == Label::Unobserved) continue;
    const std::size_t i = compiled.fired(example.atom);
    if (i == model.clauses.size()) continue;
    if (example.label == Label::Positive) {
      ++model.clauses[i].positives;
      ++model.positives;
    } else {
      ++model.clauses[i].negatives;
      ++model.negatives;
    }
  }
}

std::vector<CombinedClause> top_clauses(const CombinedModel& model, std::size_t k, double r) {
  auto share = [](std::size_t n, std::size_t total) {
    return total == 0 ? 0.0 : static_cast<double>(n) / static_cast<double>(total);
  };
  std::vector<CombinedClause> kept;
  for (const auto& clause : model.clauses) {
    if (clause.clause.body.empty()) continue;
    if (share(clause.negatives, model.negatives) > r * share(clause.positives, model.positives)) continue;
    kept.push_back(clause);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const CombinedClause& a, const CombinedClause& b) { return a.value > b.value; });
  if (kept.size() > k) kept.resize(k);
  return kept;
}

}  // namespace relboost::combine
