#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relboost/advice.hpp"
#include "relboost/boosting.hpp"
#include "relboost/example.hpp"
#include "relboost/fact_base.hpp"
#include "relboost/induce.hpp"

namespace relboost::eval {

struct ScoredExample {
  logic::Atom atom;
  Label label = Label::Unobserved;
  double score = 0.0;
};

/// Mann-Whitney estimate of P(score of a random positive > score of a random
/// negative), ties counted one half. Unobserved examples are ignored. Throws
/// Error(Metric) unless at least one positive and one negative remain.
double auc_roc(std::span<const ScoredExample> scored);

/// Area under the precision-recall step curve: examples are swept by
/// descending score, each group of tied scores as one step, and every step
/// adds (recall gain) * (precision after the group). Unobserved examples are
/// ignored. Throws Error(Metric) without positives.
double auc_pr(std::span<const ScoredExample> scored);

/// Model probabilities for `examples`, in order.
std::vector<ScoredExample> score(const boosting::BoostedModel& model, std::span<const LabeledExample> examples,
                                 const logic::FactBase& facts);

struct Metrics {
  double auc_roc = 0.0;
  double auc_pr = 0.0;
};

Metrics evaluate(std::span<const ScoredExample> scored);
Metrics evaluate(const boosting::BoostedModel& model, std::span<const LabeledExample> examples,
                 const logic::FactBase& facts);

/// `lo:hi:step` (inclusive, values rounded to 1e-9) or a comma-separated
/// list. Values must lie in [0, 1] and increase strictly.
std::vector<double> parse_grid(std::string_view text);

struct SweepPoint {
  double alpha = 0.0;
  Metrics validation;
  Metrics test;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // grid order
  std::size_t best = 0;            // highest validation AUC-ROC, first on ties
  Metrics baseline_validation;     // no advice, alpha = 1
  Metrics baseline_test;

  const SweepPoint& best_point() const { return points.at(best); }
};

struct SweepInputs {
  std::span<const LabeledExample> train;
  std::span<const LabeledExample> validation;
  std::span<const LabeledExample> test;
  const logic::FactBase* facts = nullptr;
  std::span<const rrt::ModeDeclaration> modes;
  const advice::AdviceSet* advice = nullptr;
  logic::PredicateSignature target;
};

/// Trains one model per grid value (config.alpha overridden) plus the
/// no-advice baseline and scores each on validation and test examples.
/// Training errors are rethrown with the offending alpha in the message.
SweepResult sweep_alpha(const boosting::TrainingConfig& config, std::span<const double> grid,
                        const SweepInputs& inputs,
                        const std::function<void(const SweepPoint&)>& on_point = {});

/// Tab-separated table: one row per alpha, then a `baseline` row.
std::string render_sweep(const SweepResult& result);
/// JSON object with `points`, `best_alpha`, `baseline`.
std::string sweep_json(const SweepResult& result);

}  // namespace relboost::eval
