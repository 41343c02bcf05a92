#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "relboost/advice.hpp"
#include "relboost/example.hpp"
#include "relboost/fact_base.hpp"
#include "relboost/induce.hpp"
#include "relboost/tree.hpp"

namespace relboost::boosting {

enum class AdviceMode { Indicator, SignedCount };

std::string_view to_string(AdviceMode mode);
AdviceMode parse_advice_mode(std::string_view text);

struct TrainingConfig {
  int num_trees = 20;
  double alpha = 0.5;  // weight of the data gradient; 1 - alpha weighs advice
  double psi0 = 0.0;
  rrt::TreeParams tree;
  std::uint64_t seed = 0;
  AdviceMode advice_mode = AdviceMode::Indicator;

  /// Throws Error(Config) unless num_trees >= 1 and alpha in [0, 1].
  void validate() const;
};

/// psi(x) = psi0 + sum of tree values; P(positive | x) = sigmoid(psi(x)).
class BoostedModel {
 public:
  BoostedModel(logic::PredicateSignature target, double psi0, TrainingConfig config = {});

  const logic::PredicateSignature& target() const { return target_; }
  double psi0() const { return psi0_; }
  const std::vector<rrt::RegressionTree>& trees() const { return trees_; }
  const TrainingConfig& config() const { return config_; }

  void add_tree(rrt::RegressionTree tree);

 private:
  logic::PredicateSignature target_;
  double psi0_;
  std::vector<rrt::RegressionTree> trees_;
  TrainingConfig config_;
};

/// Logistic function, clamped into the open interval (0, 1).
double sigmoid(double psi);

/// Per-example log-likelihood of the binary softmax: y*psi - log(1 + e^psi).
double log_likelihood(bool positive, double psi);

/// All trees of a model compiled against one fact base.
class CompiledModel {
 public:
  CompiledModel(const BoostedModel& model, const logic::FactBase& facts);

  double psi(const logic::Atom& example) const;
  double probability(const logic::Atom& example) const { return sigmoid(psi(example)); }
  /// Per-tree values in tree order (psi0 excluded).
  std::vector<double> tree_values(const logic::Atom& example) const;

 private:
  const BoostedModel* model_;
  std::vector<rrt::CompiledTree> trees_;
};

double psi(const BoostedModel& model, const logic::Atom& example, const logic::FactBase& facts);
double probability(const BoostedModel& model, const logic::Atom& example, const logic::FactBase& facts);

/// I(y = 1) - P given the current probability. Throws Error(Training) for an
/// unobserved label.
double data_gradient(Label label, double probability);
double data_gradient(const LabeledExample& example, const BoostedModel& model, const logic::FactBase& facts);

/// Advice-augmented gradient
///   alpha * [I(y = 1) - P] + (1 - alpha) * advice_term,
/// where advice_term is I(any rule satisfied) in indicator mode and
/// n_t - n_f in signed-count mode. The data term is 0 for unobserved labels.
double advice_gradient(Label label, double probability, const advice::AdviceCounts& counts, double alpha,
                       AdviceMode mode);
double advice_gradient(const LabeledExample& example, const BoostedModel& model, const logic::FactBase& facts,
                       const advice::AdviceSet& advice, double alpha, AdviceMode mode);

struct IterationReport {
  int iteration = 0;             // 1-based
  double mean_abs_gradient = 0;  // over examples used for this tree
  std::size_t examples = 0;
};

/// Fits `config.num_trees` trees, each to the current per-example gradients.
/// Unobserved examples take part only while advice is active (alpha < 1 and
/// a non-empty advice set); otherwise they carry no signal and are skipped.
BoostedModel train(std::span<const LabeledExample> examples, const logic::FactBase& facts,
                   std::span<const rrt::ModeDeclaration> modes, const advice::AdviceSet& advice,
                   const TrainingConfig& config, const logic::PredicateSignature& target,
                   const std::function<void(const IterationReport&)>& on_iteration = {});

/// Probabilities in example order.
std::vector<std::pair<logic::Atom, double>> predict(const BoostedModel& model,
                                                    std::span<const LabeledExample> examples,
                                                    const logic::FactBase& facts);

/// Model file: header lines (`relboost-model 1`, `target`, `psi0`, `trees`,
/// `alpha`, `seed`, `advice_mode`, tree parameters) followed by one tree
/// block per tree. Numbers are written at full round-trip precision.
std::string serialize(const BoostedModel& model);
BoostedModel parse_model(std::string_view text);

}  // namespace relboost::boosting
