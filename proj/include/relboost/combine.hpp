#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "relboost/boosting.hpp"
#include "relboost/example.hpp"
#include "relboost/fact_base.hpp"
#include "relboost/solver.hpp"

namespace relboost::combine {

struct CombinedClause {
  logic::HornClause clause;          // body: union of the source bodies
  double value = 0.0;                // sum of the source clause values
  std::vector<std::size_t> sources;  // clause index in each tree's decision list
  std::size_t positives = 0;         // labelled examples this clause decides
  std::size_t negatives = 0;
};

/// A whole boosted model as one decision list. psi0 is not folded into the
/// clause values.
struct CombinedModel {
  logic::PredicateSignature target;
  std::vector<CombinedClause> clauses;
  std::size_t positives = 0;  // labelled examples seen by combine()
  std::size_t negatives = 0;
};

/// Cross product of the trees' decision lists, kept only where some example
/// fires it. For an example the fired clause is the tuple of clauses each
/// tree fires; tuples are ordered lexicographically, so the first satisfied
/// combined clause is always that tuple. The all-default tuple (every
/// tree's empty final clause) is always kept and comes last. Non-head
/// variables of tree k get the suffix `_k`.
///
/// Every example that should evaluate exactly must be passed in `examples`.
CombinedModel combine(const boosting::BoostedModel& model, const logic::FactBase& facts,
                      std::span<const LabeledExample> examples);

class CompiledCombined {
 public:
  CompiledCombined(const CombinedModel& model, const logic::FactBase& facts);

  std::size_t fired(const logic::Atom& example) const;
  double evaluate(const logic::Atom& example) const;

 private:
  const CombinedModel* model_;
  std::vector<std::unique_ptr<logic::CompiledQuery>> queries_;
};

double evaluate(const CombinedModel& model, const logic::Atom& example, const logic::FactBase& facts);

/// One clause per line in the weighted clausal layout.
std::string render(const CombinedModel& model);

struct ClauseStats {
  std::size_t count = 0;
  double avg_length = 0.0;
  std::size_t max_length = 0;
};

ClauseStats clause_stats(std::span<const CombinedClause> clauses);
inline ClauseStats clause_stats(const CombinedModel& model) { return clause_stats(model.clauses); }

/// Recounts clause coverage on `examples` (unobserved ones are skipped).
void measure_coverage(CombinedModel& model, const logic::FactBase& facts, std::span<const LabeledExample> examples);

/// Drops empty bodies and clauses whose share of negatives decided exceeds
/// `r` times their share of positives, then returns the `k` highest-valued
/// clauses (stable on ties).
std::vector<CombinedClause> top_clauses(const CombinedModel& model, std::size_t k, double r = 1.0);

}  // namespace relboost::combine
