#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relboost/example.hpp"
#include "relboost/fact_base.hpp"
#include "relboost/logic.hpp"
#include "relboost/solver.hpp"

namespace relboost::advice {

/// Horn-clause constraint plus label preference. The head is a target
/// pattern such as `pub(A, B)`; its variables bind to the example's
/// arguments before the body is checked.
struct AdviceRule {
  logic::HornClause constraint;
  Label preferred = Label::Positive;

  Label avoided() const { return preferred == Label::Positive ? Label::Negative : Label::Positive; }
};

struct AdviceSet {
  std::vector<AdviceRule> rules;

  std::size_t size() const { return rules.size(); }
  bool empty() const { return rules.empty(); }
};

/// Advice file: `advice(+): pub(A, B) <= aut(A, Q), aut(R, Q), pub(R, B).`
/// per line; `advice(-)` marks a negative preference. Predicates are checked
/// against `schema`. Body variables that occur only once are reported in
/// `warnings` (when given) but accepted.
AdviceSet parse_advice(std::string_view text, const logic::Schema& schema,
                       std::vector<std::string>* warnings = nullptr);
std::string render_advice(const AdviceSet& advice);

/// The eight general authorship rules: shared author name, shared
/// affiliation, shared venue, and five reference relations. All prefer the
/// positive label.
AdviceSet default_advice();

/// True iff the rule body is satisfiable under the head binding. The
/// example's own target fact is never used as evidence.
bool satisfied(const AdviceRule& rule, const logic::Atom& example, const logic::FactBase& facts);

struct AdviceCounts {
  int n_true = 0;   // satisfied rules preferring the positive label
  int n_false = 0;  // satisfied rules preferring the negative label

  friend bool operator==(const AdviceCounts&, const AdviceCounts&) = default;
};

AdviceCounts count(const AdviceSet& advice, const logic::Atom& example, const logic::FactBase& facts);

/// Rules compiled against one fact base.
class CompiledAdvice {
 public:
  CompiledAdvice(const AdviceSet& advice, const logic::FactBase& facts);

  bool satisfied(std::size_t rule, const logic::Atom& example) const;
  AdviceCounts count(const logic::Atom& example) const;
  bool any(const logic::Atom& example) const;

 private:
  const AdviceSet* advice_;
  std::vector<std::unique_ptr<logic::CompiledQuery>> queries_;
};

struct RuleCoverage {
  std::size_t positives_covered = 0;
  std::size_t negatives_covered = 0;
  double positive_percent = 0.0;
  double negative_percent = 0.0;
  bool non_discriminative = false;
};

struct CoverageReport {
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::vector<RuleCoverage> rules;  // advice order
};

/// Percentage of positive and of negative examples satisfying each rule.
/// Unobserved examples are ignored. A rule is flagged non-discriminative
/// when its two percentages differ by at most `margin` points.
CoverageReport coverage_report(const AdviceSet& advice, std::span<const LabeledExample> examples,
                               const logic::FactBase& facts, double margin = 5.0);

/// Fixed-width table, one row per rule in advice order.
std::string render_coverage(const AdviceSet& advice, const CoverageReport& report);

}  // namespace relboost::advice
