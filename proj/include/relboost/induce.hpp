#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "relboost/fact_base.hpp"
#include "relboost/logic.hpp"
#include "relboost/tree.hpp"

namespace relboost::rrt {

enum class ArgMode : std::uint8_t { Input, Output, Constant };

/// Language bias for one predicate: `+` input (reuse a bound variable of the
/// same type), `-` output (fresh variable), `#` constant.
struct ModeDeclaration {
  logic::PredicateSignature predicate;
  std::vector<ArgMode> modes;
};

/// Modes file: `mode: venue(+pub, -venuestr).` per line, `%` comments. A
/// predicate may carry several declarations. Types must match the schema.
std::vector<ModeDeclaration> parse_modes(std::string_view text, const logic::Schema& schema);
std::string render_modes(std::span<const ModeDeclaration> modes);

struct TreeParams {
  int max_depth = 3;
  int max_literals_per_node = 2;
  std::size_t min_examples_per_leaf = 8;
  double tolerance = 1e-6;
  std::size_t max_constants = 50;    // top-N constants per `#` position
  std::size_t max_candidates = 20000;  // per node, in generation order

  void validate() const;
};

struct GradientExample {
  logic::Atom atom;
  double gradient = 0.0;
};

struct VariableInfo {
  Symbol name;
  logic::ArgType type;
};

struct Candidate {
  std::vector<logic::Atom> literals;
  std::vector<VariableInfo> introduced;
};

/// Enumerates candidate node tests from mode declarations.
///
/// Order: predicates in schema order (declarations in file order within a
/// predicate), shorter conjunctions first. Every literal after the first must
/// take as input a variable introduced earlier in the same candidate.
class CandidateGenerator {
 public:
  CandidateGenerator(std::span<const ModeDeclaration> modes, const logic::FactBase& facts, const TreeParams& params);

  /// `bound`: variables visible at the node; `path`: tests already on the
  /// true-branch path (never repeated); `next_variable`: index for fresh names.
  std::vector<Candidate> generate(std::span<const VariableInfo> bound, std::span<const logic::Atom> path,
                                  std::size_t next_variable) const;

  bool empty() const { return modes_.empty(); }

 private:
  std::vector<ModeDeclaration> modes_;
  std::unordered_map<std::uint64_t, std::vector<Symbol>> constants_;  // (mode index, position)
  TreeParams params_;
};

/// Squared-error reduction of splitting a set with gradient sum `sum_true +
/// sum_false` into the two parts.
double split_score(double sum_true, std::size_t n_true, double sum_false, std::size_t n_false);

/// Remembers which examples satisfy a conjunction. Valid for one fixed list
/// of example atoms and one fact base; boosting reuses it across trees.
class CoverageCache {
 public:
  /// Clears the cache when `examples` or `facts` differ from the last call.
  void bind(std::span<const GradientExample> examples, const logic::FactBase& facts);

  std::vector<std::int8_t>& entry(const std::string& key);
  const std::vector<std::int8_t>* find(const std::string& key) const;
  std::size_t size() const { return entries_.size(); }

 private:
  const logic::FactBase* facts_ = nullptr;
  std::size_t example_count_ = 0;
  std::uint64_t fingerprint_ = 0;
  std::unordered_map<std::string, std::vector<std::int8_t>> entries_;
};

/// Greedy top-down induction of one regression tree fit to the example
/// gradients. Leaves hold the mean gradient of the examples reaching them.
/// Throws Error(Training) when no candidate test can be generated at the root.
RegressionTree induce(const logic::PredicateSignature& target, std::span<const GradientExample> examples,
                      const logic::FactBase& facts, std::span<const ModeDeclaration> modes, const TreeParams& params,
                      CoverageCache* cache = nullptr);

}  // namespace relboost::rrt
