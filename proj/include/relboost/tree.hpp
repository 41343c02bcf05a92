#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relboost/fact_base.hpp"
#include "relboost/logic.hpp"
#include "relboost/solver.hpp"

namespace relboost::rrt {

/// Variable names used by trees: A, B, ..., Z, then V26, V27, ...
std::string variable_name(std::size_t index);

/// `target(A, B, ...)`, the head every tree and decision list binds to the example.
logic::Atom head_atom(const logic::PredicateSignature& target);

/// Relational regression tree over a flat node array; node 0 is the root.
///
/// An inner node holds a conjunction. An example reaches the true child when
/// the conjunction of every true-branch test on the path so far, plus this
/// node's test, is satisfiable under the head binding. Variables introduced
/// by a test stay shared with the tests below its true branch; a failed
/// test's variables are not visible on its false branch.
class RegressionTree {
 public:
  struct Node {
    std::vector<logic::Atom> test;  // empty for leaves
    std::int32_t on_true = -1;
    std::int32_t on_false = -1;
    double value = 0.0;  // leaves only

    bool is_leaf() const { return on_true < 0; }
  };

  /// Validates structure: children in range, every node reachable exactly
  /// once, inner tests non-empty, leaf values finite.
  RegressionTree(logic::PredicateSignature target, std::vector<Node> nodes);

  static RegressionTree leaf(logic::PredicateSignature target, double value);

  const logic::PredicateSignature& target() const { return target_; }
  const logic::Atom& head() const { return head_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& root() const { return nodes_.front(); }

  /// Inner nodes on the longest root-to-leaf path.
  int depth() const { return depth_; }
  std::size_t leaf_count() const;

 private:
  logic::PredicateSignature target_;
  logic::Atom head_;
  std::vector<Node> nodes_;
  int depth_ = 0;
};

/// One tree compiled against one fact base for repeated evaluation.
class CompiledTree {
 public:
  CompiledTree(const RegressionTree& tree, const logic::FactBase& facts);

  double evaluate(const logic::Atom& example) const;
  /// Index of the leaf node reached.
  std::size_t route(const logic::Atom& example) const;

 private:
  const RegressionTree* tree_;
  std::vector<std::unique_ptr<logic::CompiledQuery>> queries_;  // per inner node
};

/// Value of the leaf reached by `example`. Throws Error(Schema) when the
/// example is not a ground atom of the tree's target predicate. The example
/// itself is never used as evidence.
double evaluate(const RegressionTree& tree, const logic::Atom& example, const logic::FactBase& facts);

struct DecisionClause {
  logic::HornClause clause;  // weight mirrors value
  double value = 0.0;
};

/// Ordered clauses; the first clause whose body holds fires. The last body is
/// empty, so exactly one clause fires for every example.
using DecisionList = std::vector<DecisionClause>;

DecisionList to_decision_list(const RegressionTree& tree);

class CompiledDecisionList {
 public:
  CompiledDecisionList(const DecisionList& list, const logic::FactBase& facts);

  /// Index of the first clause whose body holds; list size if none.
  std::size_t fired(const logic::Atom& example) const;
  double evaluate(const logic::Atom& example) const;

 private:
  const DecisionList* list_;
  std::vector<std::unique_ptr<logic::CompiledQuery>> queries_;
};

double evaluate_list(const DecisionList& list, const logic::Atom& example, const logic::FactBase& facts);

std::string render_decision_list(const DecisionList& list);

/// Textual tree block: a `tree <nodes>` line followed by one line per node,
/// `<id> leaf <value>` or `<id> inner <true> <false> <literal>, ...`.
std::string serialize_tree(const RegressionTree& tree);
/// Parses the node lines of one block (without the `tree` header).
RegressionTree parse_tree(const logic::PredicateSignature& target, std::span<const std::string> node_lines,
                          std::size_t first_line = 1);

}  // namespace relboost::rrt
