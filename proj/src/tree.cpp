#include "relboost/tree.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "relboost/error.hpp"
#include "relboost/text_format.hpp"

namespace relboost::rrt {

using logic::Atom;
using logic::FactBase;

std::string variable_name(std::size_t index) {
  if (index < 26) return std::string(1, static_cast<char>('A' + index));
  return "V" + std::to_string(index);
}

Atom head_atom(const logic::PredicateSignature& target) {
  Atom head;
  head.predicate = target.name;
  for (std::size_t i = 0; i < target.arity(); ++i) head.args.push_back(logic::Term::variable(variable_name(i)));
  return head;
}

namespace {

std::vector<Symbol> head_variables(const Atom& head) {
  std::vector<Symbol> out;
  for (const auto& arg : head.args) out.push_back(arg.symbol());
  return out;
}

// Head values for `example`, or throws when it is not a ground target atom.
std::vector<Symbol> bind_head(const Atom& head, const Atom& example) {
  if (example.key() != head.key() || !example.is_ground()) {
    throw Error(ErrorCategory::Schema,
                "example " + logic::render(example) + " is not a ground " + head.predicate.str() + " atom");
  }
  auto binding = logic::match(head, example);
  if (!binding) throw Error(ErrorCategory::Schema, "example " + logic::render(example) + " does not match head");
  std::vector<Symbol> values;
  for (const auto& arg : head.args) values.push_back(arg.is_variable() ? *binding->lookup(arg.symbol()) : arg.symbol());
  return values;
}

}  // namespace

RegressionTree::RegressionTree(logic::PredicateSignature target, std::vector<Node> nodes)
    : target_(std::move(target)), head_(head_atom(target_)), nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw Error(ErrorCategory::Training, "tree has no nodes");
  std::vector<int> seen(nodes_.size(), 0);
  std::function<int(std::int32_t)> visit = [&](std::int32_t id) -> int {
    if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size()) {
      throw Error(ErrorCategory::Training, "tree child index out of range");
    }
    if (seen[id]++ > 0) throw Error(ErrorCategory::Training, "tree node reached twice");
    const Node& node = nodes_[id];
    if (node.is_leaf()) {
      if (!std::isfinite(node.value)) throw Error(ErrorCategory::Training, "non-finite leaf value");
      if (!node.test.empty() || node.on_false >= 0) throw Error(ErrorCategory::Training, "malformed leaf");
      return 0;
    }
    if (node.test.empty()) throw Error(ErrorCategory::Training, "inner node without a test");
    return 1 + std::max(visit(node.on_true), visit(node.on_false));
  };
  depth_ = visit(0);
  for (int count : seen) {
    if (count == 0) throw Error(ErrorCategory::Training, "unreachable tree node");
  }
}

RegressionTree RegressionTree::leaf(logic::PredicateSignature target, double value) {
  Node node;
  node.value = value;
  return RegressionTree(std::move(target), {node});
}

std::size_t RegressionTree::leaf_count() const {
  std::size_t n = 0;
  for (const auto& node : nodes_) n += node.is_leaf() ? 1 : 0;
  return n;
}

CompiledTree::CompiledTree(const RegressionTree& tree, const FactBase& facts) : tree_(&tree) {
  const auto& nodes = tree.nodes();
  queries_.resize(nodes.size());
  const std::vector<Symbol> params = head_variables(tree.head());
  std::vector<Atom> path;
  std::function<void(std::int32_t)> visit = [&](std::int32_t id) {
    const auto& node = nodes[id];
    if (node.is_leaf()) return;
    const std::size_t mark = path.size();
    path.insert(path.end(), node.test.begin(), node.test.end());
    queries_[id] = std::make_unique<logic::CompiledQuery>(path, params, facts);
    visit(node.on_true);
    path.resize(mark);
    visit(node.on_false);
  };
  visit(0);
}

std::size_t CompiledTree::route(const Atom& example) const {
  const std::vector<Symbol> values = bind_head(tree_->head(), example);
  const auto& nodes = tree_->nodes();
  std::int32_t id = 0;
  while (!nodes[id].is_leaf()) {
    id = queries_[id]->holds(values, &example) ? nodes[id].on_true : nodes[id].on_false;
  }
  return static_cast<std::size_t>(id);
}

double CompiledTree::evaluate(const Atom& example) const { return tree_->nodes()[route(example)].value; }

double evaluate(const RegressionTree& tree, const Atom& example, const FactBase& facts) {
  return CompiledTree(tree, facts).evaluate(example);
}

DecisionList to_decision_list(const RegressionTree& tree) {
  DecisionList out;
  std::vector<Atom> path;
  std::function<void(std::int32_t)> visit = [&](std::int32_t id) {
    const auto& node = tree.nodes()[id];
    if (node.is_leaf()) {
      DecisionClause clause;
      clause.clause.head = tree.head();
      clause.clause.body = path;
      clause.clause.weight = node.value;
      clause.value = node.value;
      out.push_back(std::move(clause));
      return;
    }
    const std::size_t mark = path.size();
    path.insert(path.end(), node.test.begin(), node.test.end());
    visit(node.on_true);
    path.resize(mark);
    visit(node.on_false);
  };
  visit(0);
  return out;
}

CompiledDecisionList::CompiledDecisionList(const DecisionList& list, const FactBase& facts) : list_(&list) {
  for (const auto& entry : list) {
    const std::vector<Symbol> params = head_variables(entry.clause.head);
    queries_.push_back(std::make_unique<logic::CompiledQuery>(entry.clause.body, params, facts));
  }
}

std::size_t CompiledDecisionList::fired(const Atom& example) const {
  for (std::size_t i = 0; i < list_->size(); ++i) {
    const Atom& head = (*list_)[i].clause.head;
    if (example.key() != head.key()) continue;
    if (!logic::match(head, example)) continue;
    if (queries_[i]->holds(bind_head(head, example), &example)) return i;
  }
  return list_->size();
}

double CompiledDecisionList::evaluate(const Atom& example) const {
  const std::size_t index = fired(example);
  if (index == list_->size()) {
    throw Error(ErrorCategory::Schema, "no clause fires for " + logic::render(example));
  }
  return (*list_)[index].value;
}

double evaluate_list(const DecisionList& list, const Atom& example, const FactBase& facts) {
  return CompiledDecisionList(list, facts).evaluate(example);
}

std::string render_decision_list(const DecisionList& list) {
  std::string out;
  for (const auto& entry : list) out += logic::render_clause(entry.clause) + "\n";
  return out;
}

std::string serialize_tree(const RegressionTree& tree) {
  std::ostringstream out;
  out << "tree " << tree.nodes().size() << "\n";
  for (std::size_t i = 0; i < tree.nodes().size(); ++i) {
    const auto& node = tree.nodes()[i];
    if (node.is_leaf()) {
      out << i << " leaf " << logic::format_double(node.value) << "\n";
    } else {
      out << i << " inner " << node.on_true << " " << node.on_false << " " << logic::render(node.test) << "\n";
    }
  }
  return out.str();
}

RegressionTree parse_tree(const logic::PredicateSignature& target, std::span<const std::string> node_lines,
                          std::size_t first_line) {
  std::vector<RegressionTree::Node> nodes;
  for (std::size_t i = 0; i < node_lines.size(); ++i) {
    const std::size_t line = first_line + i;
    std::istringstream in(node_lines[i]);
    std::size_t id = 0;
    std::string kind;
    if (!(in >> id >> kind) || id != i) throw ParseError(line, "expected node " + std::to_string(i));
    RegressionTree::Node node;
    if (kind == "leaf") {
      std::string value;
      in >> value;
      node.value = logic::parse_double(value, line);
    } else if (kind == "inner") {
      if (!(in >> node.on_true >> node.on_false)) throw ParseError(line, "expected child indices");
      std::string rest;
      std::getline(in, rest);
      node.test = logic::parse_conjunction(rest, line);
      if (node.test.empty()) throw ParseError(line, "inner node without literals");
    } else {
      throw ParseError(line, "unknown node kind '" + kind + "'");
    }
    nodes.push_back(std::move(node));
  }
  try {
    return RegressionTree(target, std::move(nodes));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(first_line, e.what());
  }
}

}  // namespace relboost::rrt
