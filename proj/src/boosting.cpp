#include "relboost/boosting.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "relboost/error.hpp"
#include "relboost/text_format.hpp"

namespace relboost::boosting {

std::string_view to_string(AdviceMode mode) {
  return mode == AdviceMode::Indicator ? "indicator" : "signed-count";
}

AdviceMode parse_advice_mode(std::string_view text) {
  if (text == "indicator") return AdviceMode::Indicator;
  if (text == "signed-count") return AdviceMode::SignedCount;
  throw Error(ErrorCategory::Config, "unknown advice mode '" + std::string(text) + "'");
}

void TrainingConfig::validate() const {
  if (num_trees < 1) throw Error(ErrorCategory::Config, "num_trees must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCategory::Config, "alpha must lie in [0, 1]");
  if (!std::isfinite(psi0)) throw Error(ErrorCategory::Config, "psi0 must be finite");
  tree.validate();
}

BoostedModel::BoostedModel(logic::PredicateSignature target, double psi0, TrainingConfig config)
    : target_(std::move(target)), psi0_(psi0), config_(config) {}

void BoostedModel::add_tree(rrt::RegressionTree tree) {
  if (!(tree.target() == target_)) throw Error(ErrorCategory::Training, "tree target differs from model target");
  trees_.push_back(std::move(tree));
}

double sigmoid(double psi) {
  constexpr double kLow = std::numeric_limits<double>::denorm_min();
  const double high = std::nextafter(1.0, 0.0);
  double p;
  if (psi >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-psi));
  } else {
    const double e = std::exp(psi);
    p = e / (1.0 + e);
  }
  return std::min(std::max(p, kLow), high);
}

double log_likelihood(bool positive, double psi) {
  // log(1 + e^psi) without overflow.
  const double softplus = psi > 0.0 ? psi + std::log1p(std::exp(-psi)) : std::log1p(std::exp(psi));
  return (positive ? psi : 0.0) - softplus;
}

CompiledModel::CompiledModel(const BoostedModel& model, const logic::FactBase& facts) : model_(&model) {
  trees_.reserve(model.trees().size());
  for (const auto& tree : model.trees()) trees_.emplace_back(tree, facts);
}

double CompiledModel::psi(const logic::Atom& example) const {
  double value = model_->psi0();
  for (const auto& tree : trees_) value += tree.evaluate(example);
  return value;
}

std::vector<double> CompiledModel::tree_values(const logic::Atom& example) const {
  std::vector<double> out;
  out.reserve(trees_.size());
  for (const auto& tree : trees_) out.push_back(tree.evaluate(example));
  return out;
}

double psi(const BoostedModel& model, const logic::Atom& example, const logic::FactBase& facts) {
  return CompiledModel(model, facts).psi(example);
}

double probability(const BoostedModel& model, const logic::Atom& example, const logic::FactBase& facts) {
  return sigmoid(psi(model, example, facts));
}

double data_gradient(Label label, double probability) {
  if (label == Label::Unobserved) throw Error(ErrorCategory::Training, "data gradient of an unobserved example");
  return (label == Label::Positive ? 1.0 : 0.0) - probability;
}

double data_gradient(const LabeledExample& example, const BoostedModel& model, const logic::FactBase& facts) {
  return data_gradient(example.label, probability(model, example.atom, facts));
}

double advice_gradient(Label label, double probability, const advice::AdviceCounts& counts, double alpha,
                       AdviceMode mode) {
  const double data = label == Label::Unobserved ? 0.0 : data_gradient(label, probability);
  const double advice_term = mode == AdviceMode::Indicator ? (counts.n_true + counts.n_false > 0 ? 1.0 : 0.0)
                                                           : static_cast<double>(counts.n_true - counts.n_false);
  return alpha * data + (1.0 - alpha) * advice_term;
}

double advice_gradient(const LabeledExample& example, const BoostedModel& model, const logic::FactBase& facts,
                       const advice::AdviceSet& advice, double alpha, AdviceMode mode) {
  const double p = probability(model, example.atom, facts);
  return advice_gradient(example.label, p, advice::count(advice, example.atom, facts), alpha, mode);
}

BoostedModel train(std::span<const LabeledExample> examples, const logic::FactBase& facts,
                   std::span<const rrt::ModeDeclaration> modes, const advice::AdviceSet& advice,
                   const TrainingConfig& config, const logic::PredicateSignature& target,
                   const std::function<void(const IterationReport&)>& on_iteration) {
  config.validate();
  const bool advice_active = config.alpha < 1.0 && !advice.empty();

  std::vector<std::size_t> used;
  bool any_labelled = false;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const bool observed = examples[i].label != Label::Unobserved;
    any_labelled = any_labelled || observed;
    if (observed || advice_active) used.push_back(i);
  }
  if (!any_labelled) throw Error(ErrorCategory::Training, "training needs at least one labelled example");

  std::vector<advice::AdviceCounts> counts(used.size());
  if (advice_active) {
    const advice::CompiledAdvice compiled(advice, facts);
    for (std::size_t j = 0; j < used.size(); ++j) counts[j] = compiled.count(examples[used[j]].atom);
  }

  std::vector<rrt::GradientExample> batch;
  batch.reserve(used.size());
  for (std::size_t i : used) batch.push_back({examples[i].atom, 0.0});
  std::vector<double> psi_values(used.size(), config.psi0);

  BoostedModel model(target, config.psi0, config);
  rrt::CoverageCache cache;
  for (int k = 1; k <= config.num_trees; ++k) {
    double abs_sum = 0.0;
    for (std::size_t j = 0; j < used.size(); ++j) {
      const Label label = examples[used[j]].label;
      const double p = sigmoid(psi_values[j]);
      batch[j].gradient = advice_active ? advice_gradient(label, p, counts[j], config.alpha, config.advice_mode)
                                        : data_gradient(label, p);
      abs_sum += std::abs(batch[j].gradient);
    }
    if (on_iteration) on_iteration({k, abs_sum / static_cast<double>(used.size()), used.size()});

    rrt::RegressionTree tree = rrt::induce(target, batch, facts, modes, config.tree, &cache);
    {
      const rrt::CompiledTree compiled(tree, facts);
      for (std::size_t j = 0; j < used.size(); ++j) psi_values[j] += compiled.evaluate(batch[j].atom);
    }
    model.add_tree(std::move(tree));
  }
  return model;
}

std::vector<std::pair<logic::Atom, double>> predict(const BoostedModel& model, std::span<const LabeledExample> examples,
                                                    const logic::FactBase& facts) {
  const CompiledModel compiled(model, facts);
  std::vector<std::pair<logic::Atom, double>> out;
  out.reserve(examples.size());
  for (const auto& example : examples) out.emplace_back(example.atom, compiled.probability(example.atom));
  return out;
}

std::string serialize(const BoostedModel& model) {
  const TrainingConfig& c = model.config();
  std::ostringstream out;
  out << "relboost-model 1\n";
  out << "target " << logic::render(model.target()) << "\n";
  out << "psi0 " << logic::format_double(model.psi0()) << "\n";
  out << "trees " << model.trees().size() << "\n";
  out << "alpha " << logic::format_double(c.alpha) << "\n";
  out << "seed " << c.seed << "\n";
  out << "advice_mode " << to_string(c.advice_mode) << "\n";
  out << "max_depth " << c.tree.max_depth << "\n";
  out << "max_literals_per_node " << c.tree.max_literals_per_node << "\n";
  out << "min_examples_per_leaf " << c.tree.min_examples_per_leaf << "\n";
  out << "tolerance " << logic::format_double(c.tree.tolerance) << "\n";
  out << "max_constants " << c.tree.max_constants << "\n";
  out << "max_candidates " << c.tree.max_candidates << "\n";
  for (const auto& tree : model.trees()) out << rrt::serialize_tree(tree);
  return out.str();
}

BoostedModel parse_model(std::string_view text) {
  std::vector<std::string> lines;
  {
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
  }
  std::size_t i = 0;
  auto next_nonblank = [&]() {
    while (i < lines.size() && logic::strip_comment(lines[i]).empty()) ++i;
  };
  next_nonblank();
  if (i >= lines.size() || logic::trim(lines[i]) != "relboost-model 1") {
    throw ParseError(i + 1, "missing 'relboost-model 1' header");
  }
  ++i;

  std::map<std::string, std::pair<std::string, std::size_t>> header;
  for (next_nonblank(); i < lines.size(); ++i, next_nonblank()) {
    if (i >= lines.size()) break;
    const std::string_view line = logic::strip_comment(lines[i]);
    const std::size_t space = line.find(' ');
    const std::string key(line.substr(0, space));
    if (key == "tree") break;
    if (space == std::string_view::npos) throw ParseError(i + 1, "expected 'key value'");
    header[key] = {std::string(logic::trim(line.substr(space + 1))), i + 1};
  }
  auto field = [&](const std::string& key) -> const std::pair<std::string, std::size_t>& {
    auto it = header.find(key);
    if (it == header.end()) throw ParseError(i + 1, "model header lacks '" + key + "'");
    return it->second;
  };
  auto integer = [&](const std::string& key) -> long long {
    const auto& [value, line] = field(key);
    try {
      std::size_t used = 0;
      const long long parsed = std::stoll(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      return parsed;
    } catch (const std::exception&) {
      throw ParseError(line, "bad integer for '" + key + "'");
    }
  };

  const auto& [target_text, target_line] = field("target");
  const logic::Atom target_atom = logic::parse_atom(target_text, target_line);
  logic::PredicateSignature target{target_atom.predicate, {}};
  for (const auto& arg : target_atom.args) {
    auto type = arg.is_constant() ? logic::parse_arg_type(arg.symbol().str()) : std::nullopt;
    if (!type) throw ParseError(target_line, "bad target type tag");
    target.arg_types.push_back(*type);
  }

  TrainingConfig config;
  config.alpha = logic::parse_double(field("alpha").first, field("alpha").second);
  config.seed = static_cast<std::uint64_t>(std::stoull(field("seed").first));
  config.advice_mode = parse_advice_mode(field("advice_mode").first);
  config.tree.max_depth = static_cast<int>(integer("max_depth"));
  config.tree.max_literals_per_node = static_cast<int>(integer("max_literals_per_node"));
  config.tree.min_examples_per_leaf = static_cast<std::size_t>(integer("min_examples_per_leaf"));
  config.tree.tolerance = logic::parse_double(field("tolerance").first, field("tolerance").second);
  config.tree.max_constants = static_cast<std::size_t>(integer("max_constants"));
  config.tree.max_candidates = static_cast<std::size_t>(integer("max_candidates"));
  const double psi0 = logic::parse_double(field("psi0").first, field("psi0").second);
  config.psi0 = psi0;
  const long long tree_count = integer("trees");
  config.num_trees = static_cast<int>(tree_count);

  BoostedModel model(target, psi0, config);
  while (i < lines.size()) {
    next_nonblank();
    if (i >= lines.size()) break;
    std::istringstream head(lines[i]);
    std::string keyword;
    std::size_t node_count = 0;
    if (!(head >> keyword >> node_count) || keyword != "tree" || node_count == 0) {
      throw ParseError(i + 1, "expected 'tree <nodes>'");
    }
    if (i + node_count >= lines.size()) throw ParseError(i + 1, "truncated tree block");
    std::vector<std::string> node_lines(lines.begin() + static_cast<std::ptrdiff_t>(i + 1),
                                        lines.begin() + static_cast<std::ptrdiff_t>(i + 1 + node_count));
    model.add_tree(rrt::parse_tree(target, node_lines, i + 2));
    i += node_count + 1;
  }
  if (static_cast<long long>(model.trees().size()) != tree_count) {
    throw ParseError(lines.size(), "model declares " + std::to_string(tree_count) + " trees but contains " +
                                       std::to_string(model.trees().size()));
  }
  return model;
}

}  // namespace relboost::boosting
