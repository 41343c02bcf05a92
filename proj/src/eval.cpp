#include "relboost/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "relboost/error.hpp"
#include "relboost/text_format.hpp"

namespace relboost::eval {
namespace {

struct Point {
  double score;
  bool positive;
};

std::vector<Point> observed(std::span<const ScoredExample> scored) {
  std::vector<Point> out;
  for (const auto& s : scored) {
    if (s.label == Label::Unobserved) continue;
    if (!std::isfinite(s.score)) throw Error(ErrorCategory::Metric, "non-finite score for " + logic::render(s.atom));
    out.push_back({s.score, s.label == Label::Positive});
  }
  std::stable_sort(out.begin(), out.end(), [](const Point& a, const Point& b) { return a.score > b.score; });
  return out;
}

nlohmann::json metrics_json(const Metrics& m) { return {{"auc_roc", m.auc_roc}, {"auc_pr", m.auc_pr}}; }

}  // namespace

double auc_roc(std::span<const ScoredExample> scored) {
  const std::vector<Point> points = observed(scored);
  double positives = 0, negatives = 0;
  for (const auto& p : points) (p.positive ? positives : negatives) += 1;
  if (positives == 0 || negatives == 0) {
    throw Error(ErrorCategory::Metric, "AUC-ROC needs at least one positive and one negative example");
  }
  // Walk groups from the highest score; a positive beats every negative in
  // later groups and ties with the negatives of its own group.
  double wins = 0.0, negatives_below = negatives;
  for (std::size_t i = 0; i < points.size();) {
    std::size_t j = i;
    double group_pos = 0, group_neg = 0;
    while (j < points.size() && points[j].score == points[i].score) {
      (points[j].positive ? group_pos : group_neg) += 1;
      ++j;
    }
    negatives_below -= group_neg;
    wins += group_pos * (negatives_below + 0.5 * group_neg);
    i = j;
  }
  return wins / (positives * negatives);
}

double auc_pr(std::span<const ScoredExample> scored) {
  const std::vector<Point> points = observed(scored);
  double positives = 0;
  for (const auto& p : points) positives += p.positive ? 1 : 0;
  if (positives == 0) throw Error(ErrorCategory::Metric, "AUC-PR needs at least one positive example");
  double tp = 0, fp = 0, area = 0, recall = 0;
  for (std::size_t i = 0; i < points.size();) {
    std::size_t j = i;
    while (j < points.size() && points[j].score == points[i].score) {
      (points[j].positive ? tp : fp) += 1;
      ++j;
    }
    const double next_recall = tp / positives;
    area += (next_recall - recall) * (tp / (tp + fp));
    recall = next_recall;
    i = j;
  }
  return area;
}

std::vector<ScoredExample> score(const boosting::BoostedModel& model, std::span<const LabeledExample> examples,
                                 const logic::FactBase& facts) {
  const boosting::CompiledModel compiled(model, facts);
  std::vector<ScoredExample> out;
  out.reserve(examples.size());
  for (const auto& example : examples) out.push_back({example.atom, example.label, compiled.probability(example.atom)});
  return out;
}

Metrics evaluate(std::span<const ScoredExample> scored) { return {auc_roc(scored), auc_pr(scored)}; }

Metrics evaluate(const boosting::BoostedModel& model, std::span<const LabeledExample> examples,
                 const logic::FactBase& facts) {
  return evaluate(score(model, examples, facts));
}

std::vector<double> parse_grid(std::string_view text) {
  text = logic::trim(text);
  std::vector<double> out;
  auto round9 = [](double v) { return std::round(v * 1e9) / 1e9; };
  if (text.find(':') != std::string_view::npos) {
    std::vector<double> parts;
    std::size_t start = 0;
    for (;;) {
      const std::size_t colon = text.find(':', start);
      parts.push_back(logic::parse_double(logic::trim(text.substr(start, colon == text.npos ? text.npos : colon - start))));
      if (colon == text.npos) break;
      start = colon + 1;
    }
    if (parts.size() != 3) throw Error(ErrorCategory::Config, "grid must be lo:hi:step");
    const double lo = parts[0], hi = parts[1], step = parts[2];
    if (!(step > 0.0) || hi < lo) throw Error(ErrorCategory::Config, "grid needs step > 0 and hi >= lo");
    for (std::size_t i = 0;; ++i) {
      const double v = round9(lo + static_cast<double>(i) * step);
      if (v > hi + 1e-9) break;
      out.push_back(v);
    }
  } else {
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = text.find(',', start);
      const auto item = logic::trim(text.substr(start, comma == text.npos ? text.npos : comma - start));
      if (!item.empty()) out.push_back(logic::parse_double(item));
      if (comma == text.npos) break;
      start = comma + 1;
    }
  }
  if (out.empty()) throw Error(ErrorCategory::Config, "empty alpha grid");
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(out[i] >= 0.0 && out[i] <= 1.0)) throw Error(ErrorCategory::Config, "alpha values must lie in [0, 1]");
    if (i > 0 && !(out[i] > out[i - 1])) throw Error(ErrorCategory::Config, "alpha values must increase strictly");
  }
  return out;
}

SweepResult sweep_alpha(const boosting::TrainingConfig& config, std::span<const double> grid,
                        const SweepInputs& inputs, const std::function<void(const SweepPoint&)>& on_point) {
  if (grid.empty()) throw Error(ErrorCategory::Config, "empty alpha grid");
  if (inputs.facts == nullptr || inputs.advice == nullptr) throw Error(ErrorCategory::Config, "sweep inputs incomplete");
  SweepResult result;

  auto run = [&](double alpha, const advice::AdviceSet& advice) {
    boosting::TrainingConfig c = config;
    c.alpha = alpha;
    try {
      const auto model = boosting::train(inputs.train, *inputs.facts, inputs.modes, advice, c, inputs.target);
      return std::pair(evaluate(model, inputs.validation, *inputs.facts), evaluate(model, inputs.test, *inputs.facts));
    } catch (const Error& e) {
      throw Error(e.category(), "alpha " + logic::format_double(alpha) + ": " + e.what());
    }
  };

  const advice::AdviceSet none;
  std::tie(result.baseline_validation, result.baseline_test) = run(1.0, none);
  for (double alpha : grid) {
    SweepPoint point{alpha, {}, {}};
    std::tie(point.validation, point.test) = run(alpha, *inputs.advice);
    if (on_point) on_point(point);
    result.points.push_back(point);
    if (point.validation.auc_roc > result.points[result.best].validation.auc_roc) result.best = result.points.size() - 1;
  }
  return result;
}

std::string render_sweep(const SweepResult& result) {
  std::string out = "alpha\tval_roc\tval_pr\ttest_roc\ttest_pr\n";
  char buffer[160];
  for (const auto& p : result.points) {
    std::snprintf(buffer, sizeof(buffer), "%.2f\t%.4f\t%.4f\t%.4f\t%.4f\n", p.alpha, p.validation.auc_roc,
                  p.validation.auc_pr, p.test.auc_roc, p.test.auc_pr);
    out += buffer;
  }
  std::snprintf(buffer, sizeof(buffer), "baseline\t%.4f\t%.4f\t%.4f\t%.4f\n", result.baseline_validation.auc_roc,
                result.baseline_validation.auc_pr, result.baseline_test.auc_roc, result.baseline_test.auc_pr);
  out += buffer;
  std::snprintf(buffer, sizeof(buffer), "# best alpha %.2f\n", result.best_point().alpha);
  out += buffer;
  return out;
}

std::string sweep_json(const SweepResult& result) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : result.points) {
    points.push_back({{"alpha", p.alpha}, {"validation", metrics_json(p.validation)}, {"test", metrics_json(p.test)}});
  }
  nlohmann::json out = {
      {"points", points},
      {"best_alpha", result.best_point().alpha},
      {"baseline", {{"validation", metrics_json(result.baseline_validation)}, {"test", metrics_json(result.baseline_test)}}},
  };
  return out.dump(2) + "\n";
}

}  // namespace relboost::eval
