#include "relboost/advice.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "relboost/error.hpp"
#include "relboost/text_format.hpp"

namespace relboost::advice {
namespace {

constexpr std::string_view kDefaultAdvice =
    "advice(+): pub(A, B) <= aut(A, Q), aut(R, Q), pub(R, B).\n"
    "advice(+): pub(A, B) <= aff(A, E), aff(F, E), pub(F, B).\n"
    "advice(+): pub(A, B) <= ven(A, C), ven(D, C), pub(D, B).\n"
    "advice(+): pub(A, B) <= ref(A, G), pub(G, B).\n"
    "advice(+): pub(A, B) <= ref(H, A), pub(H, B).\n"
    "advice(+): pub(A, B) <= ref(A, I), ref(J, I), pub(J, B).\n"
    "advice(+): pub(A, B) <= ref(K, A), ref(L, K), pub(L, B).\n"
    "advice(+): pub(A, B) <= ref(A, M), ref(M, N), pub(N, B).\n";

constexpr std::string_view kUnicodeMinus = "\xE2\x88\x92";

AdviceSet parse_lines(std::string_view text, const logic::Schema* schema, std::vector<std::string>* warnings) {
  AdviceSet out;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = logic::strip_comment(raw);
    if (line.empty()) continue;
    if (!line.starts_with("advice(")) throw ParseError(line_no, "expected 'advice(+):' or 'advice(-):'");
    line.remove_prefix(7);
    AdviceRule rule;
    if (line.starts_with("+")) {
      rule.preferred = Label::Positive;
      line.remove_prefix(1);
    } else if (line.starts_with("-")) {
      rule.preferred = Label::Negative;
      line.remove_prefix(1);
    } else if (line.starts_with(kUnicodeMinus)) {
      rule.preferred = Label::Negative;
      line.remove_prefix(kUnicodeMinus.size());
    } else {
      throw ParseError(line_no, "advice label must be + or -");
    }
    line = logic::trim(line);
    if (!line.starts_with("):")) throw ParseError(line_no, "expected '):'");
    line.remove_prefix(2);
    line = logic::trim(line);
    if (line.empty() || line.back() != '.') throw ParseError(line_no, "missing terminating '.'");
    rule.constraint = logic::parse_clause(line, line_no);
    if (rule.constraint.weight) throw ParseError(line_no, "advice rules carry no weight");
    for (const auto& arg : rule.constraint.head.args) {
      if (!arg.is_variable()) throw ParseError(line_no, "advice head arguments must be variables");
    }

    if (schema != nullptr) {
      try {
        schema->check(rule.constraint.head);
        for (const auto& atom : rule.constraint.body) schema->check(atom);
      } catch (const Error& e) {
        throw ParseError(line_no, e.what());
      }
    }
    if (warnings != nullptr) {
      std::map<Symbol, int> occurrences;
      for (const auto& atom : rule.constraint.body) {
        for (const auto& arg : atom.args) {
          if (arg.is_variable()) ++occurrences[arg.symbol()];
        }
      }
      for (const auto& arg : rule.constraint.head.args) occurrences.erase(arg.symbol());
      for (const auto& [variable, n] : occurrences) {
        if (n == 1) {
          warnings->push_back("line " + std::to_string(line_no) + ": variable " + variable.str() +
                              " occurs once in the body");
        }
      }
    }
    out.rules.push_back(std::move(rule));
  }
  return out;
}

std::vector<Symbol> head_parameters(const logic::Atom& head) {
  std::vector<Symbol> out;
  for (const auto& arg : head.args) out.push_back(arg.symbol());
  return out;
}

}  // namespace

AdviceSet parse_advice(std::string_view text, const logic::Schema& schema, std::vector<std::string>* warnings) {
  return parse_lines(text, &schema, warnings);
}

AdviceSet default_advice() { return parse_lines(kDefaultAdvice, nullptr, nullptr); }

std::string render_advice(const AdviceSet& advice) {
  std::string out;
  for (const auto& rule : advice.rules) {
    out += rule.preferred == Label::Positive ? "advice(+): " : "advice(-): ";
    out += logic::render(rule.constraint.head) + " <= " + logic::render(rule.constraint.body) + ".\n";
  }
  return out;
}

CompiledAdvice::CompiledAdvice(const AdviceSet& advice, const logic::FactBase& facts) : advice_(&advice) {
  for (const auto& rule : advice.rules) {
    queries_.push_back(std::make_unique<logic::CompiledQuery>(rule.constraint.body,
                                                              head_parameters(rule.constraint.head), facts));
  }
}

bool CompiledAdvice::satisfied(std::size_t rule, const logic::Atom& example) const {
  const logic::Atom& head = advice_->rules[rule].constraint.head;
  if (!example.is_ground()) return false;
  auto binding = logic::match(head, example);
  if (!binding) return false;
  std::vector<Symbol> values;
  for (const auto& arg : head.args) values.push_back(*binding->lookup(arg.symbol()));
  return queries_[rule]->holds(values, &example);
}

AdviceCounts CompiledAdvice::count(const logic::Atom& example) const {
  AdviceCounts counts;
  for (std::size_t i = 0; i < queries_.size(); ++i) {
    if (!satisfied(i, example)) continue;
    if (advice_->rules[i].preferred == Label::Positive) {
      ++counts.n_true;
    } else {
      ++counts.n_false;
    }
  }
  return counts;
}

bool CompiledAdvice::any(const logic::Atom& example) const {
  for (std::size_t i = 0; i < queries_.size(); ++i) {
    if (satisfied(i, example)) return true;
  }
  return false;
}

bool satisfied(const AdviceRule& rule, const logic::Atom& example, const logic::FactBase& facts) {
  AdviceSet single{{rule}};
  return CompiledAdvice(single, facts).satisfied(0, example);
}

AdviceCounts count(const AdviceSet& advice, const logic::Atom& example, const logic::FactBase& facts) {
  return CompiledAdvice(advice, facts).count(example);
}

CoverageReport coverage_report(const AdviceSet& advice, std::span<const LabeledExample> examples,
                               const logic::FactBase& facts, double margin) {
  CoverageReport report;
  report.rules.resize(advice.size());
  const CompiledAdvice compiled(advice, facts);
  for (const auto& example : examples) {
    if (example.label == Label::Unobserved) continue;
    const bool positive = example.label == Label::Positive;
    (positive ? report.positives : report.negatives) += 1;
    for (std::size_t i = 0; i < advice.size(); ++i) {
      if (!compiled.satisfied(i, example.atom)) continue;
      (positive ? report.rules[i].positives_covered : report.rules[i].negatives_covered) += 1;
    }
  }
  for (auto& rule : report.rules) {
    if (report.positives > 0) {
      rule.positive_percent = 100.0 * static_cast<double>(rule.positives_covered) / static_cast<double>(report.positives);
    }
    if (report.negatives > 0) {
      rule.negative_percent = 100.0 * static_cast<double>(rule.negatives_covered) / static_cast<double>(report.negatives);
    }
    rule.non_discriminative = report.positives + report.negatives > 0 &&
                              std::abs(rule.positive_percent - rule.negative_percent) <= margin;
  }
  return report;
}

std::string render_coverage(const AdviceSet& advice, const CoverageReport& report) {
  std::ostringstream out;
  out << "rule\tpos%\tneg%\tflag\tclause\n";
  for (std::size_t i = 0; i < report.rules.size(); ++i) {
    const auto& rule = report.rules[i];
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%zu\t%.2f\t%.2f\t", i + 1, rule.positive_percent, rule.negative_percent);
    out << buffer << (rule.non_discriminative ? "non-discriminative" : "-") << "\t"
        << logic::render(advice.rules[i].constraint.head) << " <= " << logic::render(advice.rules[i].constraint.body)
        << "\n";
  }
  out << "# positives=" << report.positives << " negatives=" << report.negatives << "\n";
  return out.str();
}

}  // namespace relboost::advice
