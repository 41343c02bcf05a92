#include "relboost/example.hpp"

#include <sstream>

#include "relboost/error.hpp"
#include "relboost/text_format.hpp"

namespace relboost {

std::string_view to_string(Label label) {
  switch (label) {
    case Label::Positive: return "pos";
    case Label::Negative: return "neg";
    case Label::Unobserved: return "unobserved";
  }
  return "?";
}

std::optional<Label> parse_label(std::string_view text) {
  if (text == "pos") return Label::Positive;
  if (text == "neg") return Label::Negative;
  if (text == "unobserved") return Label::Unobserved;
  return std::nullopt;
}

std::vector<LabeledExample> parse_examples(std::string_view text, const logic::Schema& schema) {
  std::vector<LabeledExample> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = logic::strip_comment(raw);
    if (line.empty()) continue;
    const std::size_t colon = line.find(':');
    if (colon == std::string_view::npos) throw ParseError(line_no, "expected 'pos:', 'neg:' or 'unobserved:'");
    const auto label = parse_label(logic::trim(line.substr(0, colon)));
    if (!label) throw ParseError(line_no, "unknown label '" + std::string(line.substr(0, colon)) + "'");
    std::string_view body = logic::trim(line.substr(colon + 1));
    if (body.empty() || body.back() != '.') throw ParseError(line_no, "missing terminating '.'");
    body.remove_suffix(1);
    LabeledExample example{logic::parse_atom(body, line_no), *label, 0.0};
    if (!example.atom.is_ground()) throw ParseError(line_no, "variable in example");
    try {
      schema.check(example.atom);
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
    out.push_back(std::move(example));
  }
  return out;
}

std::string render_examples(std::span<const LabeledExample> examples) {
  std::string out;
  for (const auto& example : examples) {
    out += std::string(to_string(example.label)) + ": " + logic::render(example.atom) + ".\n";
  }
  return out;
}

logic::FactBase with_known_positives(const logic::FactBase& background, std::span<const LabeledExample> examples) {
  logic::FactBase facts = background;
  for (const auto& example : examples) {
    if (example.label == Label::Positive) facts.add(example.atom);
  }
  return facts;
}

}  // namespace relboost
