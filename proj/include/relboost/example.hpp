#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relboost/fact_base.hpp"
#include "relboost/logic.hpp"

namespace relboost {

enum class Label { Positive, Negative, Unobserved };

std::string_view to_string(Label label);
std::optional<Label> parse_label(std::string_view text);

/// A ground target atom with its label. `gradient` is per-iteration scratch
/// written by the boosting loop.
struct LabeledExample {
  logic::Atom atom;
  Label label = Label::Unobserved;
  double gradient = 0.0;

  friend bool operator==(const LabeledExample& a, const LabeledExample& b) {
    return a.atom == b.atom && a.label == b.label;
  }
};

/// Examples file: `pos: pub(p1, a1).`, `neg: ...`, `unobserved: ...` per
/// line, `%` comments. Atoms are validated against `schema`.
std::vector<LabeledExample> parse_examples(std::string_view text, const logic::Schema& schema);
std::string render_examples(std::span<const LabeledExample> examples);

/// Copy of `background` plus one target fact per positively labelled
/// example: the authorships the knowledge graph already knows.
logic::FactBase with_known_positives(const logic::FactBase& background, std::span<const LabeledExample> examples);

}  // namespace relboost
