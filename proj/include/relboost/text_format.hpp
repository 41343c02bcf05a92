#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "relboost/fact_base.hpp"
#include "relboost/logic.hpp"

namespace relboost::logic {

/// Parses one atom such as `venue(p1, "Int. Conf. ML")`. Unquoted arguments
/// starting with an upper-case letter or `_` are variables; everything else
/// is a constant and is normalized with normalize_constant().
Atom parse_atom(std::string_view text, std::size_t line = 1);

/// Parses `a(..), b(..)`; `,` and `∧` both separate literals. An empty or
/// blank string yields an empty conjunction.
std::vector<Atom> parse_conjunction(std::string_view text, std::size_t line = 1);

/// Parses `head <= body` (also `:-` or `⇐`), optionally prefixed by a weight
/// and optionally terminated by `.`.
HornClause parse_clause(std::string_view text, std::size_t line = 1);

/// Schema file: one `name(tag, ..., tag).` per line, `%` comments.
Schema parse_schema(std::string_view text);

/// Fact file: one ground atom per line, `%` comments. Facts are validated
/// against `schema`.
FactBase parse_facts(std::string_view text, const Schema& schema);
/// Adds the facts of `text` to an existing fact base.
void load_facts(std::string_view text, FactBase& facts);

std::string render_schema(const Schema& schema);
std::string render_facts(const FactBase& facts);
/// Weighted clause in the decision-list layout: `0.856 pub(A, B) ⇐ ref(A, C) ∧ pub(C, B).`
std::string render_clause(const HornClause& clause);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);
double parse_double(std::string_view text, std::size_t line = 1);

/// Strips a `%` comment and surrounding whitespace; quotes are respected.
std::string_view strip_comment(std::string_view line);
std::string_view trim(std::string_view text);

}  // namespace relboost::logic
