#include "relboost/text_format.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <system_error>

#include "relboost/error.hpp"

namespace relboost::logic {
namespace {

constexpr std::string_view kAnd = "\xE2\x88\xA7";      // ∧
constexpr std::string_view kImplied = "\xE2\x87\x90";  // ⇐

bool is_identifier(std::string_view text) {
  if (text.empty()) return false;
  const auto first = static_cast<unsigned char>(text.front());
  if (!std::isalpha(first) && first != '_') return false;
  for (char c : text) {
    const auto uc = static_cast<unsigned char>(c);
    if (!std::isalnum(uc) && c != '_') return false;
  }
  return true;
}

// Splits at depth-0 `,` and `∧`, outside double quotes.
std::vector<std::string_view> split_literals(std::string_view text, std::size_t line) {
  std::vector<std::string_view> parts;
  int depth = 0;
  bool quoted = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        quoted = false;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
    } else if (c == '(') {
      ++depth;
    } else if (c == ')') {
      if (--depth < 0) throw ParseError(line, "unbalanced ')'");
    } else if (depth == 0 && c == ',') {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    } else if (depth == 0 && text.substr(i, kAnd.size()) == kAnd) {
      parts.push_back(text.substr(start, i - start));
      start = i + kAnd.size();
      i += kAnd.size() - 1;
    }
  }
  if (quoted) throw ParseError(line, "unterminated string");
  if (depth != 0) throw ParseError(line, "unbalanced '('");
  parts.push_back(text.substr(start));
  return parts;
}

Term parse_term(std::string_view text, std::size_t line) {
  text = trim(text);
  if (text.empty()) throw ParseError(line, "empty argument");
  if (text.front() == '"') {
    if (text.size() < 2 || text.back() != '"') throw ParseError(line, "bad string literal " + std::string(text));
    std::string raw;
    for (std::size_t i = 1; i + 1 < text.size(); ++i) {
      if (text[i] == '\\' && i + 2 < text.size()) ++i;
      raw.push_back(text[i]);
    }
    const std::string normalized = normalize_constant(raw);
    if (normalized.empty()) throw ParseError(line, "empty constant");
    return Term::constant(Symbol::intern(normalized));
  }
  const auto first = static_cast<unsigned char>(text.front());
  if (std::isupper(first) || first == '_') {
    if (!is_identifier(text)) throw ParseError(line, "bad variable name " + std::string(text));
    return Term::variable(text);
  }
  for (char c : text) {
    if (c == '(' || c == ')' || c == '"') throw ParseError(line, "bad constant " + std::string(text));
  }
  return Term::constant(Symbol::intern(normalize_constant(text)));
}

// Position of the top-level implication arrow and its width.
std::pair<std::size_t, std::size_t> find_arrow(std::string_view text) {
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '"') quoted = !quoted;
    if (quoted) continue;
    if (text.substr(i, 2) == "<=" || text.substr(i, 2) == ":-") return {i, 2};
    if (text.substr(i, kImplied.size()) == kImplied) return {i, kImplied.size()};
  }
  return {std::string_view::npos, 0};
}

std::string_view strip_period(std::string_view text, std::size_t line, bool required) {
  text = trim(text);
  if (!text.empty() && text.back() == '.') return trim(text.substr(0, text.size() - 1));
  if (required) throw ParseError(line, "missing terminating '.'");
  return text;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? text.size() - start : end - start);
    ++line_no;
    const std::string_view content = strip_comment(line);
    if (!content.empty()) fn(content, line_no);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
}

}  // namespace

std::string_view trim(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  return text;
}

std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (!quoted && line[i] == '%') return trim(line.substr(0, i));
  }
  return trim(line);
}

Atom parse_atom(std::string_view text, std::size_t line) {
  text = trim(text);
  const std::size_t open = text.find('(');
  if (open == std::string_view::npos || text.back() != ')') {
    throw ParseError(line, "expected name(args): " + std::string(text));
  }
  const std::string_view name = trim(text.substr(0, open));
  if (!is_identifier(name) || std::isupper(static_cast<unsigned char>(name.front()))) {
    throw ParseError(line, "bad predicate name '" + std::string(name) + "'");
  }
  const std::string_view inner = text.substr(open + 1, text.size() - open - 2);
  Atom atom;
  atom.predicate = Symbol::intern(name);
  if (trim(inner).empty()) throw ParseError(line, "predicate " + std::string(name) + " has no arguments");
  for (std::string_view part : split_literals(inner, line)) atom.args.push_back(parse_term(part, line));
  return atom;
}

std::vector<Atom> parse_conjunction(std::string_view text, std::size_t line) {
  std::vector<Atom> out;
  text = trim(text);
  if (text.empty()) return out;
  for (std::string_view part : split_literals(text, line)) out.push_back(parse_atom(part, line));
  return out;
}

HornClause parse_clause(std::string_view text, std::size_t line) {
  text = strip_period(text, line, false);
  HornClause clause;
  // Optional leading weight.
  const std::size_t space = text.find_first_of(" \t");
  if (space != std::string_view::npos) {
    const std::string_view first = text.substr(0, space);
    double weight = 0.0;
    auto [ptr, ec] = std::from_chars(first.data(), first.data() + first.size(), weight);
    if (ec == std::errc() && ptr == first.data() + first.size()) {
      clause.weight = weight;
      text = trim(text.substr(space));
    }
  }
  const auto [arrow, width] = find_arrow(text);
  if (arrow == std::string_view::npos) {
    clause.head = parse_atom(text, line);
    return clause;
  }
  clause.head = parse_atom(text.substr(0, arrow), line);
  clause.body = parse_conjunction(text.substr(arrow + width), line);
  return clause;
}

Schema parse_schema(std::string_view text) {
  Schema schema;
  for_each_line(text, [&](std::string_view content, std::size_t line) {
    const Atom atom = parse_atom(strip_period(content, line, true), line);
    PredicateSignature signature{atom.predicate, {}};
    for (const auto& arg : atom.args) {
      const auto type = arg.is_constant() ? parse_arg_type(arg.symbol().str()) : std::nullopt;
      if (!type) throw ParseError(line, "unknown type tag '" + arg.symbol().str() + "'");
      signature.arg_types.push_back(*type);
    }
    if (schema.find(signature.key()) != nullptr) {
      throw ParseError(line, "duplicate predicate " + atom.predicate.str() + "/" + std::to_string(atom.arity()));
    }
    schema.add(std::move(signature));
  });
  if (schema.size() == 0) throw ParseError(1, "schema declares no predicates");
  return schema;
}

void load_facts(std::string_view text, FactBase& facts) {
  for_each_line(text, [&](std::string_view content, std::size_t line) {
    const Atom atom = parse_atom(strip_period(content, line, true), line);
    if (!atom.is_ground()) throw ParseError(line, "variable in fact " + render(atom));
    try {
      facts.add(atom);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(line, e.what());
    }
  });
}

FactBase parse_facts(std::string_view text, const Schema& schema) {
  FactBase facts(schema);
  load_facts(text, facts);
  return facts;
}

std::string render_schema(const Schema& schema) {
  std::string out;
  for (const auto& signature : schema.signatures()) out += render(signature) + ".\n";
  return out;
}

std::string render_facts(const FactBase& facts) {
  std::string out;
  for (const auto& fact : facts.facts()) out += render(fact) + ".\n";
  return out;
}

std::string render_clause(const HornClause& clause) {
  std::string out;
  if (clause.weight) out += format_double(*clause.weight) + " ";
  out += render(clause.head);
  out += " ";
  out += kImplied;
  if (!clause.body.empty()) {
    out += " ";
    out += render(clause.body, std::string(" ") + std::string(kAnd) + " ");
  }
  out += " .";
  if (!clause.body.empty()) out.erase(out.size() - 2, 1);
  return out;
}

std::string format_double(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) throw Error(ErrorCategory::Config, "cannot format number");
  return std::string(buffer, ptr);
}

double parse_double(std::string_view text, std::size_t line) {
  text = trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw ParseError(line, "bad number '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace relboost::logic
