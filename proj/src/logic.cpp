#include "relboost/logic.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

namespace relboost::logic {
namespace {

struct TypeName {
  std::string_view tag;
  ArgType type;
};

// First entry per type is the canonical tag.
constexpr std::array kTypeNames{
    TypeName{"pub", ArgType::Publication},    TypeName{"publication", ArgType::Publication},
    TypeName{"author", ArgType::Author},      TypeName{"namestr", ArgType::Name},
    TypeName{"name", ArgType::Name},          TypeName{"affstr", ArgType::Affiliation},
    TypeName{"aff", ArgType::Affiliation},    TypeName{"affiliation", ArgType::Affiliation},
    TypeName{"venuestr", ArgType::Venue},     TypeName{"venue", ArgType::Venue},
    TypeName{"v", ArgType::Venue},            TypeName{"titlestr", ArgType::Title},
    TypeName{"title", ArgType::Title},
};

bool needs_quotes(std::string_view text) {
  if (text.empty()) return true;
  const unsigned char first = static_cast<unsigned char>(text.front());
  if (std::isupper(first) || first == '_') return true;
  return std::any_of(text.begin(), text.end(), [](char c) {
    return c == ',' || c == '(' || c == ')' || c == '"' || c == '%' || c == '.' ||
           std::isspace(static_cast<unsigned char>(c));
  });
}

}  // namespace

std::string_view to_string(ArgType type) {
  for (const auto& entry : kTypeNames) {
    if (entry.type == type) return entry.tag;
  }
  return "?";
}

std::optional<ArgType> parse_arg_type(std::string_view tag) {
  for (const auto& entry : kTypeNames) {
    if (entry.tag == tag) return entry.type;
  }
  return std::nullopt;
}

Term Term::constant(std::string_view text) { return Term(false, Symbol::intern(normalize_constant(text))); }

bool Atom::is_ground() const {
  return std::none_of(args.begin(), args.end(), [](const Term& t) { return t.is_variable(); });
}

std::optional<Symbol> Substitution::lookup(Symbol variable) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), variable,
                             [](const auto& entry, Symbol v) { return entry.first < v; });
  if (it != entries_.end() && it->first == variable) return it->second;
  return std::nullopt;
}

void Substitution::bind(Symbol variable, Symbol constant) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), variable,
                             [](const auto& entry, Symbol v) { return entry.first < v; });
  if (it != entries_.end() && it->first == variable) {
    it->second = constant;
  } else {
    entries_.insert(it, {variable, constant});
  }
}

Term Substitution::apply(const Term& term) const {
  if (term.is_constant()) return term;
  if (auto value = lookup(term.symbol())) return Term::constant(*value);
  return term;
}

Atom Substitution::apply(const Atom& atom) const {
  Atom out = atom;
  for (auto& arg : out.args) arg = apply(arg);
  return out;
}

Substitution Substitution::compose(const Substitution& next) const {
  // Values are constants, so `next` only contributes variables `*this` leaves free.
  Substitution out = *this;
  for (const auto& [variable, value] : next.entries_) {
    if (!contains(variable)) out.bind(variable, value);
  }
  return out;
}

std::optional<Substitution> match(const Atom& pattern, const Atom& ground) {
  if (pattern.predicate != ground.predicate || pattern.arity() != ground.arity()) return std::nullopt;
  Substitution out;
  for (std::size_t i = 0; i < pattern.arity(); ++i) {
    const Term& p = pattern.args[i];
    const Term& g = ground.args[i];
    if (g.is_variable()) return std::nullopt;
    if (p.is_constant()) {
      if (p.symbol() != g.symbol()) return std::nullopt;
      continue;
    }
    if (auto bound = out.lookup(p.symbol())) {
      if (*bound != g.symbol()) return std::nullopt;
    } else {
      out.bind(p.symbol(), g.symbol());
    }
  }
  return out;
}

std::vector<Symbol> variables_of(std::span<const Atom> atoms) {
  std::vector<Symbol> out;
  std::unordered_set<Symbol> seen;
  for (const auto& atom : atoms) {
    for (const auto& arg : atom.args) {
      if (arg.is_variable() && seen.insert(arg.symbol()).second) out.push_back(arg.symbol());
    }
  }
  return out;
}

std::string normalize_constant(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isspace(uc)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back('_');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(uc)));
  }
  return out;
}

std::string render(const Term& term) {
  const std::string& text = term.symbol().str();
  if (term.is_variable() || !needs_quotes(text)) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') quoted.push_back('\\');
    quoted.push_back(c);
  }
  quoted.push_back('"');
  return quoted;
}

std::string render(const Atom& atom) {
  std::string out = atom.predicate.str();
  out.push_back('(');
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    if (i > 0) out += ", ";
    out += render(atom.args[i]);
  }
  out.push_back(')');
  return out;
}

std::string render(std::span<const Atom> conjunction, std::string_view separator) {
  std::string out;
  for (std::size_t i = 0; i < conjunction.size(); ++i) {
    if (i > 0) out += separator;
    out += render(conjunction[i]);
  }
  return out;
}

std::string render(const PredicateSignature& signature) {
  std::string out = signature.name.str();
  out.push_back('(');
  for (std::size_t i = 0; i < signature.arg_types.size(); ++i) {
    if (i > 0) out += ", ";
    out += to_string(signature.arg_types[i]);
  }
  out.push_back(')');
  return out;
}

std::string render(const Substitution& substitution) {
  std::string out = "{";
  bool first = true;
  for (const auto& [variable, value] : substitution.entries()) {
    if (!first) out += ", ";
    first = false;
    out += variable.str() + "->" + render(Term::constant(value));
  }
  out.push_back('}');
  return out;
}

}  // namespace relboost::logic
