#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "relboost/symbol.hpp"

namespace relboost::logic {

/// Argument type tags of the publication domain.
enum class ArgType : std::uint8_t { Publication, Author, Name, Affiliation, Venue, Title };

std::string_view to_string(ArgType type);
/// Accepts canonical tags (`pub`, `author`, `namestr`, `affstr`, `venuestr`,
/// `titlestr`) and a few short aliases.
std::optional<ArgType> parse_arg_type(std::string_view tag);

class Term {
 public:
  static Term constant(Symbol symbol) { return Term(false, symbol); }
  static Term constant(std::string_view text);
  static Term variable(Symbol name) { return Term(true, name); }
  static Term variable(std::string_view name) { return Term(true, Symbol::intern(name)); }

  bool is_variable() const { return variable_; }
  bool is_constant() const { return !variable_; }
  Symbol symbol() const { return symbol_; }

  friend bool operator==(const Term&, const Term&) = default;

 private:
  Term(bool variable, Symbol symbol) : variable_(variable), symbol_(symbol) {}
  bool variable_ = false;
  Symbol symbol_;
};

struct PredicateKey {
  Symbol name;
  std::uint32_t arity = 0;

  friend bool operator==(const PredicateKey&, const PredicateKey&) = default;
};

struct PredicateKeyHash {
  std::size_t operator()(const PredicateKey& key) const noexcept {
    return std::hash<Symbol>{}(key.name) * 31 + key.arity;
  }
};

struct PredicateSignature {
  Symbol name;
  std::vector<ArgType> arg_types;

  std::size_t arity() const { return arg_types.size(); }
  PredicateKey key() const { return {name, static_cast<std::uint32_t>(arg_types.size())}; }
  friend bool operator==(const PredicateSignature&, const PredicateSignature&) = default;
};

struct Atom {
  Symbol predicate;
  std::vector<Term> args;

  Atom() = default;
  Atom(Symbol predicate, std::vector<Term> args) : predicate(predicate), args(std::move(args)) {}

  std::size_t arity() const { return args.size(); }
  PredicateKey key() const { return {predicate, static_cast<std::uint32_t>(args.size())}; }
  bool is_ground() const;

  friend bool operator==(const Atom&, const Atom&) = default;
};

struct HornClause {
  Atom head;
  std::vector<Atom> body;
  std::optional<double> weight;
};

/// Ground substitution: a finite map from variables to constants, kept sorted
/// by variable symbol.
class Substitution {
 public:
  Substitution() = default;

  std::optional<Symbol> lookup(Symbol variable) const;
  bool contains(Symbol variable) const { return lookup(variable).has_value(); }
  /// Binds or rebinds `variable`.
  void bind(Symbol variable, Symbol constant);
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  const std::vector<std::pair<Symbol, Symbol>>& entries() const { return entries_; }

  Term apply(const Term& term) const;
  Atom apply(const Atom& atom) const;

  /// Substitution equivalent to applying `*this` first and then `next`.
  Substitution compose(const Substitution& next) const;

  friend bool operator==(const Substitution&, const Substitution&) = default;

 private:
  std::vector<std::pair<Symbol, Symbol>> entries_;
};

/// Binds the variables of `pattern` so that it equals the ground atom
/// `ground`. Returns nullopt when predicates, arities or constants disagree.
std::optional<Substitution> match(const Atom& pattern, const Atom& ground);

/// Variables of the conjunction in order of first occurrence.
std::vector<Symbol> variables_of(std::span<const Atom> atoms);

/// Lower-case, trim, and collapse internal whitespace runs to one underscore.
std::string normalize_constant(std::string_view text);

std::string render(const Term& term);
std::string render(const Atom& atom);
std::string render(std::span<const Atom> conjunction, std::string_view separator = ", ");
std::string render(const PredicateSignature& signature);
std::string render(const Substitution& substitution);

}  // namespace relboost::logic
