#include "relboost/fact_base.hpp"

#include <algorithm>
#include <unordered_set>

#include "relboost/error.hpp"

namespace relboost::logic {

Schema::Schema(std::vector<PredicateSignature> signatures) {
  for (auto& signature : signatures) add(std::move(signature));
}

void Schema::add(PredicateSignature signature) {
  const PredicateKey key = signature.key();
  if (signature.arity() == 0) {
    throw Error(ErrorCategory::Schema, "predicate " + signature.name.str() + " must have positive arity");
  }
  if (by_key_.contains(key)) {
    throw Error(ErrorCategory::Schema,
                "duplicate predicate " + signature.name.str() + "/" + std::to_string(key.arity));
  }
  by_key_.emplace(key, signatures_.size());
  signatures_.push_back(std::move(signature));
}

const PredicateSignature* Schema::find(PredicateKey key) const {
  auto it = by_key_.find(key);
  return it == by_key_.end() ? nullptr : &signatures_[it->second];
}

const PredicateSignature* Schema::find(std::string_view name, std::size_t arity) const {
  return find(PredicateKey{Symbol::intern(name), static_cast<std::uint32_t>(arity)});
}

std::optional<std::size_t> Schema::index_of(PredicateKey key) const {
  auto it = by_key_.find(key);
  if (it == by_key_.end()) return std::nullopt;
  return it->second;
}

const PredicateSignature& Schema::check(const Atom& atom) const {
  if (const auto* signature = find(atom.key())) return *signature;
  for (const auto& signature : signatures_) {
    if (signature.name == atom.predicate) {
      throw Error(ErrorCategory::Schema, "arity mismatch for " + atom.predicate.str() + ": got " +
                                             std::to_string(atom.arity()));
    }
  }
  throw Error(ErrorCategory::Schema, "unknown predicate " + atom.predicate.str());
}

const std::vector<std::uint32_t>* Relation::lookup(std::size_t position, Symbol value) const {
  const auto& column = index_[position];
  if (!value.valid() || value.id() >= column.size() || column[value.id()].empty()) return nullptr;
  return &column[value.id()];
}

std::optional<std::uint32_t> Relation::find(std::span<const Symbol> values) const {
  if (values.size() != arity_) return std::nullopt;
  if (arity_ == 0) return zero_rows_ > 0 ? std::optional<std::uint32_t>(0) : std::nullopt;
  const std::vector<std::uint32_t>* best = nullptr;
  for (std::size_t i = 0; i < arity_; ++i) {
    const auto* rows = lookup(i, values[i]);
    if (rows == nullptr) return std::nullopt;
    if (best == nullptr || rows->size() < best->size()) best = rows;
  }
  for (std::uint32_t r : *best) {
    if (std::equal(values.begin(), values.end(), row(r).begin())) return r;
  }
  return std::nullopt;
}

bool Relation::insert(std::span<const Symbol> values) {
  const auto id = static_cast<std::uint32_t>(rows());
  if (values.size() != arity_ || find(values)) return false;
  if (arity_ == 0) {
    ++zero_rows_;
    return true;
  }
  cells_.insert(cells_.end(), values.begin(), values.end());
  for (std::size_t i = 0; i < arity_; ++i) {
    auto& column = index_[i];
    if (values[i].id() >= column.size()) column.resize(values[i].id() + 1);
    column[values[i].id()].push_back(id);
  }
  return true;
}

FactBase::FactBase(Schema schema) : schema_(std::move(schema)) {
  relations_.reserve(schema_.size());
  for (const auto& signature : schema_.signatures()) relations_.emplace_back(signature.arity());
}

bool FactBase::add(const Atom& fact) {
  schema_.check(fact);
  if (!fact.is_ground()) {
    throw Error(ErrorCategory::Parse, "variable in fact " + render(fact));
  }
  const std::size_t index = *schema_.index_of(fact.key());
  std::vector<Symbol> values;
  values.reserve(fact.arity());
  for (const auto& arg : fact.args) {
    if (!arg.symbol().valid() || arg.symbol().str().empty()) {
      throw Error(ErrorCategory::Parse, "empty constant in fact " + render(fact));
    }
    values.push_back(arg.symbol());
  }
  Relation& relation = relations_[index];
  if (!relation.insert(values)) return false;
  order_.emplace_back(static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(relation.rows() - 1));
  return true;
}

bool FactBase::contains(const Atom& fact) const {
  const Relation* rel = relation(fact.key());
  if (rel == nullptr || !fact.is_ground()) return false;
  std::vector<Symbol> values;
  for (const auto& arg : fact.args) values.push_back(arg.symbol());
  return rel->find(values).has_value();
}

const Relation* FactBase::relation(PredicateKey key) const {
  auto index = schema_.index_of(key);
  return index ? &relations_[*index] : nullptr;
}

std::vector<Atom> FactBase::facts() const {
  std::vector<Atom> out;
  out.reserve(order_.size());
  for (const auto& [rel, row] : order_) {
    Atom atom;
    atom.predicate = schema_.signatures()[rel].name;
    for (Symbol value : relations_[rel].row(row)) atom.args.push_back(Term::constant(value));
    out.push_back(std::move(atom));
  }
  return out;
}

std::vector<Symbol> FactBase::constants() const {
  std::vector<Symbol> out;
  std::unordered_set<Symbol> seen;
  for (const auto& [rel, row] : order_) {
    for (Symbol value : relations_[rel].row(row)) {
      if (seen.insert(value).second) out.push_back(value);
    }
  }
  return out;
}

}  // namespace relboost::logic
