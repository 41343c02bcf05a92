#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "relboost/logic.hpp"

namespace relboost::logic {

/// Declared predicate signatures, in declaration order.
class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<PredicateSignature> signatures);

  /// Throws Error(Schema) on a duplicate (name, arity).
  void add(PredicateSignature signature);

  const PredicateSignature* find(PredicateKey key) const;
  const PredicateSignature* find(std::string_view name, std::size_t arity) const;
  std::optional<std::size_t> index_of(PredicateKey key) const;

  const std::vector<PredicateSignature>& signatures() const { return signatures_; }
  std::size_t size() const { return signatures_.size(); }

  /// Throws Error(Schema) unless `atom` names a declared predicate with the
  /// declared arity.
  const PredicateSignature& check(const Atom& atom) const;

 private:
  std::vector<PredicateSignature> signatures_;
  std::unordered_map<PredicateKey, std::size_t, PredicateKeyHash> by_key_;
};

/// Ground rows of one predicate with an index per argument position.
/// Row ids are insertion order.
class Relation {
 public:
  explicit Relation(std::size_t arity) : arity_(arity), index_(arity) {}

  std::size_t arity() const { return arity_; }
  std::size_t rows() const { return arity_ == 0 ? zero_rows_ : cells_.size() / arity_; }
  std::span<const Symbol> row(std::uint32_t id) const {
    return {cells_.data() + static_cast<std::size_t>(id) * arity_, arity_};
  }

  /// Row ids whose `position` holds `value`, ascending; nullptr when none.
  const std::vector<std::uint32_t>* lookup(std::size_t position, Symbol value) const;
  std::optional<std::uint32_t> find(std::span<const Symbol> values) const;

  /// Returns false when the row is already present.
  bool insert(std::span<const Symbol> values);

 private:
  std::size_t arity_;
  std::size_t zero_rows_ = 0;
  std::vector<Symbol> cells_;
  std::vector<std::vector<std::vector<std::uint32_t>>> index_;  // [position][symbol id] -> rows
};

/// Indexed store of ground, schema-conformant atoms. Duplicates are stored
/// once; enumeration follows insertion order.
class FactBase {
 public:
  FactBase() = default;
  explicit FactBase(Schema schema);

  const Schema& schema() const { return schema_; }

  /// Validates against the schema; throws Error(Schema) on unknown predicate
  /// or arity mismatch and Error(Parse) on a non-ground atom. Returns false
  /// for a duplicate.
  bool add(const Atom& fact);

  bool contains(const Atom& fact) const;
  std::size_t size() const { return order_.size(); }
  bool empty() const { return order_.empty(); }

  const Relation* relation(PredicateKey key) const;

  /// All facts in insertion order.
  std::vector<Atom> facts() const;
  /// Distinct constants occurring anywhere, in first-occurrence order.
  std::vector<Symbol> constants() const;

 private:
  Schema schema_;
  std::vector<Relation> relations_;  // parallel to schema_.signatures()
  std::vector<std::pair<std::uint32_t, std::uint32_t>> order_;  // (relation, row)
};

}  // namespace relboost::logic
