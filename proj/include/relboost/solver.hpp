#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "relboost/fact_base.hpp"
#include "relboost/logic.hpp"

namespace relboost::logic {

/// Extra constraints on a query. `masked` names one ground fact that must
/// not be used as evidence; queries about a target example mask the example
/// itself so that a known authorship never proves itself.
struct QueryOptions {
  const Atom* masked = nullptr;
};

/// Existential satisfaction of a conjunction. Returns the first extension of
/// `binding` (facts in insertion order, literals bound left to right) that
/// grounds every literal to a fact, or nullopt.
std::optional<Substitution> satisfy(std::span<const Atom> conjunction, const Substitution& binding,
                                    const FactBase& facts, const QueryOptions& options = {});

/// Up to `limit` distinct satisfying extensions of `binding`, in the same
/// deterministic order as satisfy().
std::vector<Substitution> enumerate_bindings(std::span<const Atom> conjunction,
                                             const Substitution& binding, const FactBase& facts,
                                             std::size_t limit, const QueryOptions& options = {});

/// A conjunction compiled against one fact base for repeated queries that
/// differ only in the values of a fixed list of parameter variables.
///
/// Literals are split into components that share no free variable and each
/// component is solved on its own, so a failure in one part never backtracks
/// through another.
class CompiledQuery {
 public:
  CompiledQuery(std::span<const Atom> conjunction, std::span<const Symbol> parameters,
                const FactBase& facts);

  /// True iff some extension of parameters := `values` satisfies every literal.
  bool holds(std::span<const Symbol> values, const Atom* masked = nullptr) const;

  /// Witness values for every variable (parameters first, then the other
  /// variables in first-occurrence order), or nullopt.
  std::optional<std::vector<Symbol>> solve(std::span<const Symbol> values,
                                           const Atom* masked = nullptr) const;

  /// Up to `limit` distinct solutions in depth-first order over all literals
  /// left to right (no component split), each in slot order.
  std::vector<std::vector<Symbol>> enumerate(std::span<const Symbol> values, std::size_t limit,
                                             const Atom* masked = nullptr) const;

  /// All variables, in slot order.
  const std::vector<Symbol>& variables() const { return variables_; }

 private:
  struct Arg {
    bool constant = false;
    Symbol value;         // when constant
    std::uint32_t slot = 0;  // when variable
  };
  struct Literal {
    const Relation* relation = nullptr;
    PredicateKey key;
    std::vector<Arg> args;
    std::uint64_t vars = 0;  // variable slots, when there are at most 64
  };
  struct Mask {
    const Relation* relation = nullptr;
    std::uint32_t row = 0;
  };

  bool search(const std::vector<std::uint32_t>& component, std::size_t depth, std::vector<Symbol>& slots,
              const Mask& mask) const;
  bool search_all(std::size_t depth, std::vector<Symbol>& slots, const Mask& mask, std::size_t limit,
                  std::vector<std::vector<Symbol>>& out) const;
  // Existence only: literals in any order, most selective first, with
  // independent groups solved separately.
  bool exists(std::uint64_t remaining, std::span<Symbol> slots, std::uint64_t bound, const Mask& mask) const;
  std::size_t estimate(const Literal& lit, std::span<const Symbol> slots) const;
  Mask resolve_mask(const Atom* masked) const;
  bool run(std::vector<Symbol>& slots, const Atom* masked) const;

  const FactBase* facts_ = nullptr;

  std::vector<Symbol> variables_;
  std::size_t parameter_count_ = 0;
  std::vector<Literal> literals_;
  std::vector<std::vector<std::uint32_t>> components_;
  bool trivially_false_ = false;
};

}  // namespace relboost::logic
