#include "relboost/solver.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <numeric>
#include <set>
#include <unordered_map>

#include "relboost/error.hpp"

namespace relboost::logic {
namespace {

constexpr std::size_t kMaxArity = 16;

// Calls `next()` once per row of `lit` consistent with `slots`, binding the
// literal's unbound variables for the duration of the call. Stops and
// returns true as soon as `next()` does.
template <typename Literal, typename Mask, typename Next>
bool for_each_match(const Literal& lit, std::span<Symbol> slots, const Mask& mask, Next&& next) {
  const Relation* rel = lit.relation;
  const std::vector<std::uint32_t>* best = nullptr;
  for (std::size_t i = 0; i < lit.args.size(); ++i) {
    const auto& arg = lit.args[i];
    const Symbol value = arg.constant ? arg.value : slots[arg.slot];
    if (!value.valid()) continue;
    const auto* rows = rel->lookup(i, value);
    if (rows == nullptr) return false;
    if (best == nullptr || rows->size() < best->size()) best = rows;
  }

  std::array<std::uint32_t, kMaxArity> bound{};
  auto try_row = [&](std::uint32_t r) -> bool {
    if (mask.relation == rel && mask.row == r) return false;
    const auto row = rel->row(r);
    std::size_t n_bound = 0;
    bool ok = true;
    for (std::size_t i = 0; i < lit.args.size() && ok; ++i) {
      const auto& arg = lit.args[i];
      if (arg.constant) {
        ok = row[i] == arg.value;
      } else if (slots[arg.slot].valid()) {
        ok = slots[arg.slot] == row[i];
      } else {
        slots[arg.slot] = row[i];
        bound[n_bound++] = arg.slot;
      }
    }
    if (ok && next()) return true;
    for (std::size_t k = 0; k < n_bound; ++k) slots[bound[k]] = Symbol();
    return false;
  };

  if (best != nullptr) {
    for (std::uint32_t r : *best) {
      if (try_row(r)) return true;
    }
  } else {
    const auto n = static_cast<std::uint32_t>(rel->rows());
    for (std::uint32_t r = 0; r < n; ++r) {
      if (try_row(r)) return true;
    }
  }
  return false;
}

}  // namespace

CompiledQuery::CompiledQuery(std::span<const Atom> conjunction, std::span<const Symbol> parameters,
                             const FactBase& facts)
    : facts_(&facts), variables_(parameters.begin(), parameters.end()), parameter_count_(parameters.size()) {
  std::unordered_map<Symbol, std::uint32_t> slot_of;
  for (std::size_t i = 0; i < variables_.size(); ++i) slot_of.emplace(variables_[i], static_cast<std::uint32_t>(i));

  for (const Atom& atom : conjunction) {
    if (atom.arity() > kMaxArity) throw Error(ErrorCategory::Schema, "arity too large: " + render(atom));
    Literal lit;
    lit.key = atom.key();
    lit.relation = facts.relation(lit.key);
    if (lit.relation == nullptr || lit.relation->rows() == 0) trivially_false_ = true;
    for (const Term& term : atom.args) {
      Arg arg;
      if (term.is_constant()) {
        arg.constant = true;
        arg.value = term.symbol();
      } else {
        auto [it, inserted] = slot_of.emplace(term.symbol(), static_cast<std::uint32_t>(variables_.size()));
        if (inserted) variables_.push_back(term.symbol());
        arg.slot = it->second;
      }
      lit.args.push_back(arg);
      if (!arg.constant && arg.slot < 64) lit.vars |= std::uint64_t{1} << arg.slot;
    }
    literals_.push_back(std::move(lit));
  }

  // Union-find over literals joined by a shared non-parameter variable.
  std::vector<std::uint32_t> parent(literals_.size());
  std::iota(parent.begin(), parent.end(), 0U);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::unordered_map<std::uint32_t, std::uint32_t> owner;  // free slot -> literal
  for (std::uint32_t i = 0; i < literals_.size(); ++i) {
    for (const Arg& arg : literals_[i].args) {
      if (arg.constant || arg.slot < parameter_count_) continue;
      auto [it, inserted] = owner.emplace(arg.slot, i);
      if (!inserted) {
        const auto a = find(it->second);
        const auto b = find(i);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  std::unordered_map<std::uint32_t, std::size_t> component_of;
  for (std::uint32_t i = 0; i < literals_.size(); ++i) {
    const auto root = find(i);
    auto [it, inserted] = component_of.emplace(root, components_.size());
    if (inserted) components_.emplace_back();
    components_[it->second].push_back(i);
  }
}

CompiledQuery::Mask CompiledQuery::resolve_mask(const Atom* masked) const {
  Mask mask;
  if (masked == nullptr || !masked->is_ground()) return mask;
  const Relation* rel = facts_->relation(masked->key());
  if (rel == nullptr) return mask;
  std::vector<Symbol> values;
  values.reserve(masked->arity());
  for (const Term& t : masked->args) values.push_back(t.symbol());
  if (auto row = rel->find(values)) {
    mask.relation = rel;
    mask.row = *row;
  }
  return mask;
}

bool CompiledQuery::search(const std::vector<std::uint32_t>& component, std::size_t depth,
                           std::vector<Symbol>& slots, const Mask& mask) const {
  if (depth == component.size()) return true;
  return for_each_match(literals_[component[depth]], slots, mask,
                        [&] { return search(component, depth + 1, slots, mask); });
}

bool CompiledQuery::search_all(std::size_t depth, std::vector<Symbol>& slots, const Mask& mask, std::size_t limit,
                               std::vector<std::vector<Symbol>>& out) const {
  if (depth == literals_.size()) {
    out.push_back(slots);
    return out.size() >= limit;
  }
  return for_each_match(literals_[depth], slots, mask,
                        [&] { return search_all(depth + 1, slots, mask, limit, out); });
}

std::size_t CompiledQuery::estimate(const Literal& lit, std::span<const Symbol> slots) const {
  std::size_t best = lit.relation->rows();
  for (std::size_t i = 0; i < lit.args.size(); ++i) {
    const auto& arg = lit.args[i];
    const Symbol value = arg.constant ? arg.value : slots[arg.slot];
    if (!value.valid()) continue;
    const auto* rows = lit.relation->lookup(i, value);
    if (rows == nullptr) return 0;
    best = std::min(best, rows->size());
  }
  return best;
}

bool CompiledQuery::exists(std::uint64_t remaining, std::span<Symbol> slots, std::uint64_t bound,
                           const Mask& mask) const {
  if (remaining == 0) return true;

  // Split the remaining literals into groups joined by unbound variables.
  std::array<std::uint64_t, 64> groups{};
  std::array<std::uint64_t, 64> group_vars{};
  std::size_t n_groups = 0;
  for (std::uint64_t todo = remaining; todo != 0;) {
    std::uint64_t group = todo & (~todo + 1);
    std::uint64_t vars = literals_[std::countr_zero(group)].vars & ~bound;
    todo &= ~group;
    for (bool grown = true; grown;) {
      grown = false;
      for (std::uint64_t rest = todo; rest != 0; rest &= rest - 1) {
        const auto j = static_cast<std::size_t>(std::countr_zero(rest));
        if ((literals_[j].vars & vars) == 0) continue;
        group |= std::uint64_t{1} << j;
        vars |= literals_[j].vars & ~bound;
        todo &= ~(std::uint64_t{1} << j);
        grown = true;
      }
    }
    groups[n_groups] = group;
    group_vars[n_groups++] = vars;
  }

  if (n_groups > 1) {
    for (std::size_t g = 0; g < n_groups; ++g) {
      if (exists(groups[g], slots, bound, mask)) continue;
      for (std::size_t h = 0; h < g; ++h) {
        for (std::uint64_t v = group_vars[h]; v != 0; v &= v - 1) slots[std::countr_zero(v)] = Symbol();
      }
      return false;
    }
    return true;
  }

  std::size_t pick = 64, best = 0;
  for (std::uint64_t rest = remaining; rest != 0; rest &= rest - 1) {
    const auto j = static_cast<std::size_t>(std::countr_zero(rest));
    const std::size_t n = estimate(literals_[j], slots);
    if (n == 0) return false;
    if (pick == 64 || n < best) {
      pick = j;
      best = n;
    }
  }
  const std::uint64_t next = remaining & ~(std::uint64_t{1} << pick);
  const std::uint64_t now_bound = bound | literals_[pick].vars;
  return for_each_match(literals_[pick], slots, mask, [&] { return exists(next, slots, now_bound, mask); });
}

bool CompiledQuery::run(std::vector<Symbol>& slots, const Atom* masked) const {
  if (trivially_false_) return false;
  const Mask mask = resolve_mask(masked);
  for (const auto& component : components_) {
    if (!search(component, 0, slots, mask)) return false;
  }
  return true;
}

bool CompiledQuery::holds(std::span<const Symbol> values, const Atom* masked) const {
  if (trivially_false_) return false;
  if (literals_.size() > 64 || variables_.size() > 64) {
    std::vector<Symbol> slots(variables_.size());
    std::copy_n(values.begin(), std::min(values.size(), parameter_count_), slots.begin());
    return run(slots, masked);
  }
  std::array<Symbol, 64> slots{};
  const std::size_t given = std::min(values.size(), parameter_count_);
  std::copy_n(values.begin(), given, slots.begin());
  std::uint64_t bound = 0;
  for (std::size_t i = 0; i < given; ++i) {
    if (slots[i].valid()) bound |= std::uint64_t{1} << i;
  }
  const std::uint64_t all = literals_.size() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << literals_.size()) - 1;
  return exists(all, std::span<Symbol>(slots.data(), variables_.size()), bound, resolve_mask(masked));
}

std::optional<std::vector<Symbol>> CompiledQuery::solve(std::span<const Symbol> values, const Atom* masked) const {
  std::vector<Symbol> slots(variables_.size());
  std::copy_n(values.begin(), std::min(values.size(), parameter_count_), slots.begin());
  if (!run(slots, masked)) return std::nullopt;
  return slots;
}

std::vector<std::vector<Symbol>> CompiledQuery::enumerate(std::span<const Symbol> values, std::size_t limit,
                                                          const Atom* masked) const {
  std::vector<std::vector<Symbol>> out;
  if (limit == 0 || trivially_false_) return out;
  std::vector<Symbol> slots(variables_.size());
  std::copy_n(values.begin(), std::min(values.size(), parameter_count_), slots.begin());
  search_all(0, slots, resolve_mask(masked), limit, out);
  return out;
}

namespace {

struct Prepared {
  std::vector<Symbol> parameters;
  std::vector<Symbol> values;
};

Prepared prepare(std::span<const Atom> conjunction, const Substitution& binding) {
  Prepared p;
  for (Symbol variable : variables_of(conjunction)) {
    if (auto value = binding.lookup(variable)) {
      p.parameters.push_back(variable);
      p.values.push_back(*value);
    }
  }
  return p;
}

Substitution extend(const Substitution& binding, const CompiledQuery& query, std::span<const Symbol> slots) {
  Substitution out = binding;
  const auto& variables = query.variables();
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (!binding.contains(variables[i])) out.bind(variables[i], slots[i]);
  }
  return out;
}

}  // namespace

std::optional<Substitution> satisfy(std::span<const Atom> conjunction, const Substitution& binding,
                                    const FactBase& facts, const QueryOptions& options) {
  const Prepared p = prepare(conjunction, binding);
  const CompiledQuery query(conjunction, p.parameters, facts);
  auto slots = query.solve(p.values, options.masked);
  if (!slots) return std::nullopt;
  return extend(binding, query, *slots);
}

std::vector<Substitution> enumerate_bindings(std::span<const Atom> conjunction, const Substitution& binding,
                                             const FactBase& facts, std::size_t limit, const QueryOptions& options) {
  const Prepared p = prepare(conjunction, binding);
  const CompiledQuery query(conjunction, p.parameters, facts);
  std::vector<Substitution> out;
  std::set<std::vector<Symbol>> seen;
  // Distinct rows always give distinct bindings, but keep the guarantee explicit.
  for (auto& slots : query.enumerate(p.values, limit, options.masked)) {
    if (!seen.insert(slots).second) continue;
    out.push_back(extend(binding, query, slots));
  }
  return out;
}

}  // namespace relboost::logic
