#include "relboost/induce.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "checks.hpp"
#include "relboost/error.hpp"
#include "relboost/solver.hpp"

namespace relboost::rrt {

using logic::Atom;
using logic::FactBase;
using logic::Term;

void TreeParams::validate() const {
  if (max_depth < 0) throw Error(ErrorCategory::Config, "max_depth must be >= 0");
  if (max_literals_per_node < 1) throw Error(ErrorCategory::Config, "max_literals_per_node must be >= 1");
  if (min_examples_per_leaf < 1) throw Error(ErrorCategory::Config, "min_examples_per_leaf must be >= 1");
  if (!(tolerance >= 0.0)) throw Error(ErrorCategory::Config, "tolerance must be >= 0");
  if (max_candidates < 1) throw Error(ErrorCategory::Config, "max_candidates must be >= 1");
}

CandidateGenerator::CandidateGenerator(std::span<const ModeDeclaration> modes, const FactBase& facts,
                                       const TreeParams& params)
    : modes_(modes.begin(), modes.end()), params_(params) {
  const auto& schema = facts.schema();
  auto rank = [&](const ModeDeclaration& m) {
    return schema.index_of(m.predicate.key()).value_or(std::numeric_limits<std::size_t>::max());
  };
  std::stable_sort(modes_.begin(), modes_.end(),
                   [&](const ModeDeclaration& a, const ModeDeclaration& b) { return rank(a) < rank(b); });

  for (std::size_t m = 0; m < modes_.size(); ++m) {
    const auto& decl = modes_[m];
    const logic::Relation* rel = facts.relation(decl.predicate.key());
    for (std::size_t pos = 0; pos < decl.modes.size(); ++pos) {
      if (decl.modes[pos] != ArgMode::Constant) continue;
      std::vector<std::pair<Symbol, std::size_t>> counts;
      std::unordered_map<Symbol, std::size_t> slot;
      for (std::uint32_t r = 0; rel != nullptr && r < rel->rows(); ++r) {
        const Symbol value = rel->row(r)[pos];
        auto [it, inserted] = slot.emplace(value, counts.size());
        if (inserted) counts.emplace_back(value, 0);
        ++counts[it->second].second;
      }
      std::stable_sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
      std::vector<Symbol> top;
      for (std::size_t i = 0; i < counts.size() && i < params_.max_constants; ++i) top.push_back(counts[i].first);
      constants_[(static_cast<std::uint64_t>(m) << 32) | pos] = std::move(top);
    }
  }
}

std::vector<Candidate> CandidateGenerator::generate(std::span<const VariableInfo> bound,
                                                    std::span<const Atom> path, std::size_t next_variable) const {
  std::vector<Candidate> out;
  std::unordered_set<std::string> seen;
  std::vector<Candidate> frontier(1);
  const auto max_len = static_cast<std::size_t>(params_.max_literals_per_node);

  auto contains = [](std::span<const Atom> atoms, const Atom& atom) {
    return std::find(atoms.begin(), atoms.end(), atom) != atoms.end();
  };

  for (std::size_t len = 1; len <= max_len && !frontier.empty(); ++len) {
    std::vector<Candidate> next_frontier;
    for (const Candidate& prefix : frontier) {
      std::vector<VariableInfo> available(bound.begin(), bound.end());
      available.insert(available.end(), prefix.introduced.begin(), prefix.introduced.end());
      auto is_new = [&](Symbol v) {
        return std::any_of(prefix.introduced.begin(), prefix.introduced.end(),
                           [v](const VariableInfo& info) { return info.name == v; });
      };

      for (std::size_t m = 0; m < modes_.size(); ++m) {
        const ModeDeclaration& decl = modes_[m];
        Atom literal(decl.predicate.name, std::vector<Term>(decl.modes.size(), Term::constant(Symbol())));
        std::vector<VariableInfo> outputs;

        // Depth-first over argument positions.
        auto emit = [&](auto&& self, std::size_t pos, bool uses_new) -> bool {
          if (pos == decl.modes.size()) {
            if (len > 1 && !uses_new) return true;
            if (contains(path, literal) || contains(prefix.literals, literal)) return true;
            Candidate cand = prefix;
            cand.literals.push_back(literal);
            cand.introduced.insert(cand.introduced.end(), outputs.begin(), outputs.end());
            if (!seen.insert(logic::render(cand.literals)).second) return true;
            out.push_back(cand);
            if (len < max_len) next_frontier.push_back(std::move(cand));
            return out.size() < params_.max_candidates;
          }
          const logic::ArgType type = decl.predicate.arg_types[pos];
          switch (decl.modes[pos]) {
            case ArgMode::Input:
              for (const VariableInfo& var : available) {
                if (var.type != type) continue;
                literal.args[pos] = Term::variable(var.name);
                if (!self(self, pos + 1, uses_new || is_new(var.name))) return false;
              }
              return true;
            case ArgMode::Output: {
              const std::size_t index = next_variable + prefix.introduced.size() + outputs.size();
              const Symbol name = Symbol::intern(variable_name(index));
              literal.args[pos] = Term::variable(name);
              outputs.push_back({name, type});
              const bool keep_going = self(self, pos + 1, uses_new);
              outputs.pop_back();
              return keep_going;
            }
            case ArgMode::Constant: {
              auto it = constants_.find((static_cast<std::uint64_t>(m) << 32) | pos);
              if (it == constants_.end()) return true;
              for (Symbol value : it->second) {
                literal.args[pos] = Term::constant(value);
                if (!self(self, pos + 1, uses_new)) return false;
              }
              return true;
            }
          }
          return true;
        };
        if (!emit(emit, 0, false)) return out;
      }
    }
    frontier = std::move(next_frontier);
  }
  return out;
}

double split_score(double sum_true, std::size_t n_true, double sum_false, std::size_t n_false) {
  if (n_true == 0 || n_false == 0) return 0.0;
  const double sum = sum_true + sum_false;
  const auto n = static_cast<double>(n_true + n_false);
  return sum_true * sum_true / static_cast<double>(n_true) + sum_false * sum_false / static_cast<double>(n_false) -
         sum * sum / n;
}

void CoverageCache::bind(std::span<const GradientExample> examples, const FactBase& facts) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& example : examples) {
    h = (h ^ example.atom.predicate.id()) * 0x100000001b3ULL;
    for (const auto& arg : example.atom.args) h = (h ^ arg.symbol().id()) * 0x100000001b3ULL;
  }
  if (&facts != facts_ || examples.size() != example_count_ || h != fingerprint_) {
    entries_.clear();
    facts_ = &facts;
    example_count_ = examples.size();
    fingerprint_ = h;
  }
}

std::vector<std::int8_t>& CoverageCache::entry(const std::string& key) {
  auto [it, inserted] = entries_.try_emplace(key);
  if (inserted) it->second.assign(example_count_, -1);
  return it->second;
}

const std::vector<std::int8_t>* CoverageCache::find(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

namespace {

class Inducer {
 public:
  Inducer(const logic::PredicateSignature& target, std::span<const GradientExample> examples, const FactBase& facts,
          std::span<const ModeDeclaration> modes, const TreeParams& params, CoverageCache& cache)
      : target_(target),
        head_(head_atom(target)),
        examples_(examples),
        facts_(facts),
        params_(params),
        generator_(modes, facts, params),
        cache_(cache) {
    for (const auto& arg : head_.args) head_vars_.push_back(arg.symbol());
    for (const auto& example : examples_) {
      if (example.atom.key() != head_.key() || !example.atom.is_ground()) {
        throw Error(ErrorCategory::Schema, "training example " + logic::render(example.atom) +
                                               " is not a ground " + target.name.str() + " atom");
      }
      if (!std::isfinite(example.gradient)) throw Error(ErrorCategory::Training, "non-finite gradient");
      std::vector<Symbol> values;
      for (const auto& arg : example.atom.args) values.push_back(arg.symbol());
      values_.push_back(std::move(values));
    }
  }

  RegressionTree run() {
    if (generator_.empty()) throw Error(ErrorCategory::Training, "no mode declarations: cannot generate tests");
    std::vector<std::uint32_t> all(examples_.size());
    for (std::uint32_t i = 0; i < all.size(); ++i) all[i] = i;
    std::vector<VariableInfo> bound;
    for (std::size_t i = 0; i < head_vars_.size(); ++i) bound.push_back({head_vars_[i], target_.arg_types[i]});
    build(all, {}, bound, 0);
    return RegressionTree(target_, std::move(nodes_));
  }

 private:
  std::int32_t make_leaf(std::int32_t id, const std::vector<std::uint32_t>& members) {
    double sum = 0.0;
    for (auto i : members) sum += examples_[i].gradient;
    nodes_[id].value = sum / static_cast<double>(members.size());
    return id;
  }

  // Coverage flags of `conjunction` for `members`, through the cache. A
  // member not covered by `prefix` (a sub-conjunction) is not covered.
  const std::vector<std::int8_t>& coverage(const std::vector<Atom>& conjunction,
                                           const std::vector<std::uint32_t>& members,
                                           const std::vector<std::int8_t>* prefix = nullptr) {
    std::vector<std::int8_t>& flags = cache_.entry(logic::render(conjunction));
    std::unique_ptr<logic::CompiledQuery> query;
    for (auto i : members) {
      if (flags[i] >= 0) continue;
      if (prefix != nullptr && (*prefix)[i] == 0) {
        flags[i] = 0;
        continue;
      }
      if (!query) query = std::make_unique<logic::CompiledQuery>(conjunction, head_vars_, facts_);
      flags[i] = query->holds(values_[i], &examples_[i].atom) ? 1 : 0;
    }
    return flags;
  }

  // Largest split score any subset of the members flagged by `flags` can
  // reach as the true side. For a fixed size the score is convex in the
  // subset's gradient sum, so the k largest or k smallest gradients win.
  double score_bound(const std::vector<std::uint32_t>& members, const std::vector<std::int8_t>& flags,
                     double total) const {
    std::vector<double> covered;
    for (auto i : members) {
      if (flags[i] < 0) return std::numeric_limits<double>::infinity();
      if (flags[i] == 1) covered.push_back(examples_[i].gradient);
    }
    std::sort(covered.begin(), covered.end());
    const std::size_t n = members.size();
    double bound = 0.0, low = 0.0, high = 0.0;
    for (std::size_t k = 1; k <= covered.size() && k < n; ++k) {
      low += covered[k - 1];
      high += covered[covered.size() - k];
      for (double s : {low, high}) {
        bound = std::max(bound, split_score(s, k, total - s, n - k));
      }
    }
    return bound;
  }

  std::int32_t build(const std::vector<std::uint32_t>& members, const std::vector<Atom>& path,
                     const std::vector<VariableInfo>& bound, int depth) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.emplace_back();
    const std::size_t min_leaf = params_.min_examples_per_leaf;
    if (depth >= params_.max_depth || members.size() < 2 * min_leaf) return make_leaf(id, members);

    const std::vector<Candidate> candidates = generator_.generate(bound, path, bound.size());
    if (candidates.empty()) {
      if (depth == 0) throw Error(ErrorCategory::Training, "no candidate tests at the root");
      return make_leaf(id, members);
    }

    double best_score = -std::numeric_limits<double>::infinity();
    std::size_t best = candidates.size();
    std::vector<double> scores;
    double total = 0.0;
    for (auto i : members) total += examples_[i].gradient;

    // A candidate covers a subset of what its prefix covers, so the prefix
    // bounds the score of every extension. Prefixes whose extensions cannot
    // beat the best score so far are dead.
    std::unordered_map<std::string, double> bounds;
    std::unordered_set<std::string> dead;
    std::vector<Atom> conjunction = path;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      conjunction.resize(path.size());
      conjunction.insert(conjunction.end(), candidates[c].literals.begin(), candidates[c].literals.end() - 1);
      const std::vector<std::int8_t>* prefix = nullptr;
      double bound = std::numeric_limits<double>::infinity();
      std::string key = logic::render(conjunction);
      if (candidates[c].literals.size() > 1) {
        if (dead.contains(key)) {
          conjunction.push_back(candidates[c].literals.back());
          dead.insert(logic::render(conjunction));
          continue;
        }
        prefix = cache_.find(key);
        if (prefix != nullptr) {
          auto it = bounds.find(key);
          if (it == bounds.end()) it = bounds.emplace(key, score_bound(members, *prefix, total)).first;
          bound = it->second;
          if (bound + 1e-12 < best_score) {
            dead.insert(key);
            conjunction.push_back(candidates[c].literals.back());
            dead.insert(logic::render(conjunction));
            continue;
          }
        }
      }
      conjunction.push_back(candidates[c].literals.back());
      key = logic::render(conjunction);
      const auto& flags = coverage(conjunction, members, prefix);
      double sum_true = 0.0, sum_false = 0.0;
      std::size_t n_true = 0;
      for (auto i : members) {
        if (flags[i] == 1) {
          sum_true += examples_[i].gradient;
          ++n_true;
        } else {
          sum_false += examples_[i].gradient;
        }
      }
      const std::size_t n_false = members.size() - n_true;
      if (n_true < min_leaf) dead.insert(key);
      if (n_true < min_leaf || n_false < min_leaf) continue;
      const double score = split_score(sum_true, n_true, sum_false, n_false);
      RELBOOST_CHECK(score <= bound + 1e-9, "split score exceeds the bound of its prefix");
      scores.push_back(score);
      if (score > best_score) {
        best_score = score;
        best = c;
      }
    }
    if (best == candidates.size() || !(best_score > params_.tolerance)) return make_leaf(id, members);
    RELBOOST_CHECK(std::all_of(scores.begin(), scores.end(), [&](double s) { return s <= best_score; }),
                   "chosen split does not have the maximal score");

    const Candidate& chosen = candidates[best];
    std::vector<Atom> true_path = path;
    true_path.insert(true_path.end(), chosen.literals.begin(), chosen.literals.end());
    const auto& flags = coverage(true_path, members);
    std::vector<std::uint32_t> on_true, on_false;
    for (auto i : members) (flags[i] == 1 ? on_true : on_false).push_back(i);

    std::vector<VariableInfo> true_bound = bound;
    true_bound.insert(true_bound.end(), chosen.introduced.begin(), chosen.introduced.end());
    nodes_[id].test = chosen.literals;
    const auto t = build(on_true, true_path, true_bound, depth + 1);
    const auto f = build(on_false, path, bound, depth + 1);
    nodes_[id].on_true = t;
    nodes_[id].on_false = f;
    return id;
  }

  const logic::PredicateSignature& target_;
  Atom head_;
  std::vector<Symbol> head_vars_;
  std::span<const GradientExample> examples_;
  std::vector<std::vector<Symbol>> values_;
  const FactBase& facts_;
  const TreeParams& params_;
  CandidateGenerator generator_;
  CoverageCache& cache_;
  std::vector<RegressionTree::Node> nodes_;
};

}  // namespace

RegressionTree induce(const logic::PredicateSignature& target, std::span<const GradientExample> examples,
                      const FactBase& facts, std::span<const ModeDeclaration> modes, const TreeParams& params,
                      CoverageCache* cache) {
  params.validate();
  if (examples.empty()) throw Error(ErrorCategory::Training, "induction needs at least one example");
  CoverageCache local;
  CoverageCache& use = cache != nullptr ? *cache : local;
  use.bind(examples, facts);
  return Inducer(target, examples, facts, modes, params, use).run();
}

}  // namespace relboost::rrt
