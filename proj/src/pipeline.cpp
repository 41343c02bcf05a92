#include "relboost/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "relboost/error.hpp"
#include "relboost/text_format.hpp"

namespace relboost::pipeline {

using logic::Atom;
using logic::Term;
using nlohmann::json;

namespace {

std::string require_string(const json& object, const char* field, std::size_t index) {
  auto it = object.find(field);
  if (it == object.end() || it->is_null()) {
    throw Error(ErrorCategory::Parse, "record " + std::to_string(index) + ": missing field '" + field + "'");
  }
  if (!it->is_string()) {
    throw Error(ErrorCategory::Parse, "record " + std::to_string(index) + ": field '" + field + "' must be a string");
  }
  return logic::normalize_constant(it->get<std::string>());
}

std::optional<std::string> optional_string(const json& object, const char* field, std::size_t index) {
  auto it = object.find(field);
  if (it == object.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw Error(ErrorCategory::Parse, "record " + std::to_string(index) + ": field '" + field + "' must be a string");
  }
  std::string value = logic::normalize_constant(it->get<std::string>());
  if (value.empty()) return std::nullopt;
  return value;
}

std::vector<std::string> string_list(const json& object, const char* field, std::size_t index) {
  std::vector<std::string> out;
  auto it = object.find(field);
  if (it == object.end() || it->is_null()) return out;
  if (!it->is_array()) {
    throw Error(ErrorCategory::Parse, "record " + std::to_string(index) + ": field '" + field + "' must be a list");
  }
  for (const auto& item : *it) {
    if (!item.is_string()) {
      throw Error(ErrorCategory::Parse,
                  "record " + std::to_string(index) + ": field '" + field + "' must hold strings");
    }
    std::string value = logic::normalize_constant(item.get<std::string>());
    if (!value.empty()) out.push_back(std::move(value));
  }
  return out;
}

json to_json(const PublicationRecord& record) {
  json out = json::object();
  out["pub_id"] = record.pub_id;
  out["author_id"] = record.author_id ? json(*record.author_id) : json(nullptr);
  out["author_name"] = record.author_name;
  out["affiliation"] = record.affiliation ? json(*record.affiliation) : json(nullptr);
  out["venue"] = record.venue ? json(*record.venue) : json(nullptr);
  out["title"] = record.title;
  out["coauthors"] = record.coauthors;
  out["references"] = record.references;
  out["first_author_count"] = record.first_author_count;
  return out;
}

Atom atom2(Symbol predicate, const std::string& a, const std::string& b) {
  return Atom(predicate, {Term::constant(Symbol::intern(a)), Term::constant(Symbol::intern(b))});
}

// Indices of `count` uniformly chosen members of `pool`.
std::vector<std::size_t> choose(std::vector<std::size_t> pool, std::size_t count, std::mt19937_64& rng) {
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(std::min(count, pool.size()));
  std::sort(pool.begin(), pool.end());
  return pool;
}

void check_rate(double rate, const char* name) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw Error(ErrorCategory::Config, std::string(name) + " must be in [0, 1]");
}

// Indices selected for corruption: floor(pos_rate * |pos|) positives and
// floor(neg_rate * |neg|) negatives.
std::vector<std::size_t> corrupted(std::span<const LabeledExample> examples, double pos_rate, double neg_rate,
                                   std::uint64_t seed) {
  check_rate(pos_rate, "positive rate");
  check_rate(neg_rate, "negative rate");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (examples[i].label == Label::Positive) pos.push_back(i);
    if (examples[i].label == Label::Negative) neg.push_back(i);
  }
  std::mt19937_64 rng(seed);
  auto n_pos = static_cast<std::size_t>(std::floor(pos_rate * static_cast<double>(pos.size())));
  auto n_neg = static_cast<std::size_t>(std::floor(neg_rate * static_cast<double>(neg.size())));
  std::vector<std::size_t> out = choose(pos, n_pos, rng);
  const std::vector<std::size_t> chosen_neg = choose(neg, n_neg, rng);
  out.insert(out.end(), chosen_neg.begin(), chosen_neg.end());
  return out;
}

}  // namespace

std::vector<PublicationRecord> parse_records(std::string_view jsonl) {
  std::vector<PublicationRecord> out;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  std::size_t index = 0;
  while (std::getline(in, line)) {
    if (logic::trim(line).empty()) continue;
    ++index;
    json object;
    try {
      object = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCategory::Parse, "record " + std::to_string(index) + ": " + e.what());
    }
    if (!object.is_object()) throw Error(ErrorCategory::Parse, "record " + std::to_string(index) + ": not an object");

    PublicationRecord record;
    record.pub_id = require_string(object, "pub_id", index);
    if (record.pub_id.empty()) throw Error(ErrorCategory::Parse, "record " + std::to_string(index) + ": empty pub_id");
    record.author_id = optional_string(object, "author_id", index);
    record.author_name = optional_string(object, "author_name", index).value_or("");
    record.affiliation = optional_string(object, "affiliation", index);
    record.venue = optional_string(object, "venue", index);
    record.title = optional_string(object, "title", index).value_or("");
    record.coauthors = string_list(object, "coauthors", index);
    record.references = string_list(object, "references", index);
    std::erase(record.references, record.pub_id);
    if (auto it = object.find("first_author_count"); it != object.end() && !it->is_null()) {
      if (!it->is_number_integer()) {
        throw Error(ErrorCategory::Parse,
                    "record " + std::to_string(index) + ": field 'first_author_count' must be an integer");
      }
      record.first_author_count = it->get<int>();
    }
    out.push_back(std::move(record));
  }
  return out;
}

std::vector<PublicationRecord> ingest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::Io, "cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_records(text.str());
}

std::string render_records(std::span<const PublicationRecord> records) {
  std::string out;
  for (const auto& record : records) out += to_json(record).dump() + "\n";
  return out;
}

std::vector<PublicationRecord> preprocess(std::span<const PublicationRecord> records,
                                          const PreprocessOptions& options) {
  if (options.min_pubs < 1) throw Error(ErrorCategory::Config, "min_pubs must be >= 1");
  check_rate(options.sample_fraction, "sample_fraction");

  std::vector<const PublicationRecord*> kept;
  std::unordered_map<std::string, std::size_t> pubs;
  std::vector<std::string> author_order;
  for (const auto& record : records) {
    if (!record.author_id || record.first_author_count > 1) continue;
    kept.push_back(&record);
    if (pubs[*record.author_id]++ == 0) author_order.push_back(*record.author_id);
  }

  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < author_order.size(); ++i) {
    if (pubs[author_order[i]] >= options.min_pubs) eligible.push_back(i);
  }
  std::unordered_set<std::string> authors;
  if (options.sample_fraction >= 1.0) {
    for (auto i : eligible) authors.insert(author_order[i]);
  } else {
    std::mt19937_64 rng(options.seed);
    const auto count = static_cast<std::size_t>(
        std::llround(options.sample_fraction * static_cast<double>(eligible.size())));
    for (auto i : choose(eligible, count, rng)) authors.insert(author_order[i]);
  }

  std::vector<PublicationRecord> out;
  for (const auto* record : kept) {
    if (authors.contains(*record->author_id)) out.push_back(*record);
  }
  return out;
}

logic::Schema default_schema() {
  return logic::parse_schema(
      "pub(pub, author).\n"
      "aut(pub, namestr).\n"
      "aff(pub, affstr).\n"
      "ven(pub, venuestr).\n"
      "ref(pub, pub).\n"
      "coa(pub, namestr).\n"
      "title(pub, titlestr).\n");
}

logic::PredicateSignature default_target() { return *default_schema().find("pub", 2); }

std::string default_modes_text() {
  return "mode: pub(-pub, +author).\n"
         "mode: pub(+pub, +author).\n"
         "mode: aut(+pub, -namestr).\n"
         "mode: aut(-pub, +namestr).\n"
         "mode: aff(+pub, -affstr).\n"
         "mode: aff(-pub, +affstr).\n"
         "mode: ven(+pub, -venuestr).\n"
         "mode: ven(-pub, +venuestr).\n"
         "mode: ref(+pub, -pub).\n"
         "mode: ref(-pub, +pub).\n"
         "mode: ref(+pub, +pub).\n"
         "mode: coa(+pub, -namestr).\n"
         "mode: coa(-pub, +namestr).\n"
         "mode: title(+pub, -titlestr).\n";
}

std::vector<rrt::ModeDeclaration> default_modes() { return rrt::parse_modes(default_modes_text(), default_schema()); }

KnowledgeGraph to_facts(std::span<const PublicationRecord> records) {
  KnowledgeGraph graph{logic::FactBase(default_schema()), {}};
  const Symbol pub = Symbol::intern("pub"), aut = Symbol::intern("aut"), aff = Symbol::intern("aff"),
               ven = Symbol::intern("ven"), ref = Symbol::intern("ref"), coa = Symbol::intern("coa"),
               title = Symbol::intern("title");
  for (const auto& record : records) {
    if (!record.author_name.empty()) graph.background.add(atom2(aut, record.pub_id, record.author_name));
    if (record.affiliation) graph.background.add(atom2(aff, record.pub_id, *record.affiliation));
    if (record.venue) graph.background.add(atom2(ven, record.pub_id, *record.venue));
    if (!record.title.empty()) graph.background.add(atom2(title, record.pub_id, record.title));
    for (const auto& name : record.coauthors) graph.background.add(atom2(coa, record.pub_id, name));
    for (const auto& cited : record.references) graph.background.add(atom2(ref, record.pub_id, cited));
    if (record.author_id) {
      graph.positives.push_back({atom2(pub, record.pub_id, *record.author_id), Label::Positive, 0.0});
    }
  }
  return graph;
}

std::vector<Symbol> authors_of(std::span<const LabeledExample> examples) {
  std::vector<Symbol> out;
  std::unordered_set<Symbol> seen;
  for (const auto& example : examples) {
    const Symbol author = example.atom.args.at(1).symbol();
    if (seen.insert(author).second) out.push_back(author);
  }
  return out;
}

std::vector<LabeledExample> sample_negatives(std::span<const LabeledExample> positives,
                                             std::span<const Symbol> authors, double ratio, std::uint64_t seed) {
  if (!(ratio >= 0.0)) throw Error(ErrorCategory::Config, "negative ratio must be >= 0");
  const auto wanted = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(positives.size())));
  if (wanted == 0) return {};

  const Symbol predicate = positives.front().atom.predicate;
  std::vector<Symbol> pubs;
  std::unordered_set<Symbol> seen_pubs;
  std::set<std::pair<std::uint32_t, std::uint32_t>> positive_pairs;
  for (const auto& example : positives) {
    const Symbol p = example.atom.args.at(0).symbol();
    if (seen_pubs.insert(p).second) pubs.push_back(p);
    positive_pairs.emplace(p.id(), example.atom.args.at(1).symbol().id());
  }
  std::vector<Symbol> pool;
  std::unordered_set<Symbol> seen_authors;
  for (Symbol a : authors) {
    if (seen_authors.insert(a).second) pool.push_back(a);
  }

  std::size_t positives_in_pool = 0;
  std::unordered_set<std::uint32_t> pool_ids;
  for (Symbol a : pool) pool_ids.insert(a.id());
  for (const auto& pair : positive_pairs) positives_in_pool += pool_ids.contains(pair.second) ? 1 : 0;
  const std::size_t available = pubs.size() * pool.size() - positives_in_pool;
  if (wanted > available) {
    throw Error(ErrorCategory::Data, "cannot sample " + std::to_string(wanted) + " negatives: only " +
                                         std::to_string(available) + " non-positive pairs exist");
  }

  auto make = [&](Symbol p, Symbol a) {
    return LabeledExample{Atom(predicate, {Term::constant(p), Term::constant(a)}), Label::Negative, 0.0};
  };
  std::mt19937_64 rng(seed);
  std::vector<LabeledExample> out;
  out.reserve(wanted);
  if (2 * wanted > available) {
    std::vector<std::pair<Symbol, Symbol>> all;
    for (Symbol p : pubs) {
      for (Symbol a : pool) {
        if (!positive_pairs.contains({p.id(), a.id()})) all.emplace_back(p, a);
      }
    }
    std::shuffle(all.begin(), all.end(), rng);
    for (std::size_t i = 0; i < wanted; ++i) out.push_back(make(all[i].first, all[i].second));
    return out;
  }
  std::uniform_int_distribution<std::size_t> pick_pub(0, pubs.size() - 1), pick_author(0, pool.size() - 1);
  std::set<std::pair<std::uint32_t, std::uint32_t>> taken;
  while (out.size() < wanted) {
    const Symbol p = pubs[pick_pub(rng)];
    const Symbol a = pool[pick_author(rng)];
    const std::pair<std::uint32_t, std::uint32_t> key{p.id(), a.id()};
    if (positive_pairs.contains(key) || !taken.insert(key).second) continue;
    out.push_back(make(p, a));
  }
  return out;
}

std::vector<LabeledExample> flip_labels(std::span<const LabeledExample> examples, double pos_rate,
                                        double neg_rate, std::uint64_t seed) {
  std::vector<LabeledExample> out(examples.begin(), examples.end());
  for (auto i : corrupted(examples, pos_rate, neg_rate, seed)) {
    out[i].label = out[i].label == Label::Positive ? Label::Negative : Label::Positive;
  }
  return out;
}

std::vector<LabeledExample> hide_labels(std::span<const LabeledExample> examples, double pos_rate,
                                        double neg_rate, std::uint64_t seed) {
  std::vector<LabeledExample> out(examples.begin(), examples.end());
  for (auto i : corrupted(examples, pos_rate, neg_rate, seed)) out[i].label = Label::Unobserved;
  return out;
}

DatasetSplit split(std::span<const LabeledExample> examples, double ratio, std::uint64_t seed) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw Error(ErrorCategory::Config, "split ratio must be in [0, 1]");
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(examples.size())));
  std::vector<char> in_train(examples.size(), 0);
  for (std::size_t i = 0; i < n_train; ++i) in_train[order[i]] = 1;
  DatasetSplit out;
  out.ratio = ratio;
  for (std::size_t i = 0; i < examples.size(); ++i) (in_train[i] ? out.train : out.test).push_back(examples[i]);
  return out;
}

std::map<std::size_t, std::size_t> author_distribution(std::span<const PublicationRecord> records) {
  std::unordered_map<std::string, std::size_t> per_author;
  for (const auto& record : records) {
    if (record.author_id) ++per_author[*record.author_id];
  }
  std::map<std::size_t, std::size_t> out;
  for (const auto& [author, n] : per_author) ++out[n];
  return out;
}

std::string render_distribution(const std::map<std::size_t, std::size_t>& histogram) {
  std::string out = "pubs\tauthors\tlog10_pubs\tlog10_authors\n";
  for (const auto& [pubs, authors] : histogram) {
    char buffer[96];
    std::snprintf(buffer, sizeof(buffer), "%zu\t%zu\t%.4f\t%.4f\n", pubs, authors,
                  std::log10(static_cast<double>(pubs)), std::log10(static_cast<double>(authors)));
    out += buffer;
  }
  return out;
}

std::vector<PublicationRecord> synthesize(const SyntheticOptions& options) {
  if (options.authors == 0) throw Error(ErrorCategory::Config, "synthetic data needs at least one author");
  if (options.names == 0 || options.affiliations == 0 || options.venues == 0) {
    throw Error(ErrorCategory::Config, "synthetic pools must be non-empty");
  }
  std::mt19937_64 rng(options.seed);
  auto uniform = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  auto chance = [&](double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; };

  std::vector<std::size_t> counts(options.authors, options.pubs_per_author);
  if (options.power_law) {
    std::vector<double> weights;
    for (std::size_t k = 1; k <= options.max_pubs; ++k) weights.push_back(std::pow(static_cast<double>(k), -options.exponent));
    std::discrete_distribution<std::size_t> draw(weights.begin(), weights.end());
    for (auto& c : counts) c = draw(rng) + 1;
  }

  const std::size_t coauthor_pool = std::max<std::size_t>(2 * options.authors, options.circle);
  struct Author {
    std::string id, name, affiliation;
    std::size_t venues[2];
    std::vector<std::size_t> circle;
    std::vector<std::size_t> pubs;
  };
  std::vector<Author> authors(options.authors);
  std::size_t next_pub = 0;
  for (std::size_t i = 0; i < options.authors; ++i) {
    Author& a = authors[i];
    a.id = "a" + std::to_string(i);
    a.name = "name_" + std::to_string(uniform(options.names));
    a.affiliation = "aff_" + std::to_string(uniform(options.affiliations));
    a.venues[0] = uniform(options.venues);
    a.venues[1] = uniform(options.venues);
    for (std::size_t c = 0; c < options.circle; ++c) a.circle.push_back(uniform(coauthor_pool));
    for (std::size_t k = 0; k < counts[i]; ++k) a.pubs.push_back(next_pub++);
  }
  const std::size_t total = next_pub;

  std::vector<PublicationRecord> out;
  out.reserve(total);
  for (const Author& a : authors) {
    for (std::size_t p : a.pubs) {
      PublicationRecord r;
      r.pub_id = "p" + std::to_string(p);
      r.author_id = a.id;
      r.author_name = a.name;
      r.affiliation = chance(options.preferred_affiliation) ? a.affiliation
                                                             : "aff_" + std::to_string(uniform(options.affiliations));
      r.venue = "venue_" + std::to_string(chance(options.favourite_venue) ? a.venues[uniform(2)]
                                                                          : uniform(options.venues));
      r.title = "title_" + std::to_string(p);
      const std::size_t n_coauthors = 1 + uniform(3);
      for (std::size_t c = 0; c < n_coauthors; ++c) {
        const std::size_t who = chance(options.circle_coauthor) && !a.circle.empty() ? a.circle[uniform(a.circle.size())]
                                                                                     : uniform(coauthor_pool);
        std::string name = "coauthor_" + std::to_string(who);
        if (std::find(r.coauthors.begin(), r.coauthors.end(), name) == r.coauthors.end()) r.coauthors.push_back(name);
      }
      const std::size_t n_refs = options.max_references == 0 ? 0 : uniform(options.max_references + 1);
      for (std::size_t k = 0; k < n_refs && total > 1; ++k) {
        std::size_t cited = 0;
        if (a.pubs.size() > 1 && chance(options.self_citation)) {
          do cited = a.pubs[uniform(a.pubs.size())]; while (cited == p);
        } else {
          do cited = uniform(total); while (cited == p);
        }
        std::string id = "p" + std::to_string(cited);
        if (std::find(r.references.begin(), r.references.end(), id) == r.references.end()) r.references.push_back(id);
      }
      out.push_back(std::move(r));
    }
  }

  const auto dirty = static_cast<std::size_t>(std::llround(options.dirty_fraction * static_cast<double>(total)));
  for (std::size_t d = 0; d < dirty; ++d) {
    const Author& a = authors[uniform(authors.size())];
    PublicationRecord r;
    r.pub_id = "p" + std::to_string(total + d);
    r.author_name = a.name;
    r.title = "title_" + std::to_string(total + d);
    if (d % 2 == 0) {
      r.author_id = std::nullopt;
    } else {
      r.author_id = a.id;
      r.first_author_count = 2;
    }
    out.push_back(std::move(r));
  }
  return out;
}

Experiment prepare_experiment(const KnowledgeGraph& graph, const ExperimentOptions& options) {
  if (graph.positives.empty()) throw Error(ErrorCategory::Data, "no positive examples");
  const std::vector<Symbol> authors = authors_of(graph.positives);
  std::vector<LabeledExample> examples = graph.positives;
  const auto negatives = sample_negatives(graph.positives, authors, options.negative_ratio, options.seed);
  examples.insert(examples.end(), negatives.begin(), negatives.end());

  DatasetSplit parts = split(examples, options.train_ratio, options.seed + 1);
  Experiment out;
  switch (options.corruption) {
    case Corruption::None: out.train = std::move(parts.train); break;
    case Corruption::Flip: out.train = flip_labels(parts.train, options.pos_rate, options.neg_rate, options.seed + 2); break;
    case Corruption::Hide: out.train = hide_labels(parts.train, options.pos_rate, options.neg_rate, options.seed + 2); break;
  }
  out.test = std::move(parts.test);
  out.facts = with_known_positives(graph.background, out.train);
  return out;
}

}  // namespace relboost::pipeline
