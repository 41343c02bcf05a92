#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relboost/example.hpp"
#include "relboost/fact_base.hpp"
#include "relboost/induce.hpp"
#include "relboost/logic.hpp"

namespace relboost::pipeline {

/// One (publication, author) record. Strings are normalized constants.
struct PublicationRecord {
  std::string pub_id;
  std::optional<std::string> author_id;  // missing ids are kept until preprocess()
  std::string author_name;
  std::optional<std::string> affiliation;
  std::optional<std::string> venue;
  std::string title;
  std::vector<std::string> coauthors;
  std::vector<std::string> references;  // never contains pub_id
  int first_author_count = 1;

  friend bool operator==(const PublicationRecord&, const PublicationRecord&) = default;
};

/// JSON Lines, one object per line with the fields of PublicationRecord.
/// `pub_id` is required; absent or null optional fields stay missing.
/// Self-references are dropped. Throws Error(Parse) naming the 1-based
/// record index of the first malformed record.
std::vector<PublicationRecord> parse_records(std::string_view jsonl);
std::vector<PublicationRecord> ingest(const std::filesystem::path& path);
std::string render_records(std::span<const PublicationRecord> records);

struct PreprocessOptions {
  double sample_fraction = 1.0;  // share of surviving authors kept, all their records with them
  std::size_t min_pubs = 10;
  std::uint64_t seed = 0;
};

/// Drops records without author_id, records with more than one first
/// author, and authors with fewer than `min_pubs` records, then samples
/// authors. Record order is preserved.
std::vector<PublicationRecord> preprocess(std::span<const PublicationRecord> records,
                                          const PreprocessOptions& options);

/// pub(pub, author), aut(pub, namestr), aff(pub, affstr), ven(pub, venuestr),
/// ref(pub, pub), coa(pub, namestr), title(pub, titlestr).
logic::Schema default_schema();
/// The target predicate pub/2 of default_schema().
logic::PredicateSignature default_target();
/// Mode declarations for default_schema(): each attribute can be followed
/// from a publication to its value or from a value back to publications;
/// references also go both ways or are checked with both ends bound;
/// authorship can be followed from an author.
std::vector<rrt::ModeDeclaration> default_modes();
std::string default_modes_text();

struct KnowledgeGraph {
  logic::FactBase background;               // attribute facts, no authorship
  std::vector<LabeledExample> positives;  // pub(pub_id, author_id) per record
};

/// One fact per present attribute, coauthor and reference; one positive
/// example per record with an author_id.
KnowledgeGraph to_facts(std::span<const PublicationRecord> records);

/// Distinct author constants of the examples, in first-occurrence order.
std::vector<Symbol> authors_of(std::span<const LabeledExample> examples);

/// floor(ratio * |positives|) distinct pub(p, a) pairs with p a publication
/// of some positive and a in `authors`, none of them positive. Throws
/// Error(Data) when too few such pairs exist.
std::vector<LabeledExample> sample_negatives(std::span<const LabeledExample> positives,
                                             std::span<const Symbol> authors, double ratio, std::uint64_t seed);

/// Flips exactly floor(pos_rate * |pos|) positives and floor(neg_rate *
/// |neg|) negatives, both chosen uniformly from the original labels.
std::vector<LabeledExample> flip_labels(std::span<const LabeledExample> examples, double pos_rate,
                                        double neg_rate, std::uint64_t seed);
/// Same selection as flip_labels(), but the chosen labels become unobserved.
std::vector<LabeledExample> hide_labels(std::span<const LabeledExample> examples, double pos_rate,
                                        double neg_rate, std::uint64_t seed);

struct DatasetSplit {
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> test;
  double ratio = 0.8;
};

/// Uniform split by example; round(ratio * n) examples go to train. Both
/// parts keep the input order.
DatasetSplit split(std::span<const LabeledExample> examples, double ratio, std::uint64_t seed);

/// publication count -> number of authors with that many records.
std::map<std::size_t, std::size_t> author_distribution(std::span<const PublicationRecord> records);
/// Tab-separated `pubs authors log10_pubs log10_authors` rows.
std::string render_distribution(const std::map<std::size_t, std::size_t>& histogram);

/// Synthetic publication records with the regularities real authorship
/// data shows: authors reuse a name (drawn from a small pool, so names
/// collide), a preferred affiliation, two favourite venues, a circle of
/// coauthors, and cite their own work.
struct SyntheticOptions {
  std::size_t authors = 200;
  std::size_t pubs_per_author = 10;
  /// When set, per-author counts follow P(k) ~ k^-exponent on
  /// [1, max_pubs] instead of being fixed.
  bool power_law = false;
  double exponent = 2.0;
  std::size_t max_pubs = 200;

  std::size_t names = 50;
  std::size_t affiliations = 30;
  std::size_t venues = 20;
  double preferred_affiliation = 0.8;
  double favourite_venue = 0.7;
  std::size_t circle = 6;             // coauthor names per author
  double circle_coauthor = 0.8;       // chance a listed coauthor is from the circle
  std::size_t max_references = 3;
  double self_citation = 0.5;
  /// Share of extra records that preprocess() must drop (missing author_id
  /// or several first authors).
  double dirty_fraction = 0.0;
  std::uint64_t seed = 0;
};

std::vector<PublicationRecord> synthesize(const SyntheticOptions& options);

/// Noise applied to training labels only.
enum class Corruption { None, Flip, Hide };

struct ExperimentOptions {
  double negative_ratio = 2.0;
  double train_ratio = 0.8;
  Corruption corruption = Corruption::None;
  double pos_rate = 0.5;
  double neg_rate = 0.25;
  std::uint64_t seed = 0;
};

/// Train and test examples plus the fact base both are evaluated against:
/// background facts and the positively labelled (observed, possibly noisy)
/// training authorships. Test labels are clean.
struct Experiment {
  logic::FactBase facts;
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> test;
};

Experiment prepare_experiment(const KnowledgeGraph& graph, const ExperimentOptions& options);

}  // namespace relboost::pipeline
