#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "relboost/error.hpp"
#include "relboost/pipeline.hpp"
#include "relboost/text_format.hpp"

using namespace relboost;
using namespace relboost::pipeline;
using logic::parse_atom;

namespace {

PublicationRecord record(const std::string& pub, const std::string& author) {
  PublicationRecord r;
  r.pub_id = pub;
  r.author_id = author;
  r.author_name = "name_" + author;
  r.title = "title_" + pub;
  return r;
}

std::vector<PublicationRecord> author_with(const std::string& author, int pubs) {
  std::vector<PublicationRecord> out;
  for (int i = 0; i < pubs; ++i) out.push_back(record(author + "_p" + std::to_string(i), author));
  return out;
}

std::vector<LabeledExample> examples(std::size_t pos, std::size_t neg) {
  std::vector<LabeledExample> out;
  for (std::size_t i = 0; i < pos + neg; ++i) {
    out.push_back({parse_atom("pub(p" + std::to_string(i) + ", a" + std::to_string(i % 7) + ")"),
                   i < pos ? Label::Positive : Label::Negative});
  }
  return out;
}

std::map<Label, std::size_t> label_counts(const std::vector<LabeledExample>& xs) {
  std::map<Label, std::size_t> out;
  for (const auto& x : xs) ++out[x.label];
  return out;
}

std::vector<LabeledExample> positives(std::size_t n) {
  std::vector<LabeledExample> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({parse_atom("pub(p" + std::to_string(i) + ", a" + std::to_string(i % 5) + ")"), Label::Positive});
  }
  return out;
}

}  // namespace

TEST(Ingest, FullAndMissingFields) {
  const auto records = parse_records(
      R"({"pub_id": "p1", "author_id": "a1", "author_name": "Ann Lee", "affiliation": "MIT", "venue": "KDD", )"
      R"("title": "On Trees", "coauthors": ["Bo"], "references": ["p2", "p1"], "first_author_count": 1})"
      "\n\n"
      R"({"pub_id": "p2", "author_name": "Ann Lee", "title": "x"})"
      "\n");
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].author_id, "a1");
  EXPECT_EQ(records[0].references, std::vector<std::string>{"p2"});
  EXPECT_FALSE(records[1].author_id.has_value());
  EXPECT_FALSE(records[1].venue.has_value());
  EXPECT_EQ(parse_records(render_records(records)), records);
  EXPECT_TRUE(parse_records("").empty());
}

TEST(Ingest, MalformedRecordNamesIndex) {
  try {
    parse_records("{\"pub_id\": \"p1\"}\n{\"pub_id\": 5}\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::Parse);
    EXPECT_NE(std::string(e.what()).find("record 2"), std::string::npos);
  }
  EXPECT_THROW(parse_records("{not json\n"), Error);
  EXPECT_THROW(parse_records("{\"author_id\": \"a\"}\n"), Error);
  EXPECT_THROW(ingest("/nonexistent/records.jsonl"), Error);
}

TEST(Preprocess, MinPubsBoundary) {
  auto records = author_with("nine", 9);
  const auto ten = author_with("ten", 10);
  records.insert(records.end(), ten.begin(), ten.end());
  const auto out = preprocess(records, {});
  ASSERT_EQ(out.size(), 10u);
  for (const auto& r : out) EXPECT_EQ(r.author_id, "ten");
}

TEST(Preprocess, MinPubsOneOnlyDropsBrokenRecords) {
  auto records = author_with("a", 3);
  records[1].author_id.reset();
  records[2].first_author_count = 2;
  const auto out = preprocess(records, {.min_pubs = 1});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].pub_id, "a_p0");
  EXPECT_THROW(preprocess(records, {.min_pubs = 0}), Error);
}

// Independent count of what survives filtering, on a power-law corpus with
// dirty records mixed in.
TEST(Preprocess, MatchesCountingOracle) {
  SyntheticOptions so;
  so.authors = 400;
  so.power_law = true;
  so.max_pubs = 60;
  so.exponent = 1.5;
  so.dirty_fraction = 0.1;
  so.seed = 7;
  const auto records = synthesize(so);

  std::map<std::string, std::size_t> clean;
  for (const auto& r : records) {
    if (r.author_id && r.first_author_count == 1) ++clean[*r.author_id];
  }
  std::size_t authors = 0, pubs = 0;
  for (const auto& [a, n] : clean) {
    if (n >= 10) {
      ++authors;
      pubs += n;
    }
  }
  const auto out = preprocess(records, {});
  std::set<std::string> kept;
  for (const auto& r : out) kept.insert(*r.author_id);
  EXPECT_EQ(out.size(), pubs);
  EXPECT_EQ(kept.size(), authors);
  EXPECT_GT(authors, 0u);
  EXPECT_EQ(preprocess(out, {}), out);

  const auto sampled = preprocess(records, {.sample_fraction = 0.5, .seed = 3});
  std::set<std::string> sampled_authors;
  for (const auto& r : sampled) sampled_authors.insert(*r.author_id);
  EXPECT_EQ(sampled_authors.size(), static_cast<std::size_t>(std::llround(0.5 * static_cast<double>(authors))));
  for (const auto& a : sampled_authors) {
    EXPECT_EQ(static_cast<std::size_t>(std::count_if(sampled.begin(), sampled.end(),
                                                     [&](const auto& r) { return r.author_id == a; })),
              clean[a]);
  }
  EXPECT_EQ(preprocess(records, {.sample_fraction = 0.5, .seed = 3}), sampled);
}

TEST(ToFacts, CountsPerRecord) {
  PublicationRecord r = record("p1", "a1");
  r.affiliation = "mit";
  r.venue = "kdd";
  r.coauthors = {"bo", "cy"};
  r.references = {"p2", "p3", "p4"};
  const auto graph = to_facts(std::vector{r});
  EXPECT_EQ(graph.positives.size(), 1u);
  EXPECT_EQ(graph.positives[0].atom, parse_atom("pub(p1, a1)"));
  EXPECT_EQ(graph.background.size(), 9u);
  EXPECT_TRUE(graph.background.contains(parse_atom("ref(p1, p3)")));
  EXPECT_FALSE(graph.background.contains(parse_atom("pub(p1, a1)")));

  r.venue.reset();
  const auto no_venue = to_facts(std::vector{r});
  EXPECT_EQ(no_venue.background.size(), 8u);
  for (const auto& f : no_venue.background.facts()) EXPECT_NE(f.predicate.str(), "ven");
}

TEST(ToFacts, SameAuthorSharesConstant) {
  const auto graph = to_facts(author_with("a7", 2));
  ASSERT_EQ(graph.positives.size(), 2u);
  EXPECT_EQ(graph.positives[0].atom.args[1], graph.positives[1].atom.args[1]);
  EXPECT_EQ(authors_of(graph.positives).size(), 1u);
}

TEST(Negatives, CountAndDisjointness) {
  const auto pos = positives(10);
  const auto authors = authors_of(pos);
  const auto neg = sample_negatives(pos, authors, 2.0, 1);
  ASSERT_EQ(neg.size(), 20u);
  std::set<std::string> seen;
  for (const auto& p : pos) seen.insert(logic::render(p.atom));
  std::set<std::string> drawn;
  for (const auto& n : neg) {
    EXPECT_EQ(n.label, Label::Negative);
    EXPECT_FALSE(seen.contains(logic::render(n.atom)));
    EXPECT_TRUE(drawn.insert(logic::render(n.atom)).second);
  }
  EXPECT_TRUE(sample_negatives(pos, authors, 0.0, 1).empty());
  EXPECT_EQ(sample_negatives(pos, authors, 2.0, 1), neg);
}

TEST(Negatives, InsufficientPairsIsDataError) {
  const auto pos = positives(3);
  const std::vector<Symbol> one_author = {Symbol::intern("a0")};
  try {
    sample_negatives(pos, one_author, 2.0, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::Data);
  }
}

TEST(Corruption, FlipExactCounts) {
  const auto xs = examples(100, 200);
  const auto flipped = flip_labels(xs, 0.5, 0.25, 4);
  ASSERT_EQ(flipped.size(), xs.size());
  std::size_t pos_to_neg = 0, neg_to_pos = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    EXPECT_EQ(flipped[i].atom, xs[i].atom);
    pos_to_neg += xs[i].label == Label::Positive && flipped[i].label == Label::Negative;
    neg_to_pos += xs[i].label == Label::Negative && flipped[i].label == Label::Positive;
  }
  EXPECT_EQ(pos_to_neg, 50u);
  EXPECT_EQ(neg_to_pos, 50u);
  EXPECT_EQ(label_counts(flipped)[Label::Positive], 100u);
  EXPECT_EQ(label_counts(flipped)[Label::Negative], 200u);
  EXPECT_EQ(flip_labels(xs, 0.0, 0.0, 4), xs);
  const auto inverted = flip_labels(xs, 1.0, 1.0, 4);
  for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_NE(inverted[i].label, xs[i].label);
  EXPECT_EQ(flip_labels(xs, 0.5, 0.25, 4), flipped);
  EXPECT_THROW(flip_labels(xs, 1.5, 0.0, 4), Error);
}

TEST(Corruption, HideExactCounts) {
  const auto xs = examples(100, 200);
  const auto hidden = hide_labels(xs, 0.5, 0.25, 5);
  auto counts = label_counts(hidden);
  EXPECT_EQ(counts[Label::Unobserved], 100u);
  EXPECT_EQ(counts[Label::Positive], 50u);
  EXPECT_EQ(counts[Label::Negative], 150u);
  for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_EQ(hidden[i].atom, xs[i].atom);
  EXPECT_EQ(hide_labels(xs, 0.0, 0.0, 5), xs);
}

TEST(Split, DisjointAndOrdered) {
  const auto xs = examples(40, 60);
  const auto parts = split(xs, 0.8, 2);
  EXPECT_EQ(parts.train.size(), 80u);
  EXPECT_EQ(parts.test.size(), 20u);
  std::set<std::string> train;
  for (const auto& e : parts.train) train.insert(logic::render(e.atom));
  for (const auto& e : parts.test) EXPECT_FALSE(train.contains(logic::render(e.atom)));
  auto position = [&](const LabeledExample& e) { return std::find(xs.begin(), xs.end(), e) - xs.begin(); };
  for (std::size_t i = 1; i < parts.train.size(); ++i) EXPECT_LT(position(parts.train[i - 1]), position(parts.train[i]));
}

TEST(Experiment, FactBaseHoldsOnlyObservedTrainingPositives) {
  SyntheticOptions so;
  so.authors = 30;
  const auto graph = to_facts(synthesize(so));
  ExperimentOptions eo;
  eo.corruption = Corruption::Flip;
  const auto ex = prepare_experiment(graph, eo);
  EXPECT_EQ(ex.train.size() + ex.test.size(), 3 * graph.positives.size());
  std::size_t train_pos = 0;
  for (const auto& e : ex.train) {
    if (e.label == Label::Positive) {
      ++train_pos;
      EXPECT_TRUE(ex.facts.contains(e.atom));
    }
  }
  for (const auto& e : ex.test) {
    if (e.label == Label::Positive) {
      EXPECT_FALSE(ex.facts.contains(e.atom));
    }
  }
  EXPECT_EQ(ex.facts.size(), graph.background.size() + train_pos);
}

TEST(Distribution, Examples) {
  std::vector<PublicationRecord> records = author_with("x", 1);
  for (const auto& r : author_with("y", 1)) records.push_back(r);
  for (const auto& r : author_with("z", 5)) records.push_back(r);
  EXPECT_EQ(author_distribution(records), (std::map<std::size_t, std::size_t>{{1, 2}, {5, 1}}));
  EXPECT_TRUE(author_distribution({}).empty());
  const std::string table = render_distribution(author_distribution(records));
  EXPECT_NE(table.find("5\t1\t"), std::string::npos);
}

// The generator draws per-author counts from P(k) proportional to k^-s; the
// observed histogram must match that law within sampling noise.
TEST(Synthesize, PowerLawRoundTrip) {
  SyntheticOptions so;
  so.authors = 20000;
  so.power_law = true;
  so.exponent = 2.0;
  so.max_pubs = 200;
  so.max_references = 0;
  so.seed = 11;
  const auto histogram = author_distribution(synthesize(so));
  double z = 0;
  for (int k = 1; k <= 200; ++k) z += std::pow(k, -2.0);
  for (int k : {1, 2, 3, 5}) {
    const double p = std::pow(k, -2.0) / z;
    const double expected = p * 20000.0;
    const double sd = std::sqrt(20000.0 * p * (1 - p));
    const auto it = histogram.find(static_cast<std::size_t>(k));
    ASSERT_NE(it, histogram.end());
    EXPECT_NEAR(static_cast<double>(it->second), expected, 4 * sd) << "k=" << k;
  }
  EXPECT_LE(histogram.rbegin()->first, 200u);
}

TEST(Synthesize, SeedDeterministic) {
  SyntheticOptions so;
  so.authors = 20;
  so.dirty_fraction = 0.2;
  EXPECT_EQ(synthesize(so), synthesize(so));
  auto other = so;
  other.seed = 1;
  EXPECT_NE(synthesize(so), synthesize(other));
  for (const auto& r : synthesize(so)) {
    EXPECT_FALSE(r.pub_id.empty());
    EXPECT_EQ(std::count(r.references.begin(), r.references.end(), r.pub_id), 0);
  }
}

TEST(Modes, DefaultModesParse) {
  EXPECT_FALSE(default_modes().empty());
  EXPECT_EQ(rrt::render_modes(default_modes()), rrt::render_modes(rrt::parse_modes(default_modes_text(), default_schema())));
}
