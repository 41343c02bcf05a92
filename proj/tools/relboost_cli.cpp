#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relboost/advice.hpp"
#include "relboost/boosting.hpp"
#include "relboost/combine.hpp"
#include "relboost/error.hpp"
#include "relboost/eval.hpp"
#include "relboost/example.hpp"
#include "relboost/pipeline.hpp"
#include "relboost/text_format.hpp"

namespace fs = std::filesystem;
using namespace relboost;

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::Io, "cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCategory::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCategory::Io, "cannot write " + path.string());
}

struct Options {
  std::string out = ".";
  std::uint64_t seed = 0;

  std::string records;
  std::string schema;
  std::string facts;
  std::string examples;
  std::string modes;
  std::string advice;
  std::string model;
  std::string validation;
  std::string test;

  pipeline::SyntheticOptions synth;
  pipeline::PreprocessOptions prep;
  pipeline::ExperimentOptions experiment;
  std::string corruption = "none";

  boosting::TrainingConfig training;
  std::string advice_mode = "indicator";
  std::string grid = "0.25:0.75:0.05";

  std::size_t top = 3;
  double ratio = 1.0;
  double margin = 5.0;
};

logic::Schema load_schema(const Options& o) {
  return o.schema.empty() ? pipeline::default_schema() : logic::parse_schema(read_text(o.schema));
}

logic::PredicateSignature target_of(const logic::Schema& schema) {
  const auto* target = schema.find("pub", 2);
  if (target == nullptr) throw Error(ErrorCategory::Schema, "schema declares no pub/2 target");
  return *target;
}

std::vector<rrt::ModeDeclaration> load_modes(const Options& o, const logic::Schema& schema) {
  return rrt::parse_modes(o.modes.empty() ? pipeline::default_modes_text() : read_text(o.modes), schema);
}

/// Empty path: no advice. `default`: the built-in eight rules.
advice::AdviceSet load_advice(const Options& o, const logic::Schema& schema) {
  if (o.advice.empty()) return {};
  if (o.advice == "default") return advice::default_advice();
  std::vector<std::string> warnings;
  auto set = advice::parse_advice(read_text(o.advice), schema, &warnings);
  for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  return set;
}

std::vector<LabeledExample> load_examples(const std::string& path, const logic::Schema& schema) {
  return parse_examples(read_text(path), schema);
}

std::string manifest(const CLI::App& sub) {
  std::string body = sub.config_to_str(true, false);
  return "[" + sub.get_name() + "]\n" + body;
}

boosting::TrainingConfig training_config(const Options& o) {
  boosting::TrainingConfig c = o.training;
  c.seed = o.seed;
  c.advice_mode = boosting::parse_advice_mode(o.advice_mode);
  c.validate();
  return c;
}

void add_training_options(CLI::App& sub, Options& o) {
  sub.add_option("--schema", o.schema, "schema file (built-in schema when omitted)");
  sub.add_option("--facts", o.facts, "fact file")->required();
  sub.add_option("--modes", o.modes, "mode file (built-in modes when omitted)");
  sub.add_option("--advice", o.advice, "advice file, or 'default' for the built-in rules");
  sub.add_option("--alpha", o.training.alpha, "weight of the data gradient")->capture_default_str();
  sub.add_option("--trees", o.training.num_trees, "number of boosted trees")->capture_default_str();
  sub.add_option("--psi0", o.training.psi0, "initial regression value")->capture_default_str();
  sub.add_option("--depth", o.training.tree.max_depth, "maximum tree depth")->capture_default_str();
  sub.add_option("--literals", o.training.tree.max_literals_per_node, "maximum literals per node")
      ->capture_default_str();
  sub.add_option("--min-leaf", o.training.tree.min_examples_per_leaf, "minimum examples per leaf")
      ->capture_default_str();
  sub.add_option("--max-constants", o.training.tree.max_constants, "constants tried per # position")
      ->capture_default_str();
  sub.add_option("--max-candidates", o.training.tree.max_candidates, "candidate literals per node")
      ->capture_default_str();
  sub.add_option("--advice-mode", o.advice_mode, "indicator or signed-count")->capture_default_str();
  sub.add_option("--seed", o.seed, "random seed")->capture_default_str();
}

void cmd_synth(const Options& o) {
  auto opts = o.synth;
  opts.seed = o.seed;
  const auto records = pipeline::synthesize(opts);
  write_text(fs::path(o.out) / "records.jsonl", pipeline::render_records(records));
  std::printf("%zu records\n", records.size());
}

void cmd_ingest(const Options& o) {
  const auto records = pipeline::ingest(o.records);
  write_text(fs::path(o.out) / "records.jsonl", pipeline::render_records(records));
  std::size_t missing = 0;
  for (const auto& r : records) missing += r.author_id ? 0 : 1;
  std::printf("%zu records, %zu without author_id\n", records.size(), missing);
}

pipeline::Corruption parse_corruption(const std::string& text) {
  if (text == "none") return pipeline::Corruption::None;
  if (text == "flip") return pipeline::Corruption::Flip;
  if (text == "hide") return pipeline::Corruption::Hide;
  throw Error(ErrorCategory::Config, "corruption must be none, flip or hide");
}

void cmd_preprocess(const Options& o) {
  const auto raw = pipeline::ingest(o.records);
  auto prep = o.prep;
  prep.seed = o.seed;
  if (prep.min_pubs < 1) throw Error(ErrorCategory::Config, "min-pubs must be at least 1");
  const auto records = pipeline::preprocess(raw, prep);
  const auto graph = pipeline::to_facts(records);
  auto eo = o.experiment;
  eo.seed = o.seed;
  eo.corruption = parse_corruption(o.corruption);
  const auto experiment = pipeline::prepare_experiment(graph, eo);

  const fs::path dir(o.out);
  write_text(dir / "records.jsonl", pipeline::render_records(records));
  write_text(dir / "schema.txt", logic::render_schema(pipeline::default_schema()));
  write_text(dir / "modes.txt", pipeline::default_modes_text());
  write_text(dir / "facts.txt", logic::render_facts(experiment.facts));
  write_text(dir / "train.txt", render_examples(experiment.train));
  write_text(dir / "test.txt", render_examples(experiment.test));
  std::printf("%zu of %zu records kept; %zu train, %zu test examples; %zu facts\n", records.size(), raw.size(),
              experiment.train.size(), experiment.test.size(), experiment.facts.size());
}

void cmd_train(const Options& o) {
  const auto schema = load_schema(o);
  const auto facts = logic::parse_facts(read_text(o.facts), schema);
  const auto examples = load_examples(o.examples, schema);
  const auto modes = load_modes(o, schema);
  const auto advice = load_advice(o, schema);
  const auto config = training_config(o);
  const auto model = boosting::train(examples, facts, modes, advice, config, target_of(schema),
                                     [](const boosting::IterationReport& r) {
                                       std::fprintf(stderr, "tree %d: mean |gradient| %.6f over %zu examples\n",
                                                    r.iteration, r.mean_abs_gradient, r.examples);
                                     });
  write_text(fs::path(o.out) / "model.txt", boosting::serialize(model));
  std::printf("%zu trees written\n", model.trees().size());
}

void cmd_predict(const Options& o) {
  const auto schema = load_schema(o);
  const auto facts = logic::parse_facts(read_text(o.facts), schema);
  const auto examples = load_examples(o.examples, schema);
  const auto model = boosting::parse_model(read_text(o.model));
  std::string out = "example\tlabel\tprobability\n";
  const auto scored = eval::score(model, examples, facts);
  for (const auto& s : scored) {
    out += logic::render(s.atom) + "\t" + std::string(to_string(s.label)) + "\t" + logic::format_double(s.score) + "\n";
  }
  write_text(fs::path(o.out) / "predictions.tsv", out);
  std::printf("%zu predictions\n", scored.size());
}

void cmd_eval(const Options& o) {
  const auto schema = load_schema(o);
  const auto facts = logic::parse_facts(read_text(o.facts), schema);
  const auto examples = load_examples(o.examples, schema);
  const auto model = boosting::parse_model(read_text(o.model));
  const auto m = eval::evaluate(model, examples, facts);
  char buffer[128];
  std::snprintf(buffer, sizeof(buffer), "{\n  \"auc_roc\": %s,\n  \"auc_pr\": %s\n}\n",
                logic::format_double(m.auc_roc).c_str(), logic::format_double(m.auc_pr).c_str());
  write_text(fs::path(o.out) / "metrics.json", buffer);
  std::printf("auc_roc %.4f\nauc_pr %.4f\n", m.auc_roc, m.auc_pr);
}

void cmd_sweep(const Options& o) {
  const auto schema = load_schema(o);
  const auto facts = logic::parse_facts(read_text(o.facts), schema);
  auto train = load_examples(o.examples, schema);
  std::vector<LabeledExample> validation;
  if (o.validation.empty()) {
    auto parts = pipeline::split(train, 0.8, o.seed + 3);
    train = std::move(parts.train);
    validation = std::move(parts.test);
  } else {
    validation = load_examples(o.validation, schema);
  }
  const auto test = load_examples(o.test, schema);
  const auto modes = load_modes(o, schema);
  const auto advice = load_advice(o, schema);
  if (advice.empty()) throw Error(ErrorCategory::Config, "sweep needs --advice");
  const auto grid = eval::parse_grid(o.grid);
  eval::SweepInputs inputs{train, validation, test, &facts, modes, &advice, target_of(schema)};
  const auto result = eval::sweep_alpha(training_config(o), grid, inputs, [](const eval::SweepPoint& p) {
    std::fprintf(stderr, "alpha %.2f: validation roc %.4f, test roc %.4f\n", p.alpha, p.validation.auc_roc,
                 p.test.auc_roc);
  });
  const fs::path dir(o.out);
  const std::string table = eval::render_sweep(result);
  write_text(dir / "sweep.tsv", table);
  write_text(dir / "sweep.json", eval::sweep_json(result));
  std::fputs(table.c_str(), stdout);
}

void cmd_combine(const Options& o) {
  const auto schema = load_schema(o);
  const auto facts = logic::parse_facts(read_text(o.facts), schema);
  const auto examples = load_examples(o.examples, schema);
  const auto model = boosting::parse_model(read_text(o.model));
  auto combined = combine::combine(model, facts, examples);
  combine::measure_coverage(combined, facts, examples);
  const auto top = combine::top_clauses(combined, o.top, o.ratio);
  const fs::path dir(o.out);
  write_text(dir / "combined.txt", combine::render(combined));
  std::string top_text;
  for (const auto& c : top) {
    top_text += logic::render_clause(c.clause) + "  % pos " + std::to_string(c.positives) + ", neg " +
                std::to_string(c.negatives) + "\n";
  }
  write_text(dir / "top_clauses.txt", top_text);
  const auto stats = combine::clause_stats(combined);
  std::printf("clauses %zu\navg_length %.2f\nmax_length %zu\n", stats.count, stats.avg_length, stats.max_length);
  std::fputs(top_text.c_str(), stdout);
}

void cmd_stats(const Options& o) {
  const auto records = pipeline::ingest(o.records);
  const std::string table = pipeline::render_distribution(pipeline::author_distribution(records));
  write_text(fs::path(o.out) / "distribution.tsv", table);
  std::fputs(table.c_str(), stdout);
}

void cmd_coverage(const Options& o) {
  const auto schema = load_schema(o);
  const auto facts = logic::parse_facts(read_text(o.facts), schema);
  const auto examples = load_examples(o.examples, schema);
  auto set = load_advice(o, schema);
  if (set.empty()) set = advice::default_advice();
  const auto report = advice::coverage_report(set, examples, facts, o.margin);
  const std::string table = advice::render_coverage(set, report);
  write_text(fs::path(o.out) / "coverage.txt", table);
  std::fputs(table.c_str(), stdout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relational gradient boosting with advice for authorship prediction"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML file with option values; command-line flags override it");

  Options o;
  struct Command {
    CLI::App* app;
    void (*run)(const Options&);
  };
  std::vector<Command> commands;
  auto command = [&](const char* name, const char* help, void (*run)(const Options&)) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->configurable();
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
    commands.push_back({sub, run});
    return sub;
  };

  auto* synth = command("synth", "generate synthetic publication records", cmd_synth);
  synth->add_option("--seed", o.seed, "random seed")->required();
  synth->add_option("--authors", o.synth.authors)->capture_default_str();
  synth->add_option("--pubs-per-author", o.synth.pubs_per_author)->capture_default_str();
  synth->add_flag("--power-law", o.synth.power_law, "power-law publication counts");
  synth->add_option("--exponent", o.synth.exponent)->capture_default_str();
  synth->add_option("--max-pubs", o.synth.max_pubs)->capture_default_str();
  synth->add_option("--dirty", o.synth.dirty_fraction, "share of extra records to be filtered")
      ->capture_default_str();

  auto* ingest = command("ingest", "parse and normalize publication records", cmd_ingest);
  ingest->add_option("--records", o.records, "records file (JSON lines)")->required();

  auto* preprocess = command("preprocess", "filter records and build facts and examples", cmd_preprocess);
  preprocess->add_option("--records", o.records, "records file (JSON lines)")->required();
  preprocess->add_option("--seed", o.seed, "random seed")->required();
  preprocess->add_option("--sample-fraction", o.prep.sample_fraction)->capture_default_str();
  preprocess->add_option("--min-pubs", o.prep.min_pubs)->capture_default_str();
  preprocess->add_option("--negative-ratio", o.experiment.negative_ratio)->capture_default_str();
  preprocess->add_option("--train-ratio", o.experiment.train_ratio)->capture_default_str();
  preprocess->add_option("--corruption", o.corruption, "none, flip or hide")->capture_default_str();
  preprocess->add_option("--pos-rate", o.experiment.pos_rate)->capture_default_str();
  preprocess->add_option("--neg-rate", o.experiment.neg_rate)->capture_default_str();

  auto* train = command("train", "fit a boosted model", cmd_train);
  add_training_options(*train, o);
  train->add_option("--examples", o.examples, "training examples")->required();

  for (auto [name, help, run] : {std::tuple{"predict", "write probabilities", cmd_predict},
                                 std::tuple{"eval", "AUC-ROC and AUC-PR of a model", cmd_eval}}) {
    auto* sub = command(name, help, run);
    sub->add_option("--model", o.model, "model file")->required();
    sub->add_option("--schema", o.schema, "schema file (built-in schema when omitted)");
    sub->add_option("--facts", o.facts, "fact file")->required();
    sub->add_option("--examples", o.examples, "examples")->required();
  }

  auto* sweep = command("sweep", "train over a grid of advice weights", cmd_sweep);
  add_training_options(*sweep, o);
  sweep->add_option("--examples", o.examples, "training examples")->required();
  sweep->add_option("--validation", o.validation, "validation examples (20% of training when omitted)");
  sweep->add_option("--test", o.test, "test examples")->required();
  sweep->add_option("--grid", o.grid, "lo:hi:step or a comma list")->capture_default_str();

  auto* comb = command("combine", "collapse a model into one decision list", cmd_combine);
  comb->add_option("--model", o.model, "model file")->required();
  comb->add_option("--schema", o.schema, "schema file (built-in schema when omitted)");
  comb->add_option("--facts", o.facts, "fact file")->required();
  comb->add_option("--examples", o.examples, "examples that define the clauses and coverage")->required();
  comb->add_option("--top", o.top, "clauses to report")->capture_default_str();
  comb->add_option("--ratio", o.ratio, "negative to positive coverage share allowed")->capture_default_str();

  auto* stats = command("stats", "publications per author", cmd_stats);
  stats->add_option("--records", o.records, "records file (JSON lines)")->required();

  auto* coverage = command("coverage", "per-rule advice coverage", cmd_coverage);
  coverage->add_option("--schema", o.schema, "schema file (built-in schema when omitted)");
  coverage->add_option("--facts", o.facts, "fact file")->required();
  coverage->add_option("--examples", o.examples, "examples")->required();
  coverage->add_option("--advice", o.advice, "advice file (built-in rules when omitted)");
  coverage->add_option("--margin", o.margin, "percentage points below which a rule is flagged")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error[usage]: %s\n", e.what());
    return 2;
  }

  for (const auto& c : commands) {
    if (!c.app->parsed()) continue;
    try {
      c.run(o);
      write_text(fs::path(o.out) / (c.app->get_name() + ".manifest.toml"), manifest(*c.app));
    } catch (const Error& e) {
      std::string message = e.what();
      for (char& ch : message) {
        if (ch == '\n') ch = ' ';
      }
      std::fprintf(stderr, "error[%s]: %s\n", std::string(to_string(e.category())).c_str(), message.c_str());
      return 1;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error[internal]: %s\n", e.what());
      return 1;
    }
    return 0;
  }
  return 0;
}
