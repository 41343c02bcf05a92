#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

class Cli : public ::testing::Test {
 protected:
  fs::path dir;

  void SetUp() override {
    dir = fs::temp_directory_path() / ("relboost_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  /// Runs the binary with `args` from `dir`; returns the exit status and
  /// leaves stderr in dir/stderr.txt.
  int run(const std::string& args) const {
    const std::string cmd = "cd '" + dir.string() + "' && '" RELBOOST_CLI "' " + args + " >stdout.txt 2>stderr.txt";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string read(const std::string& name) const { return slurp(dir / name); }

  void prepare(const std::string& sub = ".") const {
    ASSERT_EQ(run("synth --seed 3 --authors 30 --out " + sub), 0) << read("stderr.txt");
    ASSERT_EQ(run("preprocess --seed 3 --records " + sub + "/records.jsonl --out " + sub), 0) << read("stderr.txt");
  }
};

}  // namespace

TEST_F(Cli, PipelineProducesEveryArtifact) {
  prepare();
  for (const char* f : {"records.jsonl", "schema.txt", "modes.txt", "facts.txt", "train.txt", "test.txt"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  ASSERT_EQ(run("train --facts facts.txt --examples train.txt --trees 2 --alpha 1"), 0) << read("stderr.txt");
  EXPECT_TRUE(read("model.txt").size() > 0);
  EXPECT_TRUE(fs::exists(dir / "train.manifest.toml"));
  ASSERT_EQ(run("predict --model model.txt --facts facts.txt --examples test.txt"), 0) << read("stderr.txt");
  EXPECT_EQ(lines(read("predictions.tsv")), lines(read("test.txt")) + 1);
  ASSERT_EQ(run("eval --model model.txt --facts facts.txt --examples test.txt"), 0) << read("stderr.txt");
  EXPECT_NE(read("metrics.json").find("auc_roc"), std::string::npos);
  ASSERT_EQ(run("combine --model model.txt --facts facts.txt --examples train.txt"), 0) << read("stderr.txt");
  EXPECT_TRUE(fs::exists(dir / "combined.txt"));
  EXPECT_TRUE(fs::exists(dir / "top_clauses.txt"));
  ASSERT_EQ(run("coverage --facts facts.txt --examples train.txt"), 0) << read("stderr.txt");
  EXPECT_EQ(lines(read("coverage.txt")), 10u);
  ASSERT_EQ(run("stats --records records.jsonl"), 0) << read("stderr.txt");
  EXPECT_GE(lines(read("distribution.tsv")), 1u);
}

TEST_F(Cli, SweepWritesOneRowPerAlpha) {
  prepare();
  ASSERT_EQ(run("sweep --facts facts.txt --examples train.txt --test test.txt --advice default --trees 1"), 0)
      << read("stderr.txt");
  const std::string table = read("sweep.tsv");
  // header, eleven grid rows, baseline, best-alpha note
  EXPECT_EQ(lines(table), 14u) << table;
  EXPECT_NE(table.find("baseline"), std::string::npos);
  EXPECT_NE(read("sweep.json").find("best_alpha"), std::string::npos);
}

TEST_F(Cli, RerunsAreByteIdentical) {
  fs::create_directories(dir / "one");
  fs::create_directories(dir / "two");
  for (const char* sub : {"one", "two"}) {
    prepare(sub);
    const std::string s = sub;
    ASSERT_EQ(run("train --facts " + s + "/facts.txt --examples " + s + "/train.txt --trees 2 --advice default --out " + s),
              0)
        << read("stderr.txt");
  }
  for (const char* f : {"records.jsonl", "facts.txt", "train.txt", "test.txt", "model.txt"}) {
    EXPECT_EQ(read(std::string("one/") + f), read(std::string("two/") + f)) << f;
  }
}

TEST_F(Cli, ManifestReplaysTheRun) {
  prepare();
  ASSERT_EQ(run("train --facts facts.txt --examples train.txt --trees 1 --alpha 1"), 0) << read("stderr.txt");
  const std::string first = read("model.txt");
  fs::remove(dir / "model.txt");
  ASSERT_EQ(run("train --config train.manifest.toml"), 0) << read("stderr.txt");
  EXPECT_EQ(read("model.txt"), first);
}

TEST_F(Cli, ErrorsAreOneCategorisedLine) {
  EXPECT_EQ(run("train --facts missing.txt --examples missing.txt"), 1);
  const std::string err = read("stderr.txt");
  EXPECT_EQ(err.rfind("error[io]: ", 0), 0u) << err;
  EXPECT_EQ(lines(err), 1u);

  std::ofstream(dir / "bad.txt") << "pub(p1, a1)\n";
  EXPECT_EQ(run("train --facts bad.txt --examples bad.txt"), 1);
  EXPECT_EQ(read("stderr.txt").rfind("error[parse]: ", 0), 0u) << read("stderr.txt");

  EXPECT_EQ(run("train --examples x.txt"), 2);
  EXPECT_EQ(read("stderr.txt").rfind("error[usage]: ", 0), 0u) << read("stderr.txt");
  EXPECT_EQ(run("synth"), 2);
}
