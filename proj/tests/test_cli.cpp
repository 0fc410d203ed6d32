#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "noveldetect/cli.hpp"
#include "noveldetect/corpus.hpp"
#include "noveldetect/eval.hpp"
#include "noveldetect/manifest.hpp"

using namespace noveldetect;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("noveldetect_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string synth(const std::string& name, std::vector<std::string> extra = {}) {
    std::vector<std::string> args = {"synth", "--topics", "4", "--sentences", "25", "--seed", "7", "--quiet",
                                     "--out", path(name)};
    args.insert(args.end(), extra.begin(), extra.end());
    auto r = cli(args);
    EXPECT_EQ(r.code, 0) << r.err;
    return path(name);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, SynthDeterministicAndParsesStrict) {
  auto a = synth("a.tsv");
  auto b = synth("b.tsv");
  EXPECT_EQ(sha256_file(a), sha256_file(b));
  EXPECT_EQ(sha256_file(a + ".facts.tsv"), sha256_file(b + ".facts.tsv"));
  auto topics = parse_corpus(a);
  EXPECT_EQ(topics.size(), 4u);
  EXPECT_EQ(topics[0].sentences.size(), 25u);

  auto manifest = nlohmann::json::parse(read_file(a + ".manifest.json"));
  EXPECT_EQ(manifest["command"], "synth");
  EXPECT_EQ(manifest["seed"], 7);
  EXPECT_EQ(manifest["outputs"][0]["sha256"], sha256_file(a + ".facts.tsv"));
  EXPECT_EQ(manifest["outputs"][1]["sha256"], sha256_file(a));
  EXPECT_FALSE(fs::exists(a + ".tmp"));
}

TEST_F(Cli, SynthInfeasible) {
  auto r = cli({"synth", "--facts-per-sentence", "3:9", "--fact-vocab", "5", "--out", path("x.tsv")});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("fact_vocab"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(path("x.tsv")));
}

TEST_F(Cli, RunLabelsAndDeterminism) {
  auto corpus = synth("c.tsv");
  auto r = cli({"run", "--corpus", corpus, "--method", "overlap", "--alpha", "0.7", "--out", path("o.run")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(read_file(path("o.run")).find("# label: o0.7\n"), std::string::npos);

  r = cli({"run", "--corpus", corpus, "--method", "selected_pool", "--alpha", "0.7", "--beta", "0.25", "--out",
           path("sp.run")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(read_file(path("sp.run")).find("# label: sp0.7s2.0\n"), std::string::npos);
  auto manifest = nlohmann::json::parse(read_file(path("sp.run.manifest.json")));
  EXPECT_EQ(manifest["params"]["beta"], 0.25);
  EXPECT_EQ(manifest["params"]["beta_x8"], 2.0);
  EXPECT_EQ(manifest["inputs"][0]["sha256"], sha256_file(corpus));

  r = cli({"run", "--corpus", corpus, "--method", "selected_pool", "--alpha", "0.7", "--beta", "0.25", "--out",
           path("sp2.run")});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(read_file(path("sp.run")), read_file(path("sp2.run")));
}

TEST_F(Cli, RunToStdout) {
  auto corpus = synth("c.tsv");
  auto r = cli({"run", "--corpus", corpus, "--method", "pool", "--alpha", "0.8"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("# noveldetect run\n# label: p0.8\n", 0), 0u);
}

TEST_F(Cli, RunUsageErrors) {
  auto corpus = synth("c.tsv");
  auto r = cli({"run", "--corpus", corpus, "--method", "overlap", "--alpha", "0.7", "--beta", "0.3"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--beta"), std::string::npos);
  EXPECT_TRUE(r.out.empty());
  r = cli({"run", "--corpus", corpus, "--method", "cosine", "--alpha", "0.7"});
  EXPECT_NE(r.code, 0);
  r = cli({"run", "--corpus", corpus, "--method", "selected_pool", "--alpha", "0.7"});
  EXPECT_NE(r.code, 0);
  r = cli({"run", "--corpus", path("missing.tsv"), "--alpha", "0.7"});
  EXPECT_EQ(r.code, 1);
  r = cli({"frobnicate"});
  EXPECT_NE(r.code, 0);
}

TEST_F(Cli, GlobalFlagsAfterSubcommand) {
  auto corpus = synth("c.tsv");
  auto r = cli({"run", "--corpus", corpus, "--alpha", "0.7", "--out", path("r.run"), "--quiet"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.err.empty());
  EXPECT_TRUE(fs::exists(path("r.run")));
}

TEST_F(Cli, EvalPerfectRun) {
  auto corpus = synth("c.tsv");
  ASSERT_EQ(cli({"run", "--corpus", corpus, "--method", "pool", "--alpha", "1.0", "--out", path("p.run")}).code, 0);
  auto r = cli({"eval", "--run", path("p.run"), "--corpus", corpus, "--metrics", "snm,mistake,spsm,psm"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("topic\t#ret\tAv.P\tAv.R\tAv.F\t#novel\tMistake%\tSPSM\tPSM\n"), std::string::npos) << r.out;
  auto all = r.out.substr(r.out.find("\nALL\t") + 1);
  std::istringstream row(all);
  std::string name, ret, p, rc, f, novel, mistake;
  row >> name >> ret >> p >> rc >> f >> novel >> mistake;
  EXPECT_EQ(f, "1.0000");
  EXPECT_EQ(mistake, "0.0000");
  EXPECT_EQ(ret, novel);
}

TEST_F(Cli, EvalColumnsFollowTableSchema) {
  auto corpus = synth("c.tsv");
  ASSERT_EQ(cli({"run", "--corpus", corpus, "--alpha", "0.6", "--out", path("o.run")}).code, 0);
  auto r = cli({"eval", "--run", path("o.run"), "--corpus", corpus, "--metrics", "snm"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\ntopic\t#ret\tAv.P\tAv.R\tAv.F\t#novel\n"), std::string::npos) << r.out;
}

TEST_F(Cli, EvalPsmWithoutPoFails) {
  std::ofstream(path("nv.tsv")) << "t\ta\t0\t1\t-\tone two\nt\tb\t1\t0\t-\tone two\n";
  ASSERT_EQ(cli({"run", "--corpus", path("nv.tsv"), "--alpha", "0.7", "--out", path("nv.run")}).code, 0);
  auto r = cli({"eval", "--run", path("nv.run"), "--corpus", path("nv.tsv"), "--metrics", "psm"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("PSM"), std::string::npos) << r.err;
  r = cli({"eval", "--run", path("nv.run"), "--corpus", path("nv.tsv"), "--metrics", "snm,spsm"});
  EXPECT_EQ(r.code, 0) << r.err;
  r = cli({"eval", "--run", path("nv.run"), "--corpus", path("nv.tsv"), "--metrics", "bleu"});
  EXPECT_EQ(r.code, 2);
}

TEST_F(Cli, EvalLenientSkipsUnlabelledTopics) {
  std::ofstream(path("mix.tsv")) << "t\ta\t0\t1\t-\tone\nt\tb\t1\t0\t-\tone\nu\tx\t0\t-\t-\ttwo\n";
  ASSERT_EQ(cli({"run", "--corpus", path("mix.tsv"), "--alpha", "0.7", "--out", path("mix.run")}).code, 0);
  auto r = cli({"eval", "--run", path("mix.run"), "--corpus", path("mix.tsv")});
  EXPECT_EQ(r.code, 1);
  r = cli({"eval", "--run", path("mix.run"), "--corpus", path("mix.tsv"), "--lenient"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.find("\nu\t"), std::string::npos);
  EXPECT_NE(r.err.find("skipping"), std::string::npos);
}

TEST_F(Cli, CompareIdenticalRuns) {
  auto corpus = synth("c.tsv");
  ASSERT_EQ(cli({"run", "--corpus", corpus, "--alpha", "0.7", "--out", path("a.run")}).code, 0);
  auto r = cli({"compare", "--corpus", corpus, "--metric", "f", path("a.run"), path("a.run")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find(" p=1 "), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("t=0.000000"), std::string::npos) << r.out;
}

TEST_F(Cli, TuneLooHasOneRowPerTopic) {
  auto corpus = synth("c.tsv", {"--noise-terms", "2"});
  auto r = cli({"tune", "--corpus", corpus, "--method", "overlap", "--loo", "--alphas", "0.3,0.5,0.7,0.9"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) rows += line.rfind("syn", 0) == 0;
  EXPECT_EQ(rows, 4u);
  EXPECT_NE(r.out.find("\nALL\t"), std::string::npos);
}

TEST_F(Cli, TuneMatchesLibrary) {
  auto corpus = synth("c.tsv", {"--noise-terms", "3"});
  auto r = cli({"tune", "--corpus", corpus, "--method", "selected_pool", "--alphas", "0.5,0.6,0.7,0.8", "--betas",
                "0.1,0.3,0.5", "--out", path("tune.txt")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto prepared = prepare_topics(parse_corpus(corpus), {});
  DetectorParams base;
  base.method = Method::selected_pool;
  auto lib = grid_search(prepared, base, Grid{{0.5, 0.6, 0.7, 0.8}, {0.1, 0.3, 0.5}}, Objective::mean_f);
  auto text = read_file(path("tune.txt"));
  EXPECT_NE(text.find("# best: " + run_label(lib.best) + " "), std::string::npos) << text;
  auto manifest = nlohmann::json::parse(read_file(path("tune.txt.manifest.json")));
  EXPECT_EQ(manifest["params"]["best"]["label"], run_label(lib.best));
}

TEST_F(Cli, TuneUsageErrors) {
  auto corpus = synth("c.tsv");
  EXPECT_EQ(cli({"tune", "--corpus", corpus, "--method", "overlap", "--betas", "0.1"}).code, 2);
  EXPECT_EQ(cli({"tune", "--corpus", corpus, "--alpha", "0.5"}).code, 2);
  EXPECT_EQ(cli({"tune", "--corpus", corpus, "--alphas", "0.5,x"}).code, 2);
  EXPECT_NE(cli({"tune", "--corpus", corpus, "--alphas", "0.5,0.4"}).code, 0);
}

TEST_F(Cli, ConfigFileAndEnvironment) {
  std::ofstream(path("stop.txt")) << "f0t0\n";
  std::ofstream(path("tok.conf")) << "stopwords_file=stop.txt\n";
  auto corpus = synth("c.tsv");
  ASSERT_EQ(cli({"run", "--corpus", corpus, "--alpha", "0.7", "--config", path("tok.conf"), "--out", path("a.run")}).code, 0);
  auto manifest = nlohmann::json::parse(read_file(path("a.run.manifest.json")));
  EXPECT_EQ(manifest["config"]["config_file"], path("tok.conf"));
  EXPECT_EQ(manifest["config"]["stopwords"]["count"], 1);

  ::setenv("NOVELDETECT_CONFIG", path("tok.conf").c_str(), 1);
  ASSERT_EQ(cli({"run", "--corpus", corpus, "--alpha", "0.7", "--out", path("b.run")}).code, 0);
  ::unsetenv("NOVELDETECT_CONFIG");
  manifest = nlohmann::json::parse(read_file(path("b.run.manifest.json")));
  EXPECT_EQ(manifest["config"]["config_file"], path("tok.conf"));

  std::ofstream(path("bad.conf")) << "nonsense=1\n";
  EXPECT_EQ(cli({"run", "--corpus", corpus, "--alpha", "0.7", "--config", path("bad.conf")}).code, 1);
}
