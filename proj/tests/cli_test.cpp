// Copyright 2026 The hsisg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// End-to-end tests of the hsisg executable.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>

#include "hsisg/hsisg.hpp"
#include "synthetic_corpus.hpp"

namespace hsisg {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("hsisg_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()) + "_" +
            std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path path(const std::string& name) const { return dir_ / name; }

  Outcome run(const std::string& args) const {
    const auto out = path("stdout.txt"), err = path("stderr.txt");
    const std::string cmd = std::string("'") + HSISG_CLI_PATH + "' " + args + " >'" + out.string() + "' 2>'" +
                            err.string() + "'";
    const int status = std::system(cmd.c_str());
    Outcome r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    fs::remove(out);
    fs::remove(err);
    return r;
  }

  // A small trained model at `model.bin`.
  fs::path train_small(const std::string& name = "model.bin", const std::string& extra = "") {
    if (!fs::exists(path("corpus.txt"))) spit(path("corpus.txt"), synthetic::template_corpus(300, 5));
    const auto r = run("train -input '" + path("corpus.txt").string() + "' -output '" + path(name).string() +
                       "' -dim 8 -epoch 2 -bucket 2000 -min-count 1 -t 1e-2 -threads 1 -seed 42 " + extra);
    EXPECT_EQ(r.code, 0) << r.err;
    return path(name);
  }

  fs::path dir_;
};

TEST_F(Cli, UsageErrorsExitOneWithoutTouchingOutputs) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
  spit(path("corpus.txt"), "가 나\n");
  spit(path("existing.bin"), "keep me");
  const std::string io = "-input '" + path("corpus.txt").string() + "' -output '" + path("existing.bin").string() + "'";
  EXPECT_EQ(run("train " + io + " -no-such-flag 3").code, 1);
  EXPECT_EQ(run("train " + io + " -dim 0").code, 1);
  EXPECT_EQ(run("train " + io + " -granularities cjx").code, 1);
  EXPECT_EQ(run("train " + io + " -minn 4 -maxn 2").code, 1);
  EXPECT_EQ(run("train -input '" + path("corpus.txt").string() + "'").code, 1);
  EXPECT_EQ(run("analogy -model x").code, 1);
  EXPECT_EQ(run("nn -model x -query y -k 0").code, 1);
  EXPECT_EQ(slurp(path("existing.bin")), "keep me");
  EXPECT_FALSE(fs::exists(path("existing.bin.manifest")));
  EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, RuntimeErrorsExitTwo) {
  const auto missing = path("no_corpus.txt").string();
  auto r = run("train -input '" + missing + "' -output '" + path("m.bin").string() + "'");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(missing), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(path("m.bin")));

  const auto model = train_small();
  const auto ds = path("missing_dataset.txt").string();
  r = run("analogy -model '" + model.string() + "' -dataset '" + ds + "'");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(ds), std::string::npos) << r.err;

  spit(path("junk.bin"), "not a model at all");
  r = run("inspect -model '" + path("junk.bin").string() + "'");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("BadMagic"), std::string::npos) << r.err;
}

TEST_F(Cli, TrainWritesModelAndManifest) {
  const auto model = train_small("m.bin", "-granularities cjh -hanja-maxn 4");
  const auto loaded = load_model(model);
  EXPECT_EQ(loaded.dim(), 8u);
  EXPECT_EQ(loaded.config.ngram.hanja_max, 4u);

  std::ifstream in(model.string() + ".manifest");
  const auto kv = read_key_values(in);
  const auto config = parse_train_config(kv);
  EXPECT_EQ(config.dim, 8u);
  EXPECT_EQ(config.epochs, 2u);
  EXPECT_EQ(config.subsample_t, 1e-2);
  EXPECT_EQ(config.ngram.bucket_size, 2000u);
  EXPECT_EQ(config.ngram.hanja_max, 4u);
  EXPECT_EQ(config.ngram.granularities.to_string(), "cjh");
  EXPECT_EQ(config.ngram.char_max, 6u);  // untouched default
  for (const auto& entry : fs::directory_iterator(dir_)) {
    EXPECT_NE(entry.path().extension(), ".tmp") << entry.path();
  }
}

TEST_F(Cli, NoneGranularityTrainsPlainSkipGram) {
  const auto model = load_model(train_small("sg.bin", "-granularities none"));
  EXPECT_EQ(model.input.rows(), model.vocab.size());
}

TEST_F(Cli, AnalogyAndSimilarityMatchLibrary) {
  const auto model_path = train_small();
  const auto model = load_model(model_path);
  const auto words = ModelVectors<float>(model).words();
  ASSERT_GE(words.size(), 8u);
  std::string analogy = ": sem-city\n" + words[0] + ' ' + words[1] + ' ' + words[2] + ' ' + words[3] + '\n' +
                        ": syn-tense\n" + words[4] + ' ' + words[5] + ' ' + words[6] + ' ' + words[7] + '\n';
  spit(path("analogy.txt"), analogy);
  std::string sim;
  for (int i = 0; i < 5; ++i) sim += words[i] + '\t' + words[i + 2] + '\t' + std::to_string(i * 1.5) + '\n';
  spit(path("sim.txt"), sim);

  auto r = run("analogy -model '" + model_path.string() + "' -dataset '" + path("analogy.txt").string() +
               "' -out '" + path("a.tsv").string() + "'");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_FALSE(r.out.empty());
  std::istringstream a(slurp(path("a.tsv")));
  std::map<std::string, std::string> report;
  for (const auto& [k, v] : read_key_values(a)) report[k] = v;

  std::istringstream items_text(analogy);
  const auto expected = run_analogy(ModelVectors<float>(model), parse_analogy_dataset(items_text));
  EXPECT_EQ(std::stod(report["analogy.overall_mean"]), expected.overall_mean);
  EXPECT_EQ(std::stod(report["analogy.semantic_mean"]), expected.semantic_mean);
  EXPECT_EQ(report["analogy.scored"], "2");

  r = run("similarity -model '" + model_path.string() + "' -dataset '" + path("sim.txt").string() + "' -out '" +
          path("s.tsv").string() + "'");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream s(slurp(path("s.tsv")));
  report.clear();
  for (const auto& [k, v] : read_key_values(s)) report[k] = v;
  std::istringstream sim_text(sim);
  const auto sim_expected = run_similarity(ModelVectors<float>(model), parse_similarity_dataset(sim_text));
  EXPECT_EQ(std::stod(report["similarity.spearman"]), sim_expected.spearman);
  EXPECT_EQ(report["similarity.pairs"], "5");
  EXPECT_FALSE(fs::exists(path("s.tsv.tmp")));
}

TEST_F(Cli, NearestNeighborsPrintsKLines) {
  const auto model = train_small();
  const auto first = ModelVectors<float>(load_model(model)).words().front();
  const auto r = run("nn -model '" + model.string() + "' -query '" + first + "' -k 5");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    const auto tab = line.find('\t');
    ASSERT_NE(tab, std::string::npos) << line;
    const double c = std::stod(line.substr(tab + 1));
    EXPECT_GE(c, -1.0);
    EXPECT_LE(c, 1.0);
  }
  EXPECT_EQ(lines, 5);
}

TEST_F(Cli, ExportedVecEvaluatesLikeBinary) {
  const auto model = train_small();
  ASSERT_EQ(run("export-vec -model '" + model.string() + "' -output '" + path("m.vec").string() + "'").code, 0);
  const auto words = ModelVectors<float>(load_model(model)).words();
  std::string analogy = ": city\n";
  for (std::size_t i = 0; i + 3 < 20 && i + 3 < words.size(); ++i) {
    analogy += words[i] + ' ' + words[i + 1] + ' ' + words[i + 2] + ' ' + words[i + 3] + '\n';
  }
  spit(path("a.txt"), analogy);
  const auto base = "analogy -model '" + model.string() + "' -dataset '" + path("a.txt").string() + "' -out '";
  ASSERT_EQ(run(base + path("bin.tsv").string() + "'").code, 0);
  const auto r = run("analogy -model '" + path("m.vec").string() + "' -model-format vec -dataset '" +
                     path("a.txt").string() + "' -out '" + path("vec.tsv").string() + "'");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream b(slurp(path("bin.tsv"))), v(slurp(path("vec.tsv")));
  const auto kb = read_key_values(b), kv = read_key_values(v);
  ASSERT_EQ(kb.size(), kv.size());
  for (std::size_t i = 0; i < kb.size(); ++i) {
    EXPECT_EQ(kb[i].first, kv[i].first);
    const double x = std::stod(kb[i].second), y = std::stod(kv[i].second);
    if (std::isnan(x)) {
      EXPECT_TRUE(std::isnan(y)) << kb[i].first;  // no syntactic categories here
    } else {
      EXPECT_NEAR(x, y, 1e-5) << kb[i].first;
    }
  }
}

TEST_F(Cli, InspectPrintsHeader) {
  const auto model = train_small();
  const auto r = run("inspect -model '" + model.string() + "'");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("dim\t8\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("bucket\t2000\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("size_check\tok\n"), std::string::npos) << r.out;
}

TEST_F(Cli, RepeatedRunsAreByteIdentical) {
  const auto a = train_small("a.bin");
  const auto b = train_small("b.bin");
  EXPECT_EQ(slurp(a), slurp(b));
  auto manifest_a = slurp(a.string() + ".manifest");
  EXPECT_EQ(manifest_a, slurp(b.string() + ".manifest"));
}

}  // namespace
}  // namespace hsisg
