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

// hsisg: train, transfer-initialise, evaluate, export and inspect models.
//
// Flags use a single dash (`-dim 300`), as in word2vec/fastText. Exit codes:
// 0 success, 1 usage error, 2 runtime error.

#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "hsisg/hsisg.hpp"

namespace {

constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop.store(true); }

struct TrainFlags {
  std::string input, output;
  std::uint32_t dim = 300, epoch = 5, neg = 5, ws = 5;
  double lr = 0.05, t = 1e-4;
  std::uint64_t min_count = 5, bucket = 20'000'000, seed = 42;
  std::uint32_t minn = 1, maxn = 6, jamo_minn = 3, jamo_maxn = 5, hanja_minn = 1, hanja_maxn = 3;
  std::string granularities = "cjh";
  std::uint32_t threads = 1;
  std::string pretrained_hanja, hanja_map;
};

struct EvalFlags {
  std::string model, dataset, model_format = "bin", out;
};

struct NnFlags {
  std::string model, query, model_format = "bin";
  std::size_t k = 10;
};

struct ExportFlags {
  std::string model, output;
  int composed = 1;
};

struct InspectFlags {
  std::string model;
};

/// `-name` -> `--name` for multi-letter flags so CLI11 sees long options.
std::vector<std::string> normalize_args(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a.size() > 2 && a[0] == '-' && a[1] != '-' && std::isalpha(static_cast<unsigned char>(a[1]))) a = "-" + a;
    args.push_back(std::move(a));
  }
  return args;
}

hsisg::TrainConfig to_config(const TrainFlags& f) {
  hsisg::TrainConfig c;
  c.dim = f.dim;
  c.epochs = f.epoch;
  c.lr = f.lr;
  c.negatives = f.neg;
  c.window = f.ws;
  c.subsample_t = f.t;
  c.min_count = f.min_count;
  c.threads = f.threads;
  c.seed = f.seed;
  c.ngram.bucket_size = f.bucket;
  c.ngram.char_min = f.minn;
  c.ngram.char_max = f.maxn;
  c.ngram.jamo_min = f.jamo_minn;
  c.ngram.jamo_max = f.jamo_maxn;
  c.ngram.hanja_min = f.hanja_minn;
  c.ngram.hanja_max = f.hanja_maxn;
  c.ngram.granularities = hsisg::Granularities::parse(f.granularities);
  c.validate();
  return c;
}

/// Either a binary model or a .vec table, behind one lookup interface.
class AnySource {
 public:
  explicit AnySource(const EvalFlags& f) : AnySource(f.model, f.model_format) {}
  AnySource(const std::string& path, const std::string& format) {
    if (format == "vec") {
      table_.emplace(hsisg::VecTable::load(path));
    } else {
      model_.emplace(hsisg::load_model(path));
      vectors_.emplace(*model_);
    }
  }
  hsisg::ComposedVector lookup(const std::string& w) const {
    return table_ ? table_->lookup(w) : vectors_->lookup(w);
  }
  std::vector<std::string> words() const { return table_ ? table_->words() : vectors_->words(); }

 private:
  std::optional<hsisg::EmbeddingModel> model_;
  std::optional<hsisg::ModelVectors<float>> vectors_;
  std::optional<hsisg::VecTable> table_;
};

int cmd_train(const TrainFlags& f, const hsisg::TrainConfig& config) {
  const auto corpus = hsisg::Corpus::from_file(f.input);
  auto vocab = hsisg::build_vocab(corpus, config.min_count, config.ngram);
  std::cerr << "vocab: " << vocab.size() << " words, " << vocab.total_tokens << " tokens, "
            << vocab.malformed_tokens << " malformed tokens skipped\n";
  auto model = hsisg::initialize_model<float>(std::move(vocab), config);

  std::optional<hsisg::TransferReport> transfer;
  if (!f.pretrained_hanja.empty()) {
    const auto lexicon = hsisg::load_pretrained(f.pretrained_hanja);
    const auto mapping = f.hanja_map.empty() ? hsisg::CharMapping{} : hsisg::load_char_mapping(f.hanja_map);
    transfer = hsisg::init_hanja_slots(model, lexicon, mapping, model.vocab.hanja_ngrams);
    std::cerr << "transfer: " << transfer->ngrams_matched << " of "
              << transfer->ngrams_matched + transfer->ngrams_missed << " Hanja n-grams matched, "
              << transfer->slots_initialized << " slots initialised, " << transfer->collisions_detected
              << " collisions\n";
  }

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  hsisg::TrainOptions options;
  options.stop = &g_stop;
  const auto stats = hsisg::train_model(model, corpus, options);
  if (stats.interrupted) {
    std::cerr << "interrupted; no model written\n";
    return kRuntimeError;
  }
  for (std::size_t e = 0; e < stats.epoch_loss.size(); ++e) {
    std::cerr << "epoch " << e + 1 << " mean loss " << hsisg::format_g(stats.epoch_loss[e], 6) << '\n';
  }

  hsisg::save_model(model, f.output);
  const auto manifest = hsisg::run_manifest(config, model.vocab, stats, transfer);
  hsisg::write_file_atomic(f.output + ".manifest",
                           [&](std::ostream& out) { hsisg::write_key_values(out, manifest); });
  return 0;
}

void write_report(const std::string& path, const hsisg::KeyValues& kv) {
  if (path.empty()) return;
  hsisg::write_file_atomic(path, [&](std::ostream& out) { hsisg::write_key_values(out, kv); });
}

int cmd_analogy(const EvalFlags& f) {
  const auto items = hsisg::load_analogy_dataset(f.dataset);
  const AnySource source(f);
  const auto report = hsisg::run_analogy(source, items);
  std::cout << hsisg::format_analogy_table(report);
  write_report(f.out, hsisg::analogy_key_values(report));
  return 0;
}

int cmd_similarity(const EvalFlags& f) {
  const auto items = hsisg::load_similarity_dataset(f.dataset);
  const AnySource source(f);
  const auto report = hsisg::run_similarity(source, items);
  std::cout << hsisg::format_similarity_table(report);
  write_report(f.out, hsisg::similarity_key_values(report));
  return 0;
}

int cmd_nn(const NnFlags& f) {
  const AnySource source(f.model, f.model_format);
  for (const auto& n : hsisg::nearest_neighbors(source, f.query, f.k)) {
    std::cout << n.word << '\t' << hsisg::format_g(n.cosine, 6) << '\n';
  }
  return 0;
}

int cmd_export_vec(const ExportFlags& f) {
  const auto model = hsisg::load_model(f.model);
  hsisg::export_vec(model, f.output, f.composed != 0);
  return 0;
}

int cmd_inspect(const InspectFlags& f) {
  const auto s = hsisg::inspect_model(f.model);
  const auto& h = s.header;
  std::uint64_t total = 0;
  for (const auto& w : s.words) total += w.second;
  std::cout << "version\t" << h.version << "\ndim\t" << h.dim << "\nvocab_size\t" << h.vocab_size << "\nbucket\t"
            << h.bucket_size << "\ngranularities\t" << h.ngram.granularities.to_string() << "\nchar_ngrams\t"
            << h.ngram.char_min << '-' << h.ngram.char_max << "\njamo_ngrams\t" << h.ngram.jamo_min << '-'
            << h.ngram.jamo_max << "\nhanja_ngrams\t" << h.ngram.hanja_min << '-' << h.ngram.hanja_max << "\nlr\t"
            << hsisg::format_g(h.lr, 6) << "\nsubsample_t\t" << hsisg::format_g(h.subsample_t, 6) << "\nepochs\t"
            << h.epochs << "\nnegatives\t" << h.negatives << "\nwindow\t" << h.window << "\nseed\t" << h.seed
            << "\ntoken_count\t" << total << "\nfile_size\t" << s.file_size << "\nexpected_size\t"
            << s.expected_size << "\nsize_check\t" << (s.file_size == s.expected_size ? "ok" : "MISMATCH")
            << "\nreserved_symbols\tU+E000 bow, U+E001 eow, U+E002 empty-final, U+E003 <boh>, U+E004 <eoh>\n";
  const std::size_t shown = std::min<std::size_t>(10, s.words.size());
  for (std::size_t i = 0; i < shown; ++i) std::cout << "word\t" << s.words[i].first << '\t' << s.words[i].second << '\n';
  return s.file_size == s.expected_size ? 0 : kRuntimeError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Korean word embeddings with character, jamo and Hanja subword units"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  TrainFlags tf;
  auto* train = app.add_subcommand("train", "train a model from an annotated corpus");
  train->add_option("--input", tf.input, "annotated corpus (one sentence per line)")->required();
  train->add_option("--output", tf.output, "model file; the run manifest goes to <output>.manifest")->required();
  train->add_option("--dim", tf.dim, "vector dimension");
  train->add_option("--epoch", tf.epoch, "training epochs");
  train->add_option("--lr", tf.lr, "initial learning rate");
  train->add_option("--neg", tf.neg, "negative samples per pair");
  train->add_option("--ws", tf.ws, "maximum context window");
  train->add_option("-t", tf.t, "subsampling threshold");
  train->add_option("--min-count", tf.min_count, "minimum word count");
  train->add_option("--bucket", tf.bucket, "number of n-gram hash buckets");
  train->add_option("--minn", tf.minn, "minimum character n-gram length");
  train->add_option("--maxn", tf.maxn, "maximum character n-gram length");
  train->add_option("--jamo-minn", tf.jamo_minn, "minimum jamo n-gram length");
  train->add_option("--jamo-maxn", tf.jamo_maxn, "maximum jamo n-gram length");
  train->add_option("--hanja-minn", tf.hanja_minn, "minimum Hanja n-gram length");
  train->add_option("--hanja-maxn", tf.hanja_maxn, "maximum Hanja n-gram length");
  train->add_option("--granularities", tf.granularities, "subword units: any of c, j, h, or none");
  train->add_option("--threads", tf.threads, "worker threads");
  train->add_option("--seed", tf.seed, "random seed");
  train->add_option("--pretrained-hanja", tf.pretrained_hanja, "Chinese .vec file used to initialise Hanja n-grams");
  train->add_option("--hanja-map", tf.hanja_map, "Hanja to simplified Chinese TSV (identity when absent)");

  EvalFlags af, sf;
  auto* analogy = app.add_subcommand("analogy", "mean cosine distance on an analogy dataset");
  auto* similarity = app.add_subcommand("similarity", "Pearson/Spearman on a word similarity dataset");
  for (auto [cmd, f] : {std::pair{analogy, &af}, std::pair{similarity, &sf}}) {
    cmd->add_option("--model", f->model, "model file")->required();
    cmd->add_option("--dataset", f->dataset, "evaluation dataset")->required();
    cmd->add_option("--model-format", f->model_format, "bin or vec")->check(CLI::IsMember({"bin", "vec"}));
    cmd->add_option("--out", f->out, "machine-readable report (metric<TAB>value)");
  }

  NnFlags nf;
  auto* nn = app.add_subcommand("nn", "nearest neighbours of a word");
  nn->add_option("--model", nf.model, "model file")->required();
  nn->add_option("--query", nf.query, "query word")->required();
  nn->add_option("-k", nf.k, "number of neighbours")->check(CLI::PositiveNumber);
  nn->add_option("--model-format", nf.model_format, "bin or vec")->check(CLI::IsMember({"bin", "vec"}));

  ExportFlags ef;
  auto* exp = app.add_subcommand("export-vec", "write word vectors in word2vec text format");
  exp->add_option("--model", ef.model, "model file")->required();
  exp->add_option("--output", ef.output, ".vec output path")->required();
  exp->add_option("--composed", ef.composed, "1: unit-sum vectors, 0: raw whole-word rows");

  InspectFlags inf;
  auto* inspect = app.add_subcommand("inspect", "print model header and vocabulary statistics");
  inspect->add_option("--model", inf.model, "model file")->required();

  auto args = normalize_args(argc, argv);
  std::reverse(args.begin(), args.end());
  hsisg::TrainConfig config;
  try {
    app.parse(args);
    if (train->parsed()) config = to_config(tf);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  } catch (const hsisg::Error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (train->parsed()) return cmd_train(tf, config);
    if (analogy->parsed()) return cmd_analogy(af);
    if (similarity->parsed()) return cmd_similarity(sf);
    if (nn->parsed()) return cmd_nn(nf);
    if (exp->parsed()) return cmd_export_vec(ef);
    if (inspect->parsed()) return cmd_inspect(inf);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kUsageError;
}
