// opcml: opcode n-gram / CNN malware family classification driver.
//
//   opcml synth   --out DIR [--config F] [--seed S] [--classes N] [--per-class N] [--seq-len N] [--vocab N]
//   opcml ingest  CORPUS_DIR [--out DIR]
//   opcml train   [--config F] [--model M] [--seed S] [--order O] [--out DIR] [--json]
//   opcml predict TARGET [--out DIR]
//
// Exit codes: 0 success, 1 environment/configuration error, 2 data error.

#include <exception>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "opc/config.hpp"
#include "opc/corpus.hpp"
#include "opc/error.hpp"
#include "opc/metrics.hpp"
#include "opc/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitEnv = 1;
constexpr int kExitData = 2;

void print_chain(const std::exception& e, int level = 0) {
  std::cerr << (level == 0 ? "error: " : "  caused by: ") << e.what() << '\n';
  try {
    std::rethrow_if_nested(e);
  } catch (const std::exception& inner) {
    print_chain(inner, level + 1);
  }
}

int exit_code_for(const std::exception& e) {
  if (const auto* err = dynamic_cast<const opc::Error*>(&e)) {
    return opc::is_data_error(err->code()) ? kExitData : kExitEnv;
  }
  try {
    std::rethrow_if_nested(e);
  } catch (const std::exception& inner) {
    return exit_code_for(inner);
  }
  return kExitEnv;
}

struct CommonOptions {
  std::string config_path;
  std::optional<std::string> model;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> order;
  std::optional<std::string> out;
  bool json = false;
};

opc::RunConfig resolve_config(const CommonOptions& o) {
  opc::RunConfig cfg;
  if (!o.config_path.empty()) {
    try {
      cfg = opc::load_config(o.config_path);
    } catch (...) {
      std::throw_with_nested(std::runtime_error("loading config " + o.config_path));
    }
  }
  if (o.model) cfg.model = opc::parse_model(*o.model);
  if (o.seed) cfg.seed = *o.seed;
  if (o.order) cfg.pipeline_order = opc::parse_order(*o.order);
  if (o.out) cfg.artifact_dir = *o.out;
  return cfg;
}

int cmd_synth(const CommonOptions& o, const std::optional<std::size_t>& classes,
              const std::optional<std::size_t>& per_class, const std::optional<std::size_t>& seq_len,
              const std::optional<std::size_t>& vocab) {
  const auto cfg = resolve_config(o);
  if (!o.out) throw opc::Error(opc::Errc::Config, "synth requires --out DIR");
  opc::SynthParams p{classes.value_or(cfg.synth_classes), per_class.value_or(cfg.synth_samples_per_class),
                     seq_len.value_or(cfg.synth_seq_len), vocab.value_or(cfg.synth_vocab_size), cfg.seed};
  opc::Corpus corpus;
  try {
    corpus = opc::generate_synthetic_corpus(p);
  } catch (const opc::Error& e) {
    throw opc::Error(opc::Errc::Config, e.what());
  }
  opc::write_corpus_files(corpus, *o.out);
  std::cout << "wrote " << corpus.samples.size() << " samples in " << corpus.num_classes()
            << " families to " << *o.out << '\n';
  return kExitOk;
}

int cmd_ingest(const CommonOptions& o, const std::string& corpus_dir) {
  const auto cfg = resolve_config(o);
  const auto corpus = opc::ingest(corpus_dir, cfg.artifact_dir);
  if (corpus.skipped_empty + corpus.skipped_malformed > 0) {
    std::cerr << "warning: skipped " << corpus.skipped_empty << " empty and " << corpus.skipped_malformed
              << " malformed files in " << corpus_dir << '\n';
  }
  std::cout << opc::manifest_json(corpus, corpus_dir).dump(2) << '\n';
  return kExitOk;
}

int cmd_train(const CommonOptions& o) {
  const auto cfg = resolve_config(o);
  const auto corpus = opc::load_cached_corpus(cfg.artifact_dir);
  const auto outcome = opc::run_training(corpus, cfg, cfg.artifact_dir);
  if (o.json) {
    std::cout << outcome.metrics.dump(2) << '\n';
    return kExitOk;
  }
  std::cout << "model: " << opc::to_string(cfg.model) << "  order: " << opc::to_string(cfg.pipeline_order)
            << "  seed: " << cfg.seed << "\n\n";
  std::cout << opc::render_report(outcome.report, outcome.class_names);
  if (!outcome.member_accuracy.empty()) {
    std::cout << "\nmember accuracy\n";
    for (const auto& [name, acc] : outcome.member_accuracy) {
      std::cout << "  " << std::left << std::setw(6) << name << std::right << std::fixed
                << std::setprecision(2) << acc * 100.0 << "%\n";
    }
  }
  return kExitOk;
}

int cmd_predict(const CommonOptions& o, const std::string& target) {
  const auto cfg = resolve_config(o);
  const auto outcome = opc::run_prediction(cfg.artifact_dir, target);
  for (const auto& failure : outcome.failures) std::cerr << "skipped " << failure << '\n';
  std::cout << std::setprecision(17);
  for (const auto& line : outcome.lines) std::cout << line.path << '\t' << line.family << '\t' << line.score << '\n';
  if (outcome.lines.empty()) {
    std::cerr << "error: no file in " << target << " could be classified\n";
    return kExitData;
  }
  return kExitOk;
}

void add_common(CLI::App* cmd, CommonOptions& o, bool with_model) {
  cmd->add_option("--config", o.config_path, "JSON run configuration");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--out", o.out, "artifact (or output) directory");
  if (with_model) {
    cmd->add_option("--model", o.model, "svm|knn|tree|voting|cnn");
    cmd->add_option("--order", o.order, "paper-faithful|leak-free");
    cmd->add_flag("--json", o.json, "print the metrics JSON instead of the table");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Opcode-sequence malware family classifier"};
  app.require_subcommand(1);

  CommonOptions synth_opts, ingest_opts, train_opts, predict_opts;
  std::optional<std::size_t> classes, per_class, seq_len, vocab;
  std::string corpus_dir, target;

  auto* synth = app.add_subcommand("synth", "write a synthetic .opcode corpus");
  add_common(synth, synth_opts, false);
  synth->add_option("--classes", classes, "number of families");
  synth->add_option("--per-class", per_class, "samples per family");
  synth->add_option("--seq-len", seq_len, "opcodes per sample");
  synth->add_option("--vocab", vocab, "distinct opcodes");

  auto* ingest = app.add_subcommand("ingest", "parse a corpus directory into the artifact directory");
  add_common(ingest, ingest_opts, false);
  ingest->add_option("corpus_dir", corpus_dir, "directory of <family>_<id>.opcode files")->required();

  auto* train = app.add_subcommand("train", "featurize, train and evaluate on a held-out split");
  add_common(train, train_opts, true);

  auto* predict = app.add_subcommand("predict", "classify an .opcode file or directory");
  add_common(predict, predict_opts, false);
  predict->add_option("target", target, ".opcode file or directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitEnv;
  }

  try {
    if (*synth) return cmd_synth(synth_opts, classes, per_class, seq_len, vocab);
    if (*ingest) return cmd_ingest(ingest_opts, corpus_dir);
    if (*train) return cmd_train(train_opts);
    if (*predict) return cmd_predict(predict_opts, target);
  } catch (const std::exception& e) {
    print_chain(e);
    return exit_code_for(e);
  }
  return kExitEnv;
}
