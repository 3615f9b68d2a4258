#include "opc/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>

#include "opc/error.hpp"
#include "opc/features.hpp"
#include "opc/neural/checkpoint.hpp"
#include "opc/neural/trainer.hpp"
#include "opc/random.hpp"
#include "opc/shallow/model_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace opc {

namespace {

constexpr std::uint64_t kOversampleStream = 11;

std::vector<OpcodeSequence> sequences_of(const Corpus& corpus, std::span<const std::size_t> rows) {
  std::vector<OpcodeSequence> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(corpus.samples[r].sequence);
  return out;
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  return rows;
}

std::vector<int> labels_of(const Corpus& corpus, std::span<const std::size_t> rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(corpus.class_index.at(corpus.samples[r].family));
  return out;
}

struct PreparedData {
  FeatureMatrix train;
  FeatureMatrix test;
  json features_doc;  // n-gram path only
  TokenIndex token_index;
};

// Row-level featurizer shared by both orders: "fit" sees the rows used to
// build vocabularies and scalers.
PreparedData prepare(const Corpus& corpus, const RunConfig& cfg, bool ngram) {
  const std::size_t k = corpus.num_classes();
  const auto names = corpus.class_names();
  const std::uint64_t oversample_seed = mix_seed(cfg.seed, kOversampleStream);
  PreparedData d;

  auto featurize = [&](std::span<const std::size_t> fit_rows) {
    struct Featurizer {
      NGramVocabulary vocab;
      TokenIndex tokens;
    } f;
    auto seqs = sequences_of(corpus, fit_rows);
    if (ngram) {
      f.vocab = build_vocabulary(seqs);
    } else {
      f.tokens = build_token_index(seqs);
    }
    return f;
  };
  auto to_matrix = [&](const auto& f, std::span<const std::size_t> rows) {
    if (ngram) return vectorize_all(sequences_of(corpus, rows), labels_of(corpus, rows), k, f.vocab);
    std::vector<LabeledSample> picked;
    for (std::size_t r : rows) picked.push_back(corpus.samples[r]);
    return encode_sequences(picked, corpus.class_index, f.tokens, cfg.cnn_sequence_length).matrix;
  };

  if (cfg.pipeline_order == PipelineOrder::PaperFaithful) {
    // featurize, scale and oversample everything, then split
    const auto rows = all_rows(corpus.samples.size());
    auto f = featurize(rows);
    FeatureMatrix x = to_matrix(f, rows);
    if (ngram) {
      ScalerParams scaler = fit_scaler(x);
      x = apply_scaler(x, scaler);
      d.features_doc = features_to_json(f.vocab, scaler);
    }
    x = random_oversample(x, oversample_seed);
    auto split = stratified_split(x.labels, k, cfg.test_fraction, cfg.seed, names);
    d.train = x.select(split.train);
    d.test = x.select(split.test);
    d.token_index = f.tokens;
  } else {
    // split, fit on the training side only, oversample training rows
    const auto labels = corpus.labels();
    auto split = stratified_split(labels, k, cfg.test_fraction, cfg.seed, names);
    auto f = featurize(split.train);
    FeatureMatrix train = to_matrix(f, split.train);
    FeatureMatrix test = to_matrix(f, split.test);
    if (ngram) {
      ScalerParams scaler = fit_scaler(train);
      train = apply_scaler(train, scaler);
      test = apply_scaler(test, scaler);
      d.features_doc = features_to_json(f.vocab, scaler);
    }
    d.train = random_oversample(train, oversample_seed);
    d.test = std::move(test);
    d.token_index = f.tokens;
  }
  return d;
}

double accuracy_of(std::span<const int> truth, std::span<const int> pred) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += truth[i] == pred[i] ? 1 : 0;
  return truth.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(truth.size());
}

template <typename Predict>
std::vector<int> predict_rows(const FeatureMatrix& m, Predict&& predict) {
  std::vector<int> out;
  out.reserve(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) out.push_back(predict(m.row(i)));
  return out;
}

neural::CnnTrainConfig cnn_config(const RunConfig& cfg) {
  neural::CnnTrainConfig c;
  c.epochs = cfg.cnn_epochs;
  c.batch_size = cfg.cnn_batch_size;
  c.lr = cfg.cnn_lr;
  c.seed = cfg.seed;
  c.conv1_channels = cfg.cnn_conv1_channels;
  c.conv2_channels = cfg.cnn_conv2_channels;
  c.hidden = cfg.cnn_hidden;
  c.dropout = cfg.cnn_dropout;
  c.scheduler.factor = cfg.scheduler_factor;
  c.scheduler.patience = cfg.scheduler_patience;
  c.scheduler.threshold = cfg.scheduler_threshold;
  c.scheduler.min_lr = cfg.scheduler_min_lr;
  return c;
}

}  // namespace

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(Errc::Io, "short write to " + path.string());
}

json corpus_to_json(const Corpus& corpus) {
  json samples = json::array();
  for (const auto& s : corpus.samples) {
    samples.push_back(json{{"family", s.family}, {"sample_id", s.sample_id}, {"tokens", s.sequence}});
  }
  return json{{"version", kManifestVersion},
              {"skipped_empty", corpus.skipped_empty},
              {"skipped_malformed", corpus.skipped_malformed},
              {"samples", samples}};
}

Corpus corpus_from_json(const json& doc) {
  if (!doc.is_object() || doc.value("version", -1) != kManifestVersion) {
    throw Error(Errc::IncompatibleArtifactVersion, "corpus cache has an unsupported version");
  }
  std::vector<LabeledSample> samples;
  for (const auto& s : doc.at("samples")) {
    samples.push_back({s.at("family").get<std::string>(), s.at("sample_id").get<std::string>(),
                       s.at("tokens").get<OpcodeSequence>()});
  }
  if (samples.empty()) throw Error(Errc::NoSamples, "corpus cache holds no samples");
  Corpus corpus = make_corpus(std::move(samples));
  corpus.skipped_empty = doc.at("skipped_empty").get<std::size_t>();
  corpus.skipped_malformed = doc.at("skipped_malformed").get<std::size_t>();
  return corpus;
}

json manifest_json(const Corpus& corpus, const fs::path& corpus_dir) {
  return json{{"version", kManifestVersion},
              {"corpus_dir", corpus_dir.string()},
              {"samples", corpus.samples.size()},
              {"families", corpus.family_counts()},
              {"skipped_files", corpus.skipped_empty + corpus.skipped_malformed},
              {"skipped_empty", corpus.skipped_empty},
              {"skipped_malformed", corpus.skipped_malformed}};
}

Corpus ingest(const fs::path& corpus_dir, const fs::path& artifact_dir) {
  Corpus corpus = load_corpus(corpus_dir);
  fs::create_directories(artifact_dir);
  write_text_file(artifact_dir / kManifestFile, manifest_json(corpus, corpus_dir).dump(2) + "\n");
  write_text_file(artifact_dir / kCorpusCacheFile, corpus_to_json(corpus).dump() + "\n");
  return corpus;
}

Corpus load_cached_corpus(const fs::path& artifact_dir) {
  const fs::path cache = artifact_dir / kCorpusCacheFile;
  if (!fs::exists(cache) || !fs::exists(artifact_dir / kManifestFile)) {
    throw Error(Errc::Io, "no ingested corpus in " + artifact_dir.string() + " (run ingest first)");
  }
  json doc;
  try {
    doc = json::parse(read_text_file(cache));
  } catch (const json::parse_error& e) {
    throw Error(Errc::Io, "corrupt corpus cache: " + std::string(e.what()));
  }
  return corpus_from_json(doc);
}

void write_corpus_files(const Corpus& corpus, const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& s : corpus.samples) {
    write_text_file(dir / (s.family + "_" + s.sample_id + ".opcode"), render_opcode_file(s.sequence));
  }
}

TrainOutcome run_training(const Corpus& corpus, const RunConfig& cfg, const fs::path& artifact_dir) {
  if (corpus.num_classes() < 2) throw Error(Errc::SingleClass, "training needs at least 2 families");
  fs::create_directories(artifact_dir);

  const bool is_cnn = cfg.model == ModelKind::Cnn;
  const bool ngram = !is_cnn || cfg.cnn_input == CnnInput::NGram;
  PreparedData data = prepare(corpus, cfg, ngram);

  TrainOutcome out;
  out.class_names = corpus.class_names();
  json metrics{{"version", kManifestVersion},
               {"model", to_string(cfg.model)},
               {"pipeline_order", to_string(cfg.pipeline_order)},
               {"seed", cfg.seed},
               {"train_rows", data.train.rows},
               {"test_rows", data.test.rows}};
  if (ngram) write_text_file(artifact_dir / kFeaturesFile, data.features_doc.dump(2) + "\n");

  std::vector<int> predicted;
  if (is_cnn) {
    auto trained = neural::train_cnn(data.train, cnn_config(cfg));
    predicted = neural::predict_cnn_all(trained.model, data.test);
    out.loss_history = trained.loss_history;
    neural::save_checkpoint(artifact_dir / kCheckpointFile, trained.model);

    json sidecar{{"version", shallow::kModelFormatVersion},
                 {"model_type", "cnn"},
                 {"checkpoint", kCheckpointFile},
                 {"classes", out.class_names},
                 {"input", to_string(cfg.cnn_input)},
                 {"sequence_length", cfg.cnn_sequence_length},
                 {"token_index", data.token_index},
                 {"config", config_to_json(cfg)},
                 {"loss_history", trained.loss_history},
                 {"lr_history", trained.lr_history}};
    write_text_file(artifact_dir / kModelFile, sidecar.dump(2) + "\n");
    metrics["loss_history"] = trained.loss_history;
  } else {
    shallow::ShallowModel model;
    shallow::SvmConfig svm{cfg.svm_c, cfg.svm_epochs, cfg.seed};
    switch (cfg.model) {
      case ModelKind::Svm: model = shallow::train_svm(data.train, svm); break;
      case ModelKind::Knn: model = shallow::train_knn(data.train, cfg.knn_k); break;
      case ModelKind::Tree: model = shallow::train_tree(data.train, cfg.tree_max_depth, cfg.tree_min_leaf); break;
      case ModelKind::Voting:
        model = shallow::train_voting(data.train, {svm, cfg.knn_k, cfg.tree_max_depth, cfg.tree_min_leaf});
        break;
      case ModelKind::Cnn: break;
    }
    predicted = predict_rows(data.test, [&](auto row) { return shallow::predict_with_score(model, row).label; });

    if (const auto* voting = std::get_if<shallow::VotingModel>(&model)) {
      const auto& truth = data.test.labels;
      out.member_accuracy["svm"] = accuracy_of(truth, predict_rows(data.test, [&](auto r) { return shallow::predict_svm(voting->svm, r); }));
      out.member_accuracy["knn"] = accuracy_of(truth, predict_rows(data.test, [&](auto r) { return shallow::predict_knn(voting->knn, r); }));
      out.member_accuracy["tree"] = accuracy_of(truth, predict_rows(data.test, [&](auto r) { return shallow::predict_tree(voting->tree, r); }));
      metrics["members"] = out.member_accuracy;
    }
    json doc = shallow::model_to_json(model);
    doc["classes"] = out.class_names;
    write_text_file(artifact_dir / kModelFile, doc.dump() + "\n");
  }

  out.report = compute_report(confusion(data.test.labels, predicted, corpus.num_classes()));
  metrics["report"] = report_to_json(out.report, out.class_names);
  out.metrics = metrics;
  write_text_file(artifact_dir / kMetricsFile, metrics.dump(2) + "\n");
  return out;
}

PredictOutcome run_prediction(const fs::path& artifact_dir, const fs::path& target) {
  json doc;
  try {
    doc = json::parse(read_text_file(artifact_dir / kModelFile));
  } catch (const json::parse_error& e) {
    throw Error(Errc::Io, "corrupt model artifact: " + std::string(e.what()));
  }
  if (!doc.is_object() || doc.value("version", -1) != shallow::kModelFormatVersion) {
    throw Error(Errc::IncompatibleArtifactVersion, "model artifact version is not " +
                                                       std::to_string(shallow::kModelFormatVersion));
  }
  const auto classes = doc.at("classes").get<std::vector<std::string>>();
  const std::string type = doc.at("model_type").get<std::string>();

  // Build a row -> (label, score) classifier over raw opcode sequences.
  std::function<std::pair<int, double>(const OpcodeSequence&)> classify;
  std::shared_ptr<std::pair<NGramVocabulary, ScalerParams>> features;
  auto ngram_row = [&features](const OpcodeSequence& seq) {
    auto row = vectorize(seq, features->first);
    apply_scaler_row(row, features->second);
    return row;
  };
  const bool needs_ngram = type != "cnn" || doc.at("input").get<std::string>() == "ngram";
  if (needs_ngram) {
    features = std::make_shared<std::pair<NGramVocabulary, ScalerParams>>(
        features_from_json(json::parse(read_text_file(artifact_dir / kFeaturesFile))));
  }

  if (type == "cnn") {
    auto model = std::make_shared<neural::CnnModel>(
        neural::load_checkpoint(artifact_dir / doc.at("checkpoint").get<std::string>()));
    if (needs_ngram) {
      classify = [model, ngram_row](const OpcodeSequence& seq) {
        auto p = neural::predict_cnn(*model, ngram_row(seq));
        return std::pair{p.label, p.score};
      };
    } else {
      auto tokens = std::make_shared<TokenIndex>(doc.at("token_index").get<TokenIndex>());
      const auto length = doc.at("sequence_length").get<std::size_t>();
      classify = [model, tokens, length](const OpcodeSequence& seq) {
        auto p = neural::predict_cnn(*model, encode_sequence(seq, *tokens, length));
        return std::pair{p.label, p.score};
      };
    }
  } else {
    auto model = std::make_shared<shallow::ShallowModel>(shallow::model_from_json(doc));
    classify = [model, ngram_row](const OpcodeSequence& seq) {
      auto p = shallow::predict_with_score(*model, ngram_row(seq));
      return std::pair{p.label, p.score};
    };
  }

  std::vector<fs::path> files;
  if (fs::is_directory(target)) {
    for (const auto& entry : fs::directory_iterator(target)) {
      if (entry.is_regular_file() && entry.path().extension() == ".opcode") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  } else if (fs::exists(target)) {
    files.push_back(target);
  } else {
    throw Error(Errc::Io, "prediction target " + target.string() + " does not exist");
  }

  PredictOutcome out;
  for (const auto& file : files) {
    try {
      auto [label, score] = classify(parse_opcode_file(read_text_file(file)));
      out.lines.push_back({file.string(), classes.at(static_cast<std::size_t>(label)), score});
    } catch (const Error& e) {
      out.failures.push_back(file.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace opc
