#include "opc/config.hpp"

#include <fstream>
#include <functional>
#include <map>

#include "opc/error.hpp"

using nlohmann::json;

namespace opc {

std::string to_string(PipelineOrder order) {
  return order == PipelineOrder::PaperFaithful ? "paper-faithful" : "leak-free";
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Svm: return "svm";
    case ModelKind::Knn: return "knn";
    case ModelKind::Tree: return "tree";
    case ModelKind::Voting: return "voting";
    case ModelKind::Cnn: return "cnn";
  }
  return "svm";
}

std::string to_string(CnnInput input) { return input == CnnInput::Sequence ? "sequence" : "ngram"; }

PipelineOrder parse_order(const std::string& text) {
  if (text == "paper-faithful") return PipelineOrder::PaperFaithful;
  if (text == "leak-free") return PipelineOrder::LeakFree;
  throw Error(Errc::Config, "pipeline order must be paper-faithful or leak-free, got '" + text + "'");
}

ModelKind parse_model(const std::string& text) {
  for (auto k : {ModelKind::Svm, ModelKind::Knn, ModelKind::Tree, ModelKind::Voting, ModelKind::Cnn}) {
    if (to_string(k) == text) return k;
  }
  throw Error(Errc::Config, "model must be svm|knn|tree|voting|cnn, got '" + text + "'");
}

CnnInput parse_cnn_input(const std::string& text) {
  if (text == "sequence") return CnnInput::Sequence;
  if (text == "ngram") return CnnInput::NGram;
  throw Error(Errc::Config, "cnn_input must be sequence or ngram, got '" + text + "'");
}

json config_to_json(const RunConfig& c) {
  return json{{"corpus_dir", c.corpus_dir},
              {"artifact_dir", c.artifact_dir},
              {"pipeline_order", to_string(c.pipeline_order)},
              {"test_fraction", c.test_fraction},
              {"seed", c.seed},
              {"model", to_string(c.model)},
              {"svm_c", c.svm_c},
              {"svm_epochs", c.svm_epochs},
              {"knn_k", c.knn_k},
              {"tree_max_depth", c.tree_max_depth},
              {"tree_min_leaf", c.tree_min_leaf},
              {"cnn_input", to_string(c.cnn_input)},
              {"cnn_sequence_length", c.cnn_sequence_length},
              {"cnn_dropout", c.cnn_dropout},
              {"cnn_lr", c.cnn_lr},
              {"cnn_epochs", c.cnn_epochs},
              {"cnn_batch_size", c.cnn_batch_size},
              {"cnn_conv1_channels", c.cnn_conv1_channels},
              {"cnn_conv2_channels", c.cnn_conv2_channels},
              {"cnn_hidden", c.cnn_hidden},
              {"scheduler_factor", c.scheduler_factor},
              {"scheduler_patience", c.scheduler_patience},
              {"scheduler_threshold", c.scheduler_threshold},
              {"scheduler_min_lr", c.scheduler_min_lr},
              {"synth_classes", c.synth_classes},
              {"synth_samples_per_class", c.synth_samples_per_class},
              {"synth_seq_len", c.synth_seq_len},
              {"synth_vocab_size", c.synth_vocab_size}};
}

namespace {

template <typename T>
T typed(const json& value, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, std::string>) {
      if (!value.is_string()) throw Error(Errc::Config, "");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!value.is_number()) throw Error(Errc::Config, "");
    } else {
      if (!value.is_number_integer() || (!value.is_number_unsigned() && value.get<std::int64_t>() < 0)) {
        throw Error(Errc::Config, "");
      }
    }
    return value.get<T>();
  } catch (const std::exception&) {
    throw Error(Errc::Config, "config key '" + key + "' has the wrong type");
  }
}

}  // namespace

RunConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(Errc::Config, "config must be a JSON object");
  RunConfig c;
  using Setter = std::function<void(const json&, const std::string&)>;
  auto str = [](std::string& f) -> Setter { return [&f](const json& v, const std::string& k) { f = typed<std::string>(v, k); }; };
  auto real = [](double& f) -> Setter { return [&f](const json& v, const std::string& k) { f = typed<double>(v, k); }; };
  auto count = [](std::size_t& f) -> Setter { return [&f](const json& v, const std::string& k) { f = typed<std::size_t>(v, k); }; };

  const std::map<std::string, Setter> setters{
      {"corpus_dir", str(c.corpus_dir)},
      {"artifact_dir", str(c.artifact_dir)},
      {"pipeline_order", [&c](const json& v, const std::string& k) { c.pipeline_order = parse_order(typed<std::string>(v, k)); }},
      {"test_fraction", real(c.test_fraction)},
      {"seed", [&c](const json& v, const std::string& k) { c.seed = typed<std::uint64_t>(v, k); }},
      {"model", [&c](const json& v, const std::string& k) { c.model = parse_model(typed<std::string>(v, k)); }},
      {"svm_c", real(c.svm_c)},
      {"svm_epochs", count(c.svm_epochs)},
      {"knn_k", count(c.knn_k)},
      {"tree_max_depth", count(c.tree_max_depth)},
      {"tree_min_leaf", count(c.tree_min_leaf)},
      {"cnn_input", [&c](const json& v, const std::string& k) { c.cnn_input = parse_cnn_input(typed<std::string>(v, k)); }},
      {"cnn_sequence_length", count(c.cnn_sequence_length)},
      {"cnn_dropout", real(c.cnn_dropout)},
      {"cnn_lr", real(c.cnn_lr)},
      {"cnn_epochs", count(c.cnn_epochs)},
      {"cnn_batch_size", count(c.cnn_batch_size)},
      {"cnn_conv1_channels", count(c.cnn_conv1_channels)},
      {"cnn_conv2_channels", count(c.cnn_conv2_channels)},
      {"cnn_hidden", count(c.cnn_hidden)},
      {"scheduler_factor", real(c.scheduler_factor)},
      {"scheduler_patience", count(c.scheduler_patience)},
      {"scheduler_threshold", real(c.scheduler_threshold)},
      {"scheduler_min_lr", real(c.scheduler_min_lr)},
      {"synth_classes", count(c.synth_classes)},
      {"synth_samples_per_class", count(c.synth_samples_per_class)},
      {"synth_seq_len", count(c.synth_seq_len)},
      {"synth_vocab_size", count(c.synth_vocab_size)},
  };
  for (const auto& [key, value] : doc.items()) {
    auto it = setters.find(key);
    if (it == setters.end()) throw Error(Errc::Config, "unknown config key '" + key + "'");
    it->second(value, key);
  }
  if (!(c.test_fraction > 0.0 && c.test_fraction < 1.0)) throw Error(Errc::Config, "test_fraction must lie in (0, 1)");
  if (!(c.svm_c > 0.0)) throw Error(Errc::Config, "svm_c must be positive");
  if (!(c.cnn_dropout >= 0.0 && c.cnn_dropout < 1.0)) throw Error(Errc::Config, "cnn_dropout must lie in [0, 1)");
  if (c.knn_k == 0 || c.tree_min_leaf == 0 || c.svm_epochs == 0 || c.cnn_epochs == 0 || c.cnn_batch_size == 0) {
    throw Error(Errc::Config, "counts (knn_k, tree_min_leaf, epochs, batch size) must be >= 1");
  }
  if (c.cnn_sequence_length < 4) throw Error(Errc::Config, "cnn_sequence_length must be >= 4");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::Config, "config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(doc);
}

}  // namespace opc
