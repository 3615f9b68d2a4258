#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"

namespace opc {

enum class PipelineOrder { PaperFaithful, LeakFree };
enum class ModelKind { Svm, Knn, Tree, Voting, Cnn };
enum class CnnInput { Sequence, NGram };

std::string to_string(PipelineOrder order);
std::string to_string(ModelKind kind);
std::string to_string(CnnInput input);
PipelineOrder parse_order(const std::string& text);
ModelKind parse_model(const std::string& text);
CnnInput parse_cnn_input(const std::string& text);

/// Every knob of a run. Defaults are the published hyperparameters where
/// those exist (C=1, k=3, depth 20, dropout 0.3, lr 0.001, 10 epochs).
struct RunConfig {
  std::string corpus_dir;
  std::string artifact_dir = "artifacts";
  PipelineOrder pipeline_order = PipelineOrder::PaperFaithful;
  double test_fraction = 0.2;
  std::uint64_t seed = 42;
  ModelKind model = ModelKind::Svm;

  double svm_c = 1.0;
  std::size_t svm_epochs = 200;
  std::size_t knn_k = 3;
  std::size_t tree_max_depth = 20;
  std::size_t tree_min_leaf = 1;

  CnnInput cnn_input = CnnInput::Sequence;
  std::size_t cnn_sequence_length = 512;
  double cnn_dropout = 0.3;
  double cnn_lr = 0.001;
  std::size_t cnn_epochs = 10;
  std::size_t cnn_batch_size = 32;
  std::size_t cnn_conv1_channels = 64;
  std::size_t cnn_conv2_channels = 128;
  std::size_t cnn_hidden = 128;
  double scheduler_factor = 0.5;
  std::size_t scheduler_patience = 2;
  double scheduler_threshold = 1e-4;
  double scheduler_min_lr = 1e-6;

  std::size_t synth_classes = 3;
  std::size_t synth_samples_per_class = 30;
  std::size_t synth_seq_len = 100;
  std::size_t synth_vocab_size = 16;
};

nlohmann::json config_to_json(const RunConfig& config);
/// Keys missing from `doc` keep their defaults; unknown keys and
/// ill-typed values throw Config.
RunConfig config_from_json(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace opc
