#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "opc/config.hpp"
#include "opc/corpus.hpp"
#include "opc/metrics.hpp"

namespace opc {

inline constexpr int kManifestVersion = 1;

// Artifact file names inside the artifact directory.
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kCorpusCacheFile = "corpus.json";
inline constexpr const char* kFeaturesFile = "features.json";
inline constexpr const char* kModelFile = "model.json";
inline constexpr const char* kCheckpointFile = "model.opc";
inline constexpr const char* kMetricsFile = "metrics.json";

nlohmann::json corpus_to_json(const Corpus& corpus);
Corpus corpus_from_json(const nlohmann::json& doc);
nlohmann::json manifest_json(const Corpus& corpus, const std::filesystem::path& corpus_dir);

/// Loads the corpus, writes manifest.json and corpus.json under `artifact_dir`.
Corpus ingest(const std::filesystem::path& corpus_dir, const std::filesystem::path& artifact_dir);
Corpus load_cached_corpus(const std::filesystem::path& artifact_dir);

/// Writes one `<family>_<id>.opcode` file per sample.
void write_corpus_files(const Corpus& corpus, const std::filesystem::path& dir);

struct TrainOutcome {
  MetricsReport report;
  std::vector<std::string> class_names;
  std::map<std::string, double> member_accuracy;  // voting only
  std::vector<double> loss_history;               // cnn only
  nlohmann::json metrics;
};

/// Runs featurization, splitting, training and held-out evaluation for the
/// configured model and pipeline order; persists features/model/metrics
/// under `artifact_dir`.
TrainOutcome run_training(const Corpus& corpus, const RunConfig& config,
                          const std::filesystem::path& artifact_dir);

struct PredictionLine {
  std::string path;
  std::string family;
  double score = 0.0;
};

struct PredictOutcome {
  std::vector<PredictionLine> lines;
  std::vector<std::string> failures;  // "<path>: <reason>"
};

/// Classifies one `.opcode` file or every `.opcode` file of a directory, in
/// lexicographic path order. Unparseable files are reported, not fatal.
PredictOutcome run_prediction(const std::filesystem::path& artifact_dir, const std::filesystem::path& target);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace opc
