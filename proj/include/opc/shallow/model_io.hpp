#pragma once

#include <string>
#include <variant>

#include "json.hpp"
#include "opc/shallow/voting.hpp"

namespace opc::shallow {

inline constexpr int kModelFormatVersion = 1;

using ShallowModel = std::variant<LinearSvmModel, KnnModel, DecisionTreeModel, VotingModel>;

/// "svm", "knn", "tree" or "voting".
std::string model_type(const ShallowModel& model);

/// Versioned document discriminated by `model_type`.
nlohmann::json model_to_json(const ShallowModel& model);
/// Throws IncompatibleArtifactVersion on version mismatch, Config on an unknown model_type.
ShallowModel model_from_json(const nlohmann::json& doc);

struct ShallowPrediction {
  int label = 0;
  /// Winning decision value for SVM, vote fraction otherwise.
  double score = 0.0;
};

ShallowPrediction predict_with_score(const ShallowModel& model, std::span<const double> row);

}  // namespace opc::shallow
