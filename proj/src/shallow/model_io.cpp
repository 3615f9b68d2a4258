#include "opc/shallow/model_io.hpp"

#include <numeric>

#include "opc/error.hpp"

using nlohmann::json;

namespace opc::shallow {

namespace {

json matrix_to_json(const FeatureMatrix& m) {
  return json{{"rows", m.rows}, {"cols", m.cols}, {"n_classes", m.n_classes},
              {"values", m.values}, {"labels", m.labels}};
}

FeatureMatrix matrix_from_json(const json& j) {
  FeatureMatrix m;
  m.rows = j.at("rows").get<std::size_t>();
  m.cols = j.at("cols").get<std::size_t>();
  m.n_classes = j.at("n_classes").get<std::size_t>();
  m.values = j.at("values").get<std::vector<double>>();
  m.labels = j.at("labels").get<std::vector<int>>();
  if (m.values.size() != m.rows * m.cols || m.labels.size() != m.rows) {
    throw Error(Errc::DimensionMismatch, "stored knn matrix has inconsistent dimensions");
  }
  return m;
}

json body(const LinearSvmModel& m) {
  return json{{"C", m.config.C}, {"epochs", m.config.epochs}, {"seed", m.config.seed},
              {"weights", m.weights}, {"bias", m.bias}};
}

json body(const KnnModel& m) { return json{{"k", m.k}, {"stored", matrix_to_json(m.stored)}}; }

json body(const DecisionTreeModel& m) {
  json nodes = json::array();
  for (const auto& n : m.nodes) {
    nodes.push_back(json{{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left},
                         {"right", n.right}, {"counts", n.class_counts}});
  }
  // unlimited depth is stored as null
  json depth = m.max_depth == kUnlimitedDepth ? json(nullptr) : json(m.max_depth);
  return json{{"max_depth", depth}, {"min_leaf", m.min_leaf}, {"num_features", m.num_features},
              {"num_classes", m.num_classes}, {"nodes", nodes}};
}

json body(const VotingModel& m) {
  return json{{"svm", body(m.svm)}, {"knn", body(m.knn)}, {"tree", body(m.tree)}};
}

LinearSvmModel svm_from(const json& j) {
  LinearSvmModel m;
  m.config.C = j.at("C").get<double>();
  m.config.epochs = j.at("epochs").get<std::size_t>();
  m.config.seed = j.at("seed").get<std::uint64_t>();
  m.weights = j.at("weights").get<std::vector<std::vector<double>>>();
  m.bias = j.at("bias").get<std::vector<double>>();
  if (m.bias.size() != m.weights.size()) throw Error(Errc::DimensionMismatch, "svm bias/weight count");
  return m;
}

KnnModel knn_from(const json& j) { return KnnModel{j.at("k").get<std::size_t>(), matrix_from_json(j.at("stored"))}; }

DecisionTreeModel tree_from(const json& j) {
  DecisionTreeModel m;
  m.max_depth = j.at("max_depth").is_null() ? kUnlimitedDepth : j.at("max_depth").get<std::size_t>();
  m.min_leaf = j.at("min_leaf").get<std::size_t>();
  m.num_features = j.at("num_features").get<std::size_t>();
  m.num_classes = j.at("num_classes").get<std::size_t>();
  for (const auto& n : j.at("nodes")) {
    TreeNode node;
    node.feature = n.at("feature").get<int>();
    node.threshold = n.at("threshold").get<double>();
    node.left = n.at("left").get<int>();
    node.right = n.at("right").get<int>();
    node.class_counts = n.at("counts").get<std::vector<std::size_t>>();
    m.nodes.push_back(std::move(node));
  }
  if (m.nodes.empty()) throw Error(Errc::Config, "tree document has no nodes");
  return m;
}

}  // namespace

std::string model_type(const ShallowModel& model) {
  static const char* const kNames[] = {"svm", "knn", "tree", "voting"};
  return kNames[model.index()];
}

json model_to_json(const ShallowModel& model) {
  json doc{{"version", kModelFormatVersion}, {"model_type", model_type(model)}};
  doc["model"] = std::visit([](const auto& m) { return body(m); }, model);
  return doc;
}

ShallowModel model_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("version")) {
    throw Error(Errc::IncompatibleArtifactVersion, "model document has no version");
  }
  const int version = doc.at("version").get<int>();
  if (version != kModelFormatVersion) {
    throw Error(Errc::IncompatibleArtifactVersion, "model document version " + std::to_string(version) +
                                                       ", expected " + std::to_string(kModelFormatVersion));
  }
  const std::string type = doc.at("model_type").get<std::string>();
  const json& m = doc.at("model");
  if (type == "svm") return svm_from(m);
  if (type == "knn") return knn_from(m);
  if (type == "tree") return tree_from(m);
  if (type == "voting") return VotingModel{svm_from(m.at("svm")), knn_from(m.at("knn")), tree_from(m.at("tree"))};
  throw Error(Errc::Config, "unknown model_type '" + type + "'");
}

ShallowPrediction predict_with_score(const ShallowModel& model, std::span<const double> row) {
  struct Visitor {
    std::span<const double> row;
    ShallowPrediction operator()(const LinearSvmModel& m) const {
      auto scores = svm_decision_values(m, row);
      int label = predict_svm(m, row);
      return {label, scores[static_cast<std::size_t>(label)]};
    }
    ShallowPrediction operator()(const KnnModel& m) const {
      auto v = knn_vote(m, row);
      return {v.label, static_cast<double>(v.votes) / static_cast<double>(m.k)};
    }
    ShallowPrediction operator()(const DecisionTreeModel& m) const {
      const auto& leaf = tree_leaf(m, row);
      int label = predict_tree(m, row);
      const auto total = std::accumulate(leaf.class_counts.begin(), leaf.class_counts.end(), std::size_t{0});
      return {label, static_cast<double>(leaf.class_counts[static_cast<std::size_t>(label)]) /
                         static_cast<double>(total)};
    }
    ShallowPrediction operator()(const VotingModel& m) const {
      std::size_t votes = 0;
      int label = majority_vote(member_votes(m, row), &votes);
      return {label, static_cast<double>(votes) / 3.0};
    }
  };
  return std::visit(Visitor{row}, model);
}

}  // namespace opc::shallow
