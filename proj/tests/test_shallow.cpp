#include <random>

#include "doctest.h"
#include "opc/error.hpp"
#include "opc/shallow/model_io.hpp"
#include "oracles.hpp"

using namespace opc::shallow;
using opc::Errc;
using opc::FeatureMatrix;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const opc::Error& e) {
    return e.code();
  }
  FAIL("expected an opc::Error");
  return Errc::Io;
}

FeatureMatrix make(std::size_t cols, std::size_t k, std::vector<std::vector<double>> rows, std::vector<int> labels) {
  FeatureMatrix m(rows.size(), cols, k);
  for (std::size_t i = 0; i < rows.size(); ++i) std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  m.labels = std::move(labels);
  return m;
}

// four corners labelled by the sign of x
FeatureMatrix corners() { return make(2, 2, {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}, {0, 0, 1, 1}); }

FeatureMatrix xor_set() { return make(2, 2, {{0, 0}, {1, 1}, {0, 1}, {1, 0}}, {0, 0, 1, 1}); }

template <typename Predict>
double accuracy(const FeatureMatrix& m, Predict&& predict) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < m.rows; ++i) hit += predict(m.row(i)) == m.labels[i] ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(m.rows);
}

}  // namespace

TEST_CASE("svm separates the corner toy set") {
  auto data = corners();
  auto model = train_svm(data, {1.0, 50, 4});
  CHECK(accuracy(data, [&](auto r) { return predict_svm(model, r); }) == 1.0);
  CHECK(model.num_classes() == 2);
  CHECK(model.num_features() == 2);

  auto again = train_svm(data, {1.0, 50, 4});
  CHECK(again.weights == model.weights);
  CHECK(again.bias == model.bias);
}

TEST_CASE("svm on identical rows predicts the majority class") {
  auto data = make(2, 2, {{1, 2}, {1, 2}, {1, 2}, {1, 2}}, {0, 0, 0, 1});
  auto model = train_svm(data, {1.0, 200, 0});
  CHECK(accuracy(data, [&](auto r) { return predict_svm(model, r); }) == 0.75);
}

TEST_CASE("svm objective decreases") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0.0, 1.0);
  FeatureMatrix data(60, 3, 3);
  for (std::size_t i = 0; i < data.rows; ++i) {
    data.labels[i] = static_cast<int>(i % 3);
    for (std::size_t j = 0; j < 3; ++j) data.at(i, j) = g(rng) + (j == i % 3 ? 2.0 : 0.0);
  }
  auto model = train_svm(data, {1.0, 100, 2});
  REQUIRE(model.objective_history.size() == 100);
  CHECK(model.objective_history.back() < model.initial_objective);
  std::size_t increases = 0;
  for (std::size_t e = 1; e < model.objective_history.size(); ++e) {
    increases += model.objective_history[e] > model.objective_history[e - 1] ? 1 : 0;
  }
  CHECK(increases <= 5);

  // the recorded objective is the documented formula at the returned weights
  double total = 0.0;
  for (std::size_t c = 0; c < 3; ++c) total += hinge_objective(model.weights[c], model.bias[c], data, static_cast<int>(c), 1.0);
  CHECK(total == doctest::Approx(model.objective_history.back()).epsilon(1e-12));
}

TEST_CASE("svm errors") {
  auto single = make(1, 2, {{1}, {2}}, {1, 1});
  CHECK(code_of([&] { train_svm(single, {}); }) == Errc::SingleClass);
  auto model = train_svm(corners(), {1.0, 5, 0});
  std::vector<double> wrong{1, 2, 3};
  CHECK(code_of([&] { predict_svm(model, wrong); }) == Errc::DimensionMismatch);
}

TEST_CASE("predict_svm decision rule") {
  LinearSvmModel m;
  m.weights = {{1, 0}, {-1, 0}};
  m.bias = {0, 0};
  std::vector<double> x{2, 0};
  CHECK(predict_svm(m, x) == 0);
  std::vector<double> origin{0, 0};
  CHECK(predict_svm(m, origin) == 0);
  std::vector<double> neg{-3, 5};
  CHECK(predict_svm(m, neg) == 1);

  // positive rescaling of every class score leaves the argmax alone
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  LinearSvmModel r;
  for (int c = 0; c < 4; ++c) {
    r.weights.push_back({u(rng), u(rng), u(rng)});
    r.bias.push_back(u(rng));
  }
  for (int t = 0; t < 100; ++t) {
    std::vector<double> q{u(rng), u(rng), u(rng)};
    const double scale = 0.01 + 100.0 * (u(rng) + 1.0);
    LinearSvmModel s = r;
    for (auto& w : s.weights) for (auto& v : w) v *= scale;
    for (auto& b : s.bias) b *= scale;
    CHECK(predict_svm(r, q) == predict_svm(s, q));
  }
}

TEST_CASE("knn examples") {
  auto data = make(2, 2, {{0, 0}, {0, 1}, {5, 5}}, {0, 0, 1});
  auto model = train_knn(data, 3);
  std::vector<double> q{0, 0};
  CHECK(predict_knn(model, q) == 0);

  auto one = train_knn(data, 1);
  std::vector<double> exact{5, 5};
  CHECK(predict_knn(one, exact) == 1);

  auto tie = make(2, 2, {{1, 0}, {-1, 0}}, {1, 0});
  CHECK(predict_knn(train_knn(tie, 2), q) == 0);

  // equal vote counts: the class with the closer neighbours wins
  auto near = make(1, 2, {{0.5}, {-2.0}}, {1, 0});
  std::vector<double> zero{0.0};
  CHECK(predict_knn(train_knn(near, 2), zero) == 1);

  CHECK(code_of([&] { train_knn(data, 4); }) == Errc::InvalidArgument);
  CHECK(code_of([&] { train_knn(data, 0); }) == Errc::InvalidArgument);
  std::vector<double> wrong{1};
  CHECK(code_of([&] { predict_knn(model, wrong); }) == Errc::DimensionMismatch);
}

TEST_CASE("knn matches the full-sort oracle, ties included") {
  std::mt19937_64 rng(31);
  for (int dataset = 0; dataset < 10; ++dataset) {
    const std::size_t n = 5 + rng() % 120, d = 1 + rng() % 8, k_classes = 2 + rng() % 4;
    std::vector<std::vector<double>> rows(n, std::vector<double>(d));
    std::vector<int> labels(n);
    // small integer grid so distance ties are common
    for (auto& r : rows) for (auto& v : r) v = static_cast<double>(rng() % 4);
    for (auto& y : labels) y = static_cast<int>(rng() % k_classes);
    auto data = make(d, k_classes, rows, labels);
    for (std::size_t k : {1ul, 2ul, 3ul, 5ul}) {
      if (k > n) continue;
      auto model = train_knn(data, k);
      for (int q = 0; q < 30; ++q) {
        std::vector<double> query(d);
        for (auto& v : query) v = static_cast<double>(rng() % 4);
        CHECK(predict_knn(model, query) == oracle::knn(rows, labels, k_classes, query, k));
      }
    }
  }
}

TEST_CASE("tree examples") {
  auto one = make(1, 2, {{0}, {1}}, {0, 1});
  auto tree = train_tree(one, 20);
  REQUIRE(tree.nodes.size() == 3);
  CHECK(tree.nodes[0].feature == 0);
  CHECK(tree.nodes[0].threshold == 0.5);
  CHECK(accuracy(one, [&](auto r) { return predict_tree(tree, r); }) == 1.0);
  std::vector<double> q{0.2};
  CHECK(predict_tree(tree, q) == 0);

  auto pure = make(2, 3, {{0, 1}, {4, 2}, {9, 9}}, {2, 2, 2});
  auto leaf = train_tree(pure, 20);
  CHECK(leaf.nodes.size() == 1);
  CHECK(leaf.nodes[0].is_leaf());
  std::vector<double> any{100, -5};
  CHECK(predict_tree(leaf, any) == 2);

  std::vector<double> wrong{1, 2};
  CHECK(code_of([&] { predict_tree(tree, wrong); }) == Errc::DimensionMismatch);
  CHECK(code_of([&] { train_tree(FeatureMatrix(0, 1, 2), 3); }) == Errc::TooFewRows);
}

TEST_CASE("tree stump on XOR agrees with exhaustive stump enumeration") {
  auto data = xor_set();
  std::vector<std::vector<double>> rows{{0, 0}, {1, 1}, {0, 1}, {1, 0}};
  const double oracle_best = oracle::best_stump_accuracy(rows, data.labels, 2);
  CHECK(oracle_best == 0.5);
  auto stump = train_tree(data, 1);
  CHECK(stump.depth() <= 1);
  CHECK(accuracy(data, [&](auto r) { return predict_tree(stump, r); }) == oracle_best);
  auto full = train_tree(data, 2);
  CHECK(accuracy(data, [&](auto r) { return predict_tree(full, r); }) == 1.0);
}

TEST_CASE("tree split tie-break prefers the lowest feature") {
  // both features separate the classes perfectly
  auto data = make(2, 2, {{0, 0}, {1, 1}}, {0, 1});
  auto tree = train_tree(data, 5);
  CHECK(tree.nodes[0].feature == 0);
}

TEST_CASE("tree min_leaf and depth caps") {
  std::mt19937_64 rng(44);
  for (int t = 0; t < 10; ++t) {
    FeatureMatrix m(60, 3, 3);
    for (auto& v : m.values) v = static_cast<double>(rng() % 1000) / 10.0;
    for (auto& y : m.labels) y = static_cast<int>(rng() % 3);
    for (std::size_t depth : {1ul, 3ul, 6ul}) {
      auto tree = train_tree(m, depth, 4);
      CHECK(tree.depth() <= depth);
      for (const auto& node : tree.nodes) {
        std::size_t total = 0;
        for (auto c : node.class_counts) total += c;
        CHECK(total >= 4);
      }
    }
    auto full = train_tree(m, kUnlimitedDepth, 1);
    CHECK(accuracy(m, [&](auto r) { return predict_tree(full, r); }) == 1.0);
  }
}

TEST_CASE("voting rule") {
  CHECK(majority_vote({0, 0, 1}) == 0);
  CHECK(majority_vote({2, 1, 1}) == 1);
  CHECK(majority_vote({2, 0, 1}) == 0);
  CHECK(majority_vote({4, 3, 5}) == 3);
  std::size_t votes = 0;
  majority_vote({1, 1, 1}, &votes);
  CHECK(votes == 3);

  auto data = corners();
  VotingConfig cfg{{1.0, 50, 1}, 1, 20, 1};
  auto model = train_voting(data, cfg);
  const double ens = accuracy(data, [&](auto r) { return predict_voting(model, r); });
  CHECK(ens == 1.0);
  CHECK(accuracy(data, [&](auto r) { return predict_svm(model.svm, r); }) == ens);
  CHECK(accuracy(data, [&](auto r) { return predict_knn(model.knn, r); }) == ens);
  CHECK(accuracy(data, [&](auto r) { return predict_tree(model.tree, r); }) == ens);
}

TEST_CASE("model documents reload to identical predictions") {
  std::mt19937_64 rng(5);
  FeatureMatrix m(40, 4, 3);
  for (auto& v : m.values) v = static_cast<double>(rng() % 100) / 7.0;
  for (auto& y : m.labels) y = static_cast<int>(rng() % 3);

  std::vector<ShallowModel> models{train_svm(m, {1.0, 20, 3}), train_knn(m, 3), train_tree(m, kUnlimitedDepth),
                                   train_voting(m, {{1.0, 20, 3}, 3, 20, 1})};
  for (const auto& model : models) {
    auto doc = model_to_json(model);
    CHECK(doc.at("model_type") == model_type(model));
    auto reloaded = model_from_json(nlohmann::json::parse(doc.dump()));
    CHECK(model_to_json(reloaded).dump() == doc.dump());
    for (std::size_t i = 0; i < m.rows; ++i) {
      auto a = predict_with_score(model, m.row(i));
      auto b = predict_with_score(reloaded, m.row(i));
      CHECK(a.label == b.label);
      CHECK(a.score == b.score);
    }
  }
  auto doc = model_to_json(models[0]);
  doc["version"] = 7;
  CHECK(code_of([&] { model_from_json(doc); }) == Errc::IncompatibleArtifactVersion);
  doc["version"] = kModelFormatVersion;
  doc["model_type"] = "forest";
  CHECK(code_of([&] { model_from_json(doc); }) == Errc::Config);
}
