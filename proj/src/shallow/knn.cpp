#include "opc/shallow/knn.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "opc/error.hpp"

namespace opc::shallow {

KnnModel train_knn(const FeatureMatrix& train, std::size_t k) {
  if (k < 1 || k > train.rows) {
    throw Error(Errc::InvalidArgument, "knn k=" + std::to_string(k) + " with " +
                                           std::to_string(train.rows) + " stored rows");
  }
  return KnnModel{k, train};
}

KnnVote knn_vote(const KnnModel& model, std::span<const double> row) {
  const FeatureMatrix& data = model.stored;
  if (row.size() != data.cols) {
    throw Error(Errc::DimensionMismatch, "knn expects " + std::to_string(data.cols) +
                                             " features, got " + std::to_string(row.size()));
  }
  if (model.k < 1 || model.k > data.rows) throw Error(Errc::InvalidArgument, "knn k out of range");

  // squared distances rank identically; sqrt only for the mean-distance tie-break
  std::vector<std::pair<double, std::size_t>> dist(data.rows);
  for (std::size_t i = 0; i < data.rows; ++i) {
    auto r = data.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) {
      const double diff = r[j] - row[j];
      s += diff * diff;
    }
    dist[i] = {s, i};
  }
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(model.k), dist.end());

  std::vector<std::size_t> votes(data.n_classes, 0);
  std::vector<double> dist_sum(data.n_classes, 0.0);
  for (std::size_t n = 0; n < model.k; ++n) {
    const auto c = static_cast<std::size_t>(data.labels[dist[n].second]);
    ++votes[c];
    dist_sum[c] += std::sqrt(dist[n].first);
  }

  KnnVote best{-1, 0};
  double best_mean = 0.0;
  for (std::size_t c = 0; c < votes.size(); ++c) {
    if (votes[c] == 0) continue;
    const double mean = dist_sum[c] / static_cast<double>(votes[c]);
    if (best.label < 0 || votes[c] > best.votes || (votes[c] == best.votes && mean < best_mean)) {
      best = {static_cast<int>(c), votes[c]};
      best_mean = mean;
    }
  }
  return best;
}

int predict_knn(const KnnModel& model, std::span<const double> row) {
  return knn_vote(model, row).label;
}

}  // namespace opc::shallow
