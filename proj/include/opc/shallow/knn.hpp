#pragma once

#include <cstddef>
#include <span>

#include "opc/matrix.hpp"

namespace opc::shallow {

struct KnnModel {
  std::size_t k = 3;
  FeatureMatrix stored;
};

KnnModel train_knn(const FeatureMatrix& train, std::size_t k);

struct KnnVote {
  int label = 0;
  std::size_t votes = 0;
};

/// Euclidean brute force. Neighbours are ranked by (distance, stored row);
/// vote ties go to the smaller mean neighbour distance, then the lower class id.
KnnVote knn_vote(const KnnModel& model, std::span<const double> row);
int predict_knn(const KnnModel& model, std::span<const double> row);

}  // namespace opc::shallow
