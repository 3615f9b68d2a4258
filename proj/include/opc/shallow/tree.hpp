#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "opc/matrix.hpp"

namespace opc::shallow {

inline constexpr std::size_t kUnlimitedDepth = std::numeric_limits<std::size_t>::max();

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<std::size_t> class_counts;

  bool is_leaf() const { return feature < 0; }
};

struct DecisionTreeModel {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::size_t max_depth = 20;
  std::size_t min_leaf = 1;
  std::size_t num_features = 0;
  std::size_t num_classes = 0;

  /// Longest root-to-leaf path counted in internal nodes.
  std::size_t depth() const;
};

/// CART with Gini impurity. Thresholds are midpoints between consecutive
/// distinct values; a node stays a leaf when pure, at the depth cap, or when
/// it holds fewer than 2 * min_leaf rows. Split ties keep the lowest feature
/// index, then the lowest threshold.
DecisionTreeModel train_tree(const FeatureMatrix& train, std::size_t max_depth,
                             std::size_t min_leaf = 1);

double gini(std::span<const std::size_t> class_counts);

/// Leaf reached by `row` (go left iff value <= threshold).
const TreeNode& tree_leaf(const DecisionTreeModel& model, std::span<const double> row);
int predict_tree(const DecisionTreeModel& model, std::span<const double> row);

}  // namespace opc::shallow
