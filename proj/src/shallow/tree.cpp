#include "opc/shallow/tree.hpp"

#include <algorithm>
#include <numeric>

#include "opc/error.hpp"

namespace opc::shallow {

namespace {

constexpr double kGainTolerance = 1e-12;

int majority(const std::vector<std::size_t>& counts) {
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

class Builder {
 public:
  Builder(const FeatureMatrix& data, DecisionTreeModel& model) : data_(data), model_(model) {}

  int build(std::vector<std::size_t> rows, std::size_t depth) {
    const int id = static_cast<int>(model_.nodes.size());
    model_.nodes.emplace_back();
    std::vector<std::size_t> counts(data_.n_classes, 0);
    for (std::size_t r : rows) ++counts[static_cast<std::size_t>(data_.labels[r])];
    model_.nodes[static_cast<std::size_t>(id)].class_counts = counts;

    const bool pure = std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) <= 1;
    if (pure || depth >= model_.max_depth || rows.size() < 2 * model_.min_leaf) return id;

    Split best = find_split(rows, counts);
    if (best.feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) {
      (data_.at(r, static_cast<std::size_t>(best.feature)) <= best.threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    const int l = build(std::move(left), depth + 1);
    const int r = build(std::move(right), depth + 1);
    auto& node = model_.nodes[static_cast<std::size_t>(id)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

 private:
  Split find_split(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& counts) const {
    const double n = static_cast<double>(rows.size());
    const double parent = gini(counts);
    const std::size_t min_leaf = model_.min_leaf;

    Split best;
    std::vector<std::size_t> order(rows);
    std::vector<std::size_t> left(data_.n_classes), right(data_.n_classes);
    for (std::size_t f = 0; f < data_.cols; ++f) {
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return data_.at(a, f) < data_.at(b, f);
      });
      std::fill(left.begin(), left.end(), 0);
      right = counts;
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const auto c = static_cast<std::size_t>(data_.labels[order[i]]);
        ++left[c];
        --right[c];
        const double lo = data_.at(order[i], f);
        const double hi = data_.at(order[i + 1], f);
        if (!(lo < hi)) continue;
        const std::size_t n_left = i + 1;
        const std::size_t n_right = order.size() - n_left;
        if (n_left < min_leaf || n_right < min_leaf) continue;

        const double child = (static_cast<double>(n_left) * gini(left) +
                              static_cast<double>(n_right) * gini(right)) / n;
        const double gain = parent - child;
        if (best.feature < 0 || gain > best.gain + kGainTolerance) {
          double mid = lo + (hi - lo) / 2.0;
          if (!(mid < hi)) mid = lo;
          best = {static_cast<int>(f), mid, gain};
        }
      }
    }
    return best;
  }

  const FeatureMatrix& data_;
  DecisionTreeModel& model_;
};

std::size_t depth_from(const DecisionTreeModel& m, int id) {
  const auto& node = m.nodes[static_cast<std::size_t>(id)];
  if (node.is_leaf()) return 0;
  return 1 + std::max(depth_from(m, node.left), depth_from(m, node.right));
}

}  // namespace

double gini(std::span<const std::size_t> class_counts) {
  const double total = static_cast<double>(std::accumulate(class_counts.begin(), class_counts.end(), std::size_t{0}));
  if (total == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t c : class_counts) {
    const double p = static_cast<double>(c) / total;
    s += p * p;
  }
  return 1.0 - s;
}

std::size_t DecisionTreeModel::depth() const { return nodes.empty() ? 0 : depth_from(*this, 0); }

DecisionTreeModel train_tree(const FeatureMatrix& train, std::size_t max_depth, std::size_t min_leaf) {
  if (train.rows < 1) throw Error(Errc::TooFewRows, "tree training needs at least 1 row");
  if (min_leaf < 1) throw Error(Errc::InvalidArgument, "min_leaf must be >= 1");
  DecisionTreeModel model;
  model.max_depth = max_depth;
  model.min_leaf = min_leaf;
  model.num_features = train.cols;
  model.num_classes = train.n_classes;
  std::vector<std::size_t> rows(train.rows);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  Builder(train, model).build(std::move(rows), 0);
  return model;
}

const TreeNode& tree_leaf(const DecisionTreeModel& model, std::span<const double> row) {
  if (row.size() != model.num_features) {
    throw Error(Errc::DimensionMismatch, "tree expects " + std::to_string(model.num_features) +
                                             " features, got " + std::to_string(row.size()));
  }
  const TreeNode* node = &model.nodes.at(0);
  while (!node->is_leaf()) {
    const int next = row[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left : node->right;
    node = &model.nodes[static_cast<std::size_t>(next)];
  }
  return *node;
}

int predict_tree(const DecisionTreeModel& model, std::span<const double> row) {
  return majority(tree_leaf(model, row).class_counts);
}

}  // namespace opc::shallow
