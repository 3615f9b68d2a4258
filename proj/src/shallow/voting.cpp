#include "opc/shallow/voting.hpp"

#include <algorithm>
#include <array>

#include "opc/error.hpp"

namespace opc::shallow {

VotingModel train_voting(const FeatureMatrix& train, const VotingConfig& config) {
  return VotingModel{train_svm(train, config.svm), train_knn(train, config.k),
                     train_tree(train, config.max_depth, config.min_leaf)};
}

int majority_vote(const MemberVotes& votes, std::size_t* winner_votes) {
  const std::array<int, 3> v{votes.svm, votes.knn, votes.tree};
  int best = -1;
  std::size_t best_count = 0;
  for (int candidate : v) {
    const auto count = static_cast<std::size_t>(std::count(v.begin(), v.end(), candidate));
    if (count > best_count || (count == best_count && candidate < best)) {
      best = candidate;
      best_count = count;
    }
  }
  if (winner_votes) *winner_votes = best_count;
  return best;
}

MemberVotes member_votes(const VotingModel& model, std::span<const double> row) {
  return {predict_svm(model.svm, row), predict_knn(model.knn, row), predict_tree(model.tree, row)};
}

int predict_voting(const VotingModel& model, std::span<const double> row) {
  return majority_vote(member_votes(model, row));
}

}  // namespace opc::shallow
