#pragma once

#include <span>

#include "opc/shallow/knn.hpp"
#include "opc/shallow/svm.hpp"
#include "opc/shallow/tree.hpp"

namespace opc::shallow {

struct VotingModel {
  LinearSvmModel svm;
  KnnModel knn;
  DecisionTreeModel tree;
};

struct VotingConfig {
  SvmConfig svm;
  std::size_t k = 3;
  std::size_t max_depth = 20;
  std::size_t min_leaf = 1;
};

VotingModel train_voting(const FeatureMatrix& train, const VotingConfig& config);

struct MemberVotes {
  int svm = 0;
  int knn = 0;
  int tree = 0;
};

/// Hard majority of three votes; a three-way split goes to the lowest class id.
int majority_vote(const MemberVotes& votes, std::size_t* winner_votes = nullptr);

MemberVotes member_votes(const VotingModel& model, std::span<const double> row);
int predict_voting(const VotingModel& model, std::span<const double> row);

}  // namespace opc::shallow
