#pragma once

// CART decision trees and bagged random forests over the shared builder.

#include <cmath>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "../random.hpp"
#include "common.hpp"
#include "tree.hpp"

namespace moralframe::classifiers {

// Leaf distribution argmax, first class on ties.
inline int tree_vote(const Tree& t, std::span<const double> row) { return argmax(t.leaf_for(row).value); }

inline Tree train_decision_tree(const DenseMatrix& X, const ColumnIndex& columns, const std::vector<int>& y,
                                std::size_t classes, const TrainConfig& config, std::uint64_t seed) {
  TreeParams params;
  params.max_depth = config.tree_max_depth;
  params.min_samples_split = config.tree_min_samples_split;
  params.split_on_zero_gain = true;
  TreeBuilder builder(X, columns, GiniCriterion{&y, classes}, params);
  Rng rng(seed);
  return builder.build(std::vector<double>(X.rows(), 1.0), rng);
}

struct Forest {
  std::size_t classes = 0;
  std::vector<Tree> trees;

  // Fraction of trees voting for each class.
  std::vector<double> vote_fractions(std::span<const double> row) const {
    std::vector<double> votes(classes, 0.0);
    for (const Tree& t : trees) votes[static_cast<std::size_t>(tree_vote(t, row))] += 1.0;
    for (double& v : votes) v /= static_cast<double>(trees.size());
    return votes;
  }

  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const Tree& t : trees) arr.push_back(t.to_json());
    return {{"classes", classes}, {"trees", arr}};
  }
  static Forest from_json(const nlohmann::json& j) {
    Forest f;
    f.classes = j.at("classes");
    for (const auto& t : j.at("trees")) f.trees.push_back(Tree::from_json(t));
    if (f.trees.empty()) throw ValidationError("forest state has no trees");
    return f;
  }
};

// Bootstrap rows per tree, floor(sqrt(m)) candidate features per node,
// unlimited depth.
inline Forest train_random_forest(const DenseMatrix& X, const ColumnIndex& columns, const std::vector<int>& y,
                                  std::size_t classes, const TrainConfig& config, std::uint64_t seed) {
  TreeParams params;
  params.max_depth = config.tree_max_depth;
  params.min_samples_split = config.tree_min_samples_split;
  params.max_features = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(X.cols()))));
  params.split_on_zero_gain = true;
  TreeBuilder builder(X, columns, GiniCriterion{&y, classes}, params);

  Forest forest;
  forest.classes = classes;
  Rng rng(seed);
  const std::size_t n = X.rows();
  for (int t = 0; t < config.forest_trees; ++t) {
    std::vector<double> weights(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) weights[uniform_index(rng, n)] += 1.0;
    forest.trees.push_back(builder.build(weights, rng));
  }
  return forest;
}

} // namespace moralframe::classifiers
