#pragma once

// Multiclass gradient boosting with a softmax objective: every round fits one
// regression tree per class to the Newton step of the cross-entropy.

#include <cmath>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "../random.hpp"
#include "common.hpp"
#include "tree.hpp"

namespace moralframe::classifiers {

struct BoostedTrees {
  std::size_t classes = 0;
  double learning_rate = 0.1;
  std::vector<double> base_score;  // per class, log prior
  std::vector<Tree> trees;         // round-major: trees[round * classes + k]

  std::vector<double> raw_scores(std::span<const double> row) const {
    std::vector<double> z(base_score);
    for (std::size_t t = 0; t < trees.size(); ++t) z[t % classes] += learning_rate * trees[t].leaf_for(row).value[0];
    return z;
  }

  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const Tree& t : trees) arr.push_back(t.to_json());
    return {{"classes", classes}, {"learning_rate", learning_rate}, {"base_score", base_score}, {"trees", arr}};
  }
  static BoostedTrees from_json(const nlohmann::json& j) {
    BoostedTrees b;
    b.classes = j.at("classes");
    b.learning_rate = j.at("learning_rate");
    b.base_score = j.at("base_score").get<std::vector<double>>();
    for (const auto& t : j.at("trees")) b.trees.push_back(Tree::from_json(t));
    if (b.base_score.size() != b.classes || (b.classes > 0 && b.trees.size() % b.classes != 0))
      throw ValidationError("boosted model state has inconsistent sizes");
    return b;
  }
};

inline double softmax_cross_entropy(const std::vector<double>& raw, const std::vector<int>& y, std::size_t classes) {
  const std::size_t n = y.size();
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* z = raw.data() + i * classes;
    const double mx = *std::max_element(z, z + classes);
    double sum = 0.0;
    for (std::size_t k = 0; k < classes; ++k) sum += std::exp(z[k] - mx);
    loss -= z[y[i]] - mx - std::log(sum);
  }
  return loss / static_cast<double>(n);
}

// loss_history receives the training loss before the first round and after
// every round.
inline BoostedTrees train_boosted_trees(const DenseMatrix& X, const ColumnIndex& columns, const std::vector<int>& y,
                                        std::size_t classes, const TrainConfig& config, std::uint64_t seed,
                                        std::vector<double>* loss_history = nullptr) {
  const std::size_t n = X.rows();
  BoostedTrees model;
  model.classes = classes;
  model.learning_rate = config.gbt_learning_rate;
  model.base_score.assign(classes, 0.0);
  {
    std::vector<double> counts(classes, 0.0);
    for (int label : y) counts[static_cast<std::size_t>(label)] += 1.0;
    for (std::size_t k = 0; k < classes; ++k)
      model.base_score[k] = std::log(std::max(counts[k], 1.0) / static_cast<double>(n));
  }

  std::vector<double> raw(n * classes);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < classes; ++k) raw[i * classes + k] = model.base_score[k];
  if (loss_history) loss_history->push_back(softmax_cross_entropy(raw, y, classes));

  TreeParams params;
  params.max_depth = config.gbt_max_depth;
  params.min_samples_split = 2.0;
  params.min_samples_leaf = 1.0;
  std::vector<double> grad(n), hess(n), prob(n * classes);
  const std::vector<double> ones(n, 1.0);
  Rng rng(seed);

  for (int round = 0; round < config.gbt_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> z(raw.begin() + static_cast<std::ptrdiff_t>(i * classes),
                            raw.begin() + static_cast<std::ptrdiff_t>((i + 1) * classes));
      softmax_inplace(z);
      std::copy(z.begin(), z.end(), prob.begin() + static_cast<std::ptrdiff_t>(i * classes));
    }
    for (std::size_t k = 0; k < classes; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        const double p = prob[i * classes + k];
        grad[i] = p - (y[i] == static_cast<int>(k) ? 1.0 : 0.0);
        hess[i] = std::max(p * (1.0 - p), 1e-16);
      }
      TreeBuilder builder(X, columns, NewtonCriterion{&grad, &hess, config.gbt_l2, config.gbt_min_child_hessian}, params);
      Tree tree = builder.build(ones, rng);
      for (std::size_t i = 0; i < n; ++i) raw[i * classes + k] += model.learning_rate * tree.leaf_for(X.row(i)).value[0];
      model.trees.push_back(std::move(tree));
    }
    if (loss_history) loss_history->push_back(softmax_cross_entropy(raw, y, classes));
  }
  return model;
}

} // namespace moralframe::classifiers
