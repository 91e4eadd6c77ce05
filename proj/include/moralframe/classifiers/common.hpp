#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "../error.hpp"
#include "../features/matrix.hpp"

namespace moralframe::classifiers {

enum class ModelKind {
  logistic_regression,
  linear_svm,
  random_forest,
  decision_tree,
  gradient_boosted_trees,
  mlp,
  naive_bayes,
  knn,
};

inline constexpr std::array<ModelKind, 8> all_kinds{
    ModelKind::logistic_regression,    ModelKind::linear_svm, ModelKind::random_forest, ModelKind::decision_tree,
    ModelKind::gradient_boosted_trees, ModelKind::mlp,        ModelKind::naive_bayes,   ModelKind::knn,
};

inline std::string_view to_string(ModelKind k) {
  switch (k) {
  case ModelKind::logistic_regression: return "logistic_regression";
  case ModelKind::linear_svm: return "linear_svm";
  case ModelKind::random_forest: return "random_forest";
  case ModelKind::decision_tree: return "decision_tree";
  case ModelKind::gradient_boosted_trees: return "gradient_boosted_trees";
  case ModelKind::mlp: return "mlp";
  case ModelKind::naive_bayes: return "naive_bayes";
  case ModelKind::knn: return "knn";
  }
  return "?";
}

inline ModelKind parse_kind(std::string_view name) {
  for (ModelKind k : all_kinds)
    if (to_string(k) == name) return k;
  throw ValidationError("unknown model kind \"" + std::string(name) + "\"");
}

// Hyperparameters for every kind. Defaults are the documented ones.
struct TrainConfig {
  // logistic regression: full-batch gradient descent
  double lr_learning_rate = 0.1;
  int lr_epochs = 500;
  double lr_l2 = 1e-4;
  // linear SVM: one-vs-rest hinge loss, stochastic subgradient
  int svm_epochs = 200;
  double svm_learning_rate = 0.1;
  double svm_l2 = 1e-4;
  // decision tree (CART, Gini)
  int tree_max_depth = -1;  // unlimited
  int tree_min_samples_split = 2;
  // random forest
  int forest_trees = 100;
  // gradient-boosted trees, softmax objective
  int gbt_rounds = 200;
  int gbt_max_depth = 6;
  double gbt_learning_rate = 0.1;
  double gbt_l2 = 1.0;
  double gbt_min_child_hessian = 1e-3;
  // MLP
  int mlp_hidden = 64;
  int mlp_epochs = 300;
  int mlp_batch = 32;
  double mlp_learning_rate = 1e-3;
  // naive Bayes
  double nb_variance_floor = 1e-9;
  // KNN
  int knn_k = 5;
};

inline nlohmann::ordered_json to_json(const TrainConfig& c) {
  return {{"lr_learning_rate", c.lr_learning_rate},
          {"lr_epochs", c.lr_epochs},
          {"lr_l2", c.lr_l2},
          {"svm_epochs", c.svm_epochs},
          {"svm_learning_rate", c.svm_learning_rate},
          {"svm_l2", c.svm_l2},
          {"tree_max_depth", c.tree_max_depth},
          {"tree_min_samples_split", c.tree_min_samples_split},
          {"forest_trees", c.forest_trees},
          {"gbt_rounds", c.gbt_rounds},
          {"gbt_max_depth", c.gbt_max_depth},
          {"gbt_learning_rate", c.gbt_learning_rate},
          {"gbt_l2", c.gbt_l2},
          {"gbt_min_child_hessian", c.gbt_min_child_hessian},
          {"mlp_hidden", c.mlp_hidden},
          {"mlp_epochs", c.mlp_epochs},
          {"mlp_batch", c.mlp_batch},
          {"mlp_learning_rate", c.mlp_learning_rate},
          {"nb_variance_floor", c.nb_variance_floor},
          {"knn_k", c.knn_k}};
}

// Unknown keys are rejected; missing keys keep their defaults.
inline TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  nlohmann::json merged = to_json(c);
  if (!j.is_object()) throw ValidationError("hyperparameters must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!merged.contains(it.key())) throw ValidationError("unknown hyperparameter \"" + it.key() + "\"");
    if (!it.value().is_number()) throw ValidationError("hyperparameter \"" + it.key() + "\" must be a number");
    merged[it.key()] = it.value();
  }
  c.lr_learning_rate = merged["lr_learning_rate"];
  c.lr_epochs = merged["lr_epochs"];
  c.lr_l2 = merged["lr_l2"];
  c.svm_epochs = merged["svm_epochs"];
  c.svm_learning_rate = merged["svm_learning_rate"];
  c.svm_l2 = merged["svm_l2"];
  c.tree_max_depth = merged["tree_max_depth"];
  c.tree_min_samples_split = merged["tree_min_samples_split"];
  c.forest_trees = merged["forest_trees"];
  c.gbt_rounds = merged["gbt_rounds"];
  c.gbt_max_depth = merged["gbt_max_depth"];
  c.gbt_learning_rate = merged["gbt_learning_rate"];
  c.gbt_l2 = merged["gbt_l2"];
  c.gbt_min_child_hessian = merged["gbt_min_child_hessian"];
  c.mlp_hidden = merged["mlp_hidden"];
  c.mlp_epochs = merged["mlp_epochs"];
  c.mlp_batch = merged["mlp_batch"];
  c.mlp_learning_rate = merged["mlp_learning_rate"];
  c.nb_variance_floor = merged["nb_variance_floor"];
  c.knn_k = merged["knn_k"];
  return c;
}

// Sorted distinct class names and each label's position among them.
struct EncodedLabels {
  std::vector<std::string> class_names;
  std::vector<int> y;
};

inline EncodedLabels encode_labels(const std::vector<std::string>& labels) {
  EncodedLabels e;
  std::map<std::string, int> index;
  for (const auto& l : labels) index.emplace(l, 0);
  for (auto& [name, pos] : index) {
    pos = static_cast<int>(e.class_names.size());
    e.class_names.push_back(name);
  }
  e.y.reserve(labels.size());
  for (const auto& l : labels) e.y.push_back(index.at(l));
  return e;
}

// Nonzero entries per row, for the learners that only touch active features.
struct CsrRows {
  std::vector<std::size_t> offsets{0};
  std::vector<std::uint32_t> cols;
  std::vector<double> vals;

  std::size_t rows() const noexcept { return offsets.size() - 1; }
};

inline CsrRows to_csr(const DenseMatrix& m) {
  CsrRows csr;
  csr.offsets.reserve(m.rows() + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto row = m.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] != 0.0) {
        csr.cols.push_back(static_cast<std::uint32_t>(j));
        csr.vals.push_back(row[j]);
      }
    }
    csr.offsets.push_back(csr.cols.size());
  }
  return csr;
}

inline void softmax_inplace(std::vector<double>& z) {
  if (z.empty()) return;
  const double mx = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : z) v /= sum;
}

// First index of the maximum.
inline int argmax(const std::vector<double>& v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

inline void require_finite(const DenseMatrix& X) {
  for (double v : X.data())
    if (!std::isfinite(v)) throw ValidationError("feature matrix contains a non-finite value");
}

} // namespace moralframe::classifiers
