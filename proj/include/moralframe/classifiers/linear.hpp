#pragma once

// Multinomial logistic regression and one-vs-rest linear SVM. Both keep a
// K x m weight matrix (row-major, one row per class) and a bias per class.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <json.hpp>

#include "../random.hpp"
#include "common.hpp"

namespace moralframe::classifiers {

struct LinearWeights {
  std::size_t classes = 0;
  std::size_t features = 0;
  std::vector<double> weights;  // classes x features
  std::vector<double> bias;     // classes

  LinearWeights() = default;
  LinearWeights(std::size_t k, std::size_t m) : classes(k), features(m), weights(k * m, 0.0), bias(k, 0.0) {}

  double weight(std::size_t c, std::size_t f) const { return weights[c * features + f]; }

  std::vector<double> logits(const CsrRows& X, std::size_t i) const {
    std::vector<double> z(bias);
    for (std::size_t p = X.offsets[i]; p < X.offsets[i + 1]; ++p) {
      const double x = X.vals[p];
      const std::size_t f = X.cols[p];
      for (std::size_t c = 0; c < classes; ++c) z[c] += weights[c * features + f] * x;
    }
    return z;
  }

  std::vector<double> logits(std::span<const double> row) const {
    std::vector<double> z(bias);
    for (std::size_t f = 0; f < features; ++f) {
      if (row[f] == 0.0) continue;
      for (std::size_t c = 0; c < classes; ++c) z[c] += weights[c * features + f] * row[f];
    }
    return z;
  }

  nlohmann::json to_json() const {
    return {{"classes", classes}, {"features", features}, {"weights", weights}, {"bias", bias}};
  }
  static LinearWeights from_json(const nlohmann::json& j) {
    LinearWeights w;
    w.classes = j.at("classes");
    w.features = j.at("features");
    w.weights = j.at("weights").get<std::vector<double>>();
    w.bias = j.at("bias").get<std::vector<double>>();
    if (w.weights.size() != w.classes * w.features || w.bias.size() != w.classes)
      throw ValidationError("linear model state has inconsistent sizes");
    return w;
  }
};

// ---------------------------------------------------------------------------
// Logistic regression

struct LogisticGradient {
  double loss = 0.0;
  std::vector<double> d_weights;
  std::vector<double> d_bias;
};

// Mean cross-entropy plus (l2 / 2) * ||W||^2; the bias is not penalized.
inline LogisticGradient logistic_loss_and_gradient(const LinearWeights& w, const CsrRows& X, const std::vector<int>& y,
                                                   double l2) {
  const std::size_t n = X.rows(), K = w.classes, m = w.features;
  LogisticGradient g{0.0, std::vector<double>(K * m, 0.0), std::vector<double>(K, 0.0)};
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> z = w.logits(X, i);
    const double mx = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - mx);
    const double log_norm = mx + std::log(sum);
    g.loss -= (z[static_cast<std::size_t>(y[i])] - log_norm) * inv_n;
    for (std::size_t c = 0; c < K; ++c) {
      const double resid = (std::exp(z[c] - log_norm) - (static_cast<int>(c) == y[i] ? 1.0 : 0.0)) * inv_n;
      g.d_bias[c] += resid;
      for (std::size_t p = X.offsets[i]; p < X.offsets[i + 1]; ++p) g.d_weights[c * m + X.cols[p]] += resid * X.vals[p];
    }
  }
  for (std::size_t k = 0; k < K * m; ++k) {
    g.loss += 0.5 * l2 * w.weights[k] * w.weights[k];
    g.d_weights[k] += l2 * w.weights[k];
  }
  return g;
}

inline LinearWeights train_logistic(const CsrRows& X, const std::vector<int>& y, std::size_t classes,
                                    std::size_t features, const TrainConfig& config,
                                    std::vector<double>* loss_history = nullptr) {
  LinearWeights w(classes, features);
  for (int epoch = 0; epoch < config.lr_epochs; ++epoch) {
    const LogisticGradient g = logistic_loss_and_gradient(w, X, y, config.lr_l2);
    if (loss_history) loss_history->push_back(g.loss);
    for (std::size_t k = 0; k < w.weights.size(); ++k) w.weights[k] -= config.lr_learning_rate * g.d_weights[k];
    for (std::size_t c = 0; c < classes; ++c) w.bias[c] -= config.lr_learning_rate * g.d_bias[c];
  }
  if (loss_history) loss_history->push_back(logistic_loss_and_gradient(w, X, y, config.lr_l2).loss);
  return w;
}

// ---------------------------------------------------------------------------
// Linear SVM, one-vs-rest hinge loss with L2 penalty. Step size
// eta_t = eta0 / (1 + eta0 * l2 * t). Each weight row is kept as scale * v
// so the shrink step costs O(1) instead of O(m).

inline LinearWeights train_linear_svm(const CsrRows& X, const std::vector<int>& y, std::size_t classes,
                                      std::size_t features, const TrainConfig& config, std::uint64_t seed) {
  LinearWeights w(classes, features);
  std::vector<double> scale(classes, 1.0);
  std::vector<std::size_t> order(X.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  const double eta0 = config.svm_learning_rate, lambda = config.svm_l2;
  std::uint64_t t = 0;

  auto renormalize = [&](std::size_t c) {
    for (std::size_t f = 0; f < features; ++f) w.weights[c * features + f] *= scale[c];
    scale[c] = 1.0;
  };

  for (int epoch = 0; epoch < config.svm_epochs; ++epoch) {
    shuffle(order, rng);
    for (std::size_t i : order) {
      const double eta = eta0 / (1.0 + eta0 * lambda * static_cast<double>(t++));
      for (std::size_t c = 0; c < classes; ++c) {
        const double target = static_cast<int>(c) == y[i] ? 1.0 : -1.0;
        double margin = w.bias[c];
        for (std::size_t p = X.offsets[i]; p < X.offsets[i + 1]; ++p)
          margin += scale[c] * w.weights[c * features + X.cols[p]] * X.vals[p];
        scale[c] *= (1.0 - eta * lambda);
        if (target * margin < 1.0) {
          const double step = eta * target / scale[c];
          for (std::size_t p = X.offsets[i]; p < X.offsets[i + 1]; ++p)
            w.weights[c * features + X.cols[p]] += step * X.vals[p];
          w.bias[c] += eta * target;
        }
        if (scale[c] < 1e-9) renormalize(c);
      }
    }
  }
  for (std::size_t c = 0; c < classes; ++c) renormalize(c);
  return w;
}

} // namespace moralframe::classifiers
