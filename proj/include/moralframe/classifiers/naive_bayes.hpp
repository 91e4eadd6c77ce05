#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include <json.hpp>

#include "common.hpp"

namespace moralframe::classifiers {

// Gaussian naive Bayes: per class, per feature mean and variance.
struct NaiveBayes {
  std::size_t classes = 0, features = 0;
  std::vector<double> log_prior;  // classes
  std::vector<double> mean;       // classes x features
  std::vector<double> var;        // classes x features

  std::vector<double> log_joint(std::span<const double> row) const {
    std::vector<double> out(log_prior);
    for (std::size_t c = 0; c < classes; ++c) {
      double s = 0.0;
      for (std::size_t f = 0; f < features; ++f) {
        const double v = var[c * features + f];
        const double d = row[f] - mean[c * features + f];
        s -= 0.5 * (std::log(2.0 * std::numbers::pi * v) + d * d / v);
      }
      out[c] += s;
    }
    return out;
  }

  std::vector<double> probabilities(std::span<const double> row) const {
    std::vector<double> z = log_joint(row);
    softmax_inplace(z);
    return z;
  }

  nlohmann::json to_json() const {
    return {{"classes", classes}, {"features", features}, {"log_prior", log_prior}, {"mean", mean}, {"var", var}};
  }
  static NaiveBayes from_json(const nlohmann::json& j) {
    NaiveBayes nb;
    nb.classes = j.at("classes");
    nb.features = j.at("features");
    nb.log_prior = j.at("log_prior").get<std::vector<double>>();
    nb.mean = j.at("mean").get<std::vector<double>>();
    nb.var = j.at("var").get<std::vector<double>>();
    if (nb.log_prior.size() != nb.classes || nb.mean.size() != nb.classes * nb.features || nb.var.size() != nb.mean.size())
      throw ValidationError("naive Bayes state has inconsistent sizes");
    return nb;
  }
};

inline NaiveBayes train_naive_bayes(const DenseMatrix& X, const std::vector<int>& y, std::size_t classes,
                                    const TrainConfig& config) {
  const std::size_t n = X.rows(), m = X.cols();
  NaiveBayes nb;
  nb.classes = classes;
  nb.features = m;
  nb.mean.assign(classes * m, 0.0);
  nb.var.assign(classes * m, 0.0);
  std::vector<double> count(classes, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(y[i]);
    count[c] += 1.0;
    const auto row = X.row(i);
    for (std::size_t f = 0; f < m; ++f) nb.mean[c * m + f] += row[f];
  }
  for (std::size_t c = 0; c < classes; ++c)
    for (std::size_t f = 0; f < m; ++f) nb.mean[c * m + f] /= std::max(count[c], 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(y[i]);
    const auto row = X.row(i);
    for (std::size_t f = 0; f < m; ++f) {
      const double d = row[f] - nb.mean[c * m + f];
      nb.var[c * m + f] += d * d;
    }
  }
  for (std::size_t c = 0; c < classes; ++c)
    for (std::size_t f = 0; f < m; ++f)
      nb.var[c * m + f] = std::max(nb.var[c * m + f] / std::max(count[c], 1.0), config.nb_variance_floor);
  nb.log_prior.resize(classes);
  for (std::size_t c = 0; c < classes; ++c)
    nb.log_prior[c] = std::log(std::max(count[c], 1e-300) / static_cast<double>(n));
  return nb;
}

} // namespace moralframe::classifiers
