#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include <json.hpp>

#include "common.hpp"

namespace moralframe::classifiers {

// Stores the training rows; neighbors ordered by (distance, row index).
struct Knn {
  std::size_t classes = 0;
  int k = 5;
  DenseMatrix rows;
  std::vector<int> labels;

  std::vector<std::size_t> neighbors(std::span<const double> row) const {
    std::vector<double> dist(rows.rows());
    for (std::size_t i = 0; i < rows.rows(); ++i) {
      const auto r = rows.row(i);
      double s = 0.0;
      for (std::size_t f = 0; f < r.size(); ++f) {
        const double d = r[f] - row[f];
        s += d * d;
      }
      dist[i] = s;
    }
    std::vector<std::size_t> order(rows.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(kk), order.end(),
                      [&](std::size_t a, std::size_t b) { return dist[a] != dist[b] ? dist[a] < dist[b] : a < b; });
    order.resize(kk);
    return order;
  }

  // Vote fractions; argmax takes the smallest label index on ties.
  std::vector<double> vote_fractions(std::span<const double> row) const {
    const auto nn = neighbors(row);
    std::vector<double> votes(classes, 0.0);
    for (std::size_t i : nn) votes[static_cast<std::size_t>(labels[i])] += 1.0;
    for (double& v : votes) v /= static_cast<double>(nn.size());
    return votes;
  }

  nlohmann::json to_json() const {
    return {{"classes", classes}, {"k", k}, {"cols", rows.cols()}, {"rows", rows.data()}, {"labels", labels}};
  }
  static Knn from_json(const nlohmann::json& j) {
    Knn m;
    m.classes = j.at("classes");
    m.k = j.at("k");
    m.labels = j.at("labels").get<std::vector<int>>();
    const std::size_t cols = j.at("cols");
    const auto data = j.at("rows").get<std::vector<double>>();
    if (m.k < 1 || data.size() != m.labels.size() * cols) throw ValidationError("knn state has inconsistent sizes");
    m.rows = DenseMatrix(m.labels.size(), cols);
    for (std::size_t i = 0; i < m.labels.size(); ++i)
      std::copy(data.begin() + static_cast<std::ptrdiff_t>(i * cols), data.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols),
                m.rows.row(i).begin());
    return m;
  }
};

inline Knn train_knn(const DenseMatrix& X, const std::vector<int>& y, std::size_t classes, const TrainConfig& config) {
  if (config.knn_k < 1) throw ValidationError("knn_k must be at least 1");
  return Knn{classes, config.knn_k, X, y};
}

} // namespace moralframe::classifiers
