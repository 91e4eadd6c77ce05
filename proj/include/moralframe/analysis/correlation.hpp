#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "../error.hpp"
#include "../features/matrix.hpp"
#include "../io.hpp"

namespace moralframe {

struct CorrelationMatrix {
  std::vector<std::string> labels;
  DenseMatrix values;

  std::string to_csv() const {
    std::string out = "description";
    for (const auto& l : labels) out += "," + l;
    out += '\n';
    for (std::size_t i = 0; i < labels.size(); ++i) {
      out += labels[i];
      for (std::size_t j = 0; j < labels.size(); ++j) out += "," + format_fixed(values(i, j), 9);
      out += '\n';
    }
    return out;
  }

  nlohmann::ordered_json to_json() const {
    std::vector<std::vector<double>> rows(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) rows[i].assign(values.row(i).begin(), values.row(i).end());
    return {{"labels", labels}, {"values", rows}};
  }
};

// Sample Pearson correlation of every column pair. A zero-variance column
// correlates 0 with every other column and 1 with itself.
inline CorrelationMatrix pearson_matrix(const DenseMatrix& x, std::vector<std::string> labels = {}) {
  const std::size_t n = x.rows(), d = x.cols();
  if (n < 2) throw ValidationError("correlation needs at least 2 rows, got " + std::to_string(n));
  if (labels.empty())
    for (std::size_t j = 0; j < d; ++j) labels.push_back("c" + std::to_string(j));
  if (labels.size() != d) throw ValidationError("label count does not match column count");

  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) mean[j] += x(i, j);
  for (double& m : mean) m /= static_cast<double>(n);

  DenseMatrix cov(d, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < d; ++a) {
      const double da = x(i, a) - mean[a];
      for (std::size_t b = a; b < d; ++b) cov(a, b) += da * (x(i, b) - mean[b]);
    }

  CorrelationMatrix out{std::move(labels), DenseMatrix(d, d)};
  for (std::size_t a = 0; a < d; ++a) {
    out.values(a, a) = 1.0;
    for (std::size_t b = a + 1; b < d; ++b) {
      double r = 0.0;
      if (cov(a, a) > 0.0 && cov(b, b) > 0.0) r = std::clamp(cov(a, b) / std::sqrt(cov(a, a) * cov(b, b)), -1.0, 1.0);
      out.values(a, b) = out.values(b, a) = r;
    }
  }
  return out;
}

} // namespace moralframe
