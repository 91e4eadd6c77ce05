#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance binary.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <moralframe/classifiers/linear.hpp>
#include <moralframe/features/matrix.hpp>
#include <moralframe/random.hpp>

namespace oracles {

struct Labeled {
  moralframe::FeatureMatrix X;
  std::vector<std::string> y;
};

// K Gaussian blobs in m dimensions, centres `separation` apart on the axes.
inline Labeled blobs(moralframe::Rng& rng, std::size_t n, std::size_t m, std::size_t K, double separation) {
  using namespace moralframe;
  DenseMatrix v(n, m);
  std::vector<std::string> y;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % K;
    for (std::size_t f = 0; f < m; ++f) v(i, f) = standard_normal(rng) + (f % K == c ? separation : 0.0);
    y.push_back("c" + std::to_string(c));
  }
  return {fuse_features({{"x", v, {}}}), y};
}

// Largest relative error between the analytic logistic gradient and central
// finite differences of the loss, on one random instance.
inline double logistic_gradient_error(moralframe::Rng& rng, std::size_t n = 20, std::size_t m = 10, std::size_t K = 3) {
  using namespace moralframe;
  using namespace moralframe::classifiers;
  DenseMatrix X(n, m);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < m; ++f) X(i, f) = uniform01(rng) < 0.3 ? 0.0 : standard_normal(rng);
    y[i] = static_cast<int>(uniform_index(rng, K));
  }
  const CsrRows csr = to_csr(X);
  LinearWeights w(K, m);
  for (double& v : w.weights) v = standard_normal(rng);
  for (double& v : w.bias) v = standard_normal(rng);
  const double l2 = 0.01;
  const LogisticGradient g = logistic_loss_and_gradient(w, csr, y, l2);

  const double h = 1e-5;
  double worst = 0.0;
  auto check = [&](double& param, double analytic) {
    const double saved = param;
    param = saved + h;
    const double up = logistic_loss_and_gradient(w, csr, y, l2).loss;
    param = saved - h;
    const double down = logistic_loss_and_gradient(w, csr, y, l2).loss;
    param = saved;
    const double numeric = (up - down) / (2 * h);
    const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(analytic - numeric) / scale);
  };
  for (std::size_t k = 0; k < w.weights.size(); ++k) check(w.weights[k], g.d_weights[k]);
  for (std::size_t c = 0; c < K; ++c) check(w.bias[c], g.d_bias[c]);
  return worst;
}

// Pearson correlation of two columns via the covariance formula.
inline double pearson(const moralframe::DenseMatrix& x, std::size_t a, std::size_t b) {
  const std::size_t n = x.rows();
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < n; ++i) ma += x(i, a), mb += x(i, b);
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    cov += (x(i, a) - ma) * (x(i, b) - mb);
    va += (x(i, a) - ma) * (x(i, a) - ma);
    vb += (x(i, b) - mb) * (x(i, b) - mb);
  }
  return cov / std::sqrt(va * vb);
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending.
inline std::vector<double> jacobi_eigenvalues(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

} // namespace oracles
