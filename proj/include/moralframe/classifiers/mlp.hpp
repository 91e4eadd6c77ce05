#pragma once

// One hidden layer of rectified units, softmax output, Adam on mini-batches.
// The first layer is stored feature-major (m x H) so a sparse input row only
// touches the weights of its active features.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <json.hpp>

#include "../random.hpp"
#include "common.hpp"

namespace moralframe::classifiers {

struct Mlp {
  std::size_t inputs = 0, hidden = 0, classes = 0;
  std::vector<double> w1;  // inputs x hidden
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // hidden x classes
  std::vector<double> b2;  // classes

  std::vector<double> hidden_activations(std::span<const double> row) const {
    std::vector<double> h(b1);
    for (std::size_t f = 0; f < inputs; ++f) {
      if (row[f] == 0.0) continue;
      const double* w = w1.data() + f * hidden;
      for (std::size_t u = 0; u < hidden; ++u) h[u] += w[u] * row[f];
    }
    for (double& v : h) v = std::max(v, 0.0);
    return h;
  }

  std::vector<double> logits_from_hidden(const std::vector<double>& h) const {
    std::vector<double> z(b2);
    for (std::size_t u = 0; u < hidden; ++u) {
      if (h[u] == 0.0) continue;
      const double* w = w2.data() + u * classes;
      for (std::size_t c = 0; c < classes; ++c) z[c] += w[c] * h[u];
    }
    return z;
  }

  std::vector<double> probabilities(std::span<const double> row) const {
    std::vector<double> z = logits_from_hidden(hidden_activations(row));
    softmax_inplace(z);
    return z;
  }

  nlohmann::json to_json() const {
    return {{"inputs", inputs}, {"hidden", hidden}, {"classes", classes}, {"w1", w1}, {"b1", b1}, {"w2", w2}, {"b2", b2}};
  }
  static Mlp from_json(const nlohmann::json& j) {
    Mlp m;
    m.inputs = j.at("inputs");
    m.hidden = j.at("hidden");
    m.classes = j.at("classes");
    m.w1 = j.at("w1").get<std::vector<double>>();
    m.b1 = j.at("b1").get<std::vector<double>>();
    m.w2 = j.at("w2").get<std::vector<double>>();
    m.b2 = j.at("b2").get<std::vector<double>>();
    if (m.w1.size() != m.inputs * m.hidden || m.b1.size() != m.hidden || m.w2.size() != m.hidden * m.classes ||
        m.b2.size() != m.classes)
      throw ValidationError("mlp state has inconsistent sizes");
    return m;
  }
};

namespace detail {

struct Adam {
  double lr, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::vector<double> m, v;
  std::uint64_t t = 0;

  Adam(double learning_rate, std::size_t size) : lr(learning_rate), m(size, 0.0), v(size, 0.0) {}

  // Dense update; correction factors are shared by all parameter groups of
  // one step, so `t` is advanced by the caller.
  void step(std::vector<double>& params, const std::vector<double>& grad, std::uint64_t step_no) {
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step_no));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step_no));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
      v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
      params[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
    }
  }
};

} // namespace detail

inline Mlp train_mlp(const DenseMatrix& X, const CsrRows& csr, const std::vector<int>& y, std::size_t classes,
                     const TrainConfig& config, std::uint64_t seed) {
  const std::size_t n = X.rows(), m = X.cols(), H = static_cast<std::size_t>(config.mlp_hidden);
  Mlp net;
  net.inputs = m;
  net.hidden = H;
  net.classes = classes;
  Rng rng(seed);
  // He initialization for the rectified layer, Glorot for the output.
  const double s1 = std::sqrt(2.0 / static_cast<double>(std::max<std::size_t>(m, 1)));
  const double s2 = std::sqrt(2.0 / static_cast<double>(H + classes));
  net.w1.resize(m * H);
  for (double& w : net.w1) w = s1 * standard_normal(rng);
  net.b1.assign(H, 0.0);
  net.w2.resize(H * classes);
  for (double& w : net.w2) w = s2 * standard_normal(rng);
  net.b2.assign(classes, 0.0);

  detail::Adam a_w1(config.mlp_learning_rate, net.w1.size()), a_b1(config.mlp_learning_rate, H),
      a_w2(config.mlp_learning_rate, net.w2.size()), a_b2(config.mlp_learning_rate, classes);
  std::vector<double> g_w1(net.w1.size()), g_b1(H), g_w2(net.w2.size()), g_b2(classes);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t batch = static_cast<std::size_t>(std::max(config.mlp_batch, 1));
  std::uint64_t step_no = 0;

  for (int epoch = 0; epoch < config.mlp_epochs; ++epoch) {
    shuffle(order, rng);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(n, start + batch);
      const double inv_b = 1.0 / static_cast<double>(end - start);
      std::fill(g_w1.begin(), g_w1.end(), 0.0);
      std::fill(g_b1.begin(), g_b1.end(), 0.0);
      std::fill(g_w2.begin(), g_w2.end(), 0.0);
      std::fill(g_b2.begin(), g_b2.end(), 0.0);
      for (std::size_t b = start; b < end; ++b) {
        const std::size_t i = order[b];
        const std::vector<double> h = net.hidden_activations(X.row(i));
        std::vector<double> p = net.logits_from_hidden(h);
        softmax_inplace(p);
        p[static_cast<std::size_t>(y[i])] -= 1.0;
        std::vector<double> dh(H, 0.0);
        for (std::size_t u = 0; u < H; ++u) {
          double* gw = g_w2.data() + u * classes;
          const double* w = net.w2.data() + u * classes;
          for (std::size_t c = 0; c < classes; ++c) {
            gw[c] += h[u] * p[c] * inv_b;
            dh[u] += w[c] * p[c];
          }
          if (h[u] <= 0.0) dh[u] = 0.0;
        }
        for (std::size_t c = 0; c < classes; ++c) g_b2[c] += p[c] * inv_b;
        for (std::size_t u = 0; u < H; ++u) g_b1[u] += dh[u] * inv_b;
        for (std::size_t q = csr.offsets[i]; q < csr.offsets[i + 1]; ++q) {
          double* gw = g_w1.data() + static_cast<std::size_t>(csr.cols[q]) * H;
          const double x = csr.vals[q] * inv_b;
          for (std::size_t u = 0; u < H; ++u) gw[u] += dh[u] * x;
        }
      }
      ++step_no;
      a_w1.step(net.w1, g_w1, step_no);
      a_b1.step(net.b1, g_b1, step_no);
      a_w2.step(net.w2, g_w2, step_no);
      a_b2.step(net.b2, g_b2, step_no);
    }
  }
  return net;
}

} // namespace moralframe::classifiers
