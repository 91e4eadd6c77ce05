#pragma once

// Level-wise binary tree growth shared by CART, random forests and gradient
// boosting.
//
// Every feature keeps its nonzero entries presorted by value (ColumnIndex).
// Zeros are never stored: their statistics are the node total minus the
// nonzero part, inserted into the scan at value 0. A level is grown by one
// pass over each feature's entries that updates every open node at once, so
// the cost of a level is proportional to the number of nonzeros, not to
// nodes x rows x features. Rows go left when value <= threshold.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "../random.hpp"
#include "common.hpp"

namespace moralframe::classifiers {

class ColumnIndex {
public:
  explicit ColumnIndex(const DenseMatrix& X) : rows_(X.rows()), cols_(X.cols()), offsets_(X.cols() + 1, 0) {
    for (std::size_t i = 0; i < X.rows(); ++i)
      for (std::size_t f = 0; f < X.cols(); ++f)
        if (X(i, f) != 0.0) ++offsets_[f + 1];
    for (std::size_t f = 0; f < cols_; ++f) offsets_[f + 1] += offsets_[f];
    values_.resize(offsets_.back());
    row_ids_.resize(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t i = 0; i < X.rows(); ++i)
      for (std::size_t f = 0; f < X.cols(); ++f)
        if (X(i, f) != 0.0) {
          values_[fill[f]] = X(i, f);
          row_ids_[fill[f]++] = static_cast<std::uint32_t>(i);
        }
    std::vector<std::pair<double, std::uint32_t>> tmp;
    for (std::size_t f = 0; f < cols_; ++f) {
      tmp.clear();
      for (std::size_t p = offsets_[f]; p < offsets_[f + 1]; ++p) tmp.emplace_back(values_[p], row_ids_[p]);
      std::sort(tmp.begin(), tmp.end());
      for (std::size_t p = offsets_[f], k = 0; p < offsets_[f + 1]; ++p, ++k) {
        values_[p] = tmp[k].first;
        row_ids_[p] = tmp[k].second;
      }
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<const double> values(std::size_t f) const { return {values_.data() + offsets_[f], offsets_[f + 1] - offsets_[f]}; }
  std::span<const std::uint32_t> row_ids(std::size_t f) const {
    return {row_ids_.data() + offsets_[f], offsets_[f + 1] - offsets_[f]};
  }

private:
  std::size_t rows_, cols_;
  std::vector<std::size_t> offsets_;
  std::vector<double> values_;
  std::vector<std::uint32_t> row_ids_;
};

struct TreeNode {
  int feature = -1;  // -1 for a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double gain = 0.0;
  std::vector<double> value;  // leaf payload: class distribution or a single score
};

struct Tree {
  std::vector<TreeNode> nodes;

  const TreeNode& leaf_for(std::span<const double> row) const {
    std::size_t i = 0;
    while (nodes[i].feature >= 0) {
      const TreeNode& n = nodes[i];
      i = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return nodes[i];
  }

  std::size_t depth() const {
    std::vector<std::size_t> d(nodes.size(), 0);
    std::size_t best = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].feature < 0) continue;
      d[static_cast<std::size_t>(nodes[i].left)] = d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
      best = std::max(best, d[i] + 1);
    }
    return best;
  }

  void add_importance(std::vector<double>& importance) const {
    for (const TreeNode& n : nodes)
      if (n.feature >= 0) importance[static_cast<std::size_t>(n.feature)] += n.gain;
  }

  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const TreeNode& n : nodes)
      arr.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right},
                     {"gain", n.gain}, {"value", n.value}});
    return arr;
  }

  static Tree from_json(const nlohmann::json& arr) {
    Tree t;
    for (const auto& j : arr) {
      TreeNode n;
      n.feature = j.at("feature");
      n.threshold = j.at("threshold");
      n.left = j.at("left");
      n.right = j.at("right");
      n.gain = j.at("gain");
      n.value = j.at("value").get<std::vector<double>>();
      t.nodes.push_back(std::move(n));
    }
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
      const TreeNode& n = t.nodes[i];
      if (n.feature < 0) continue;
      if (n.left <= static_cast<int>(i) || n.right <= static_cast<int>(i) || n.left >= static_cast<int>(t.nodes.size()) ||
          n.right >= static_cast<int>(t.nodes.size()))
        throw ValidationError("tree state has invalid child links");
    }
    if (t.nodes.empty()) throw ValidationError("tree state has no nodes");
    return t;
  }
};

// Class-weight statistics; the split gain is the total Gini impurity decrease
//   sum_c L_c^2 / |L| + sum_c R_c^2 / |R| - sum_c P_c^2 / |P|.
struct GiniCriterion {
  const std::vector<int>* labels;
  std::size_t classes;

  std::size_t dim() const { return classes; }
  void add(double* s, std::size_t row, double w) const { s[(*labels)[row]] += w; }
  double weight(const double* s) const {
    double t = 0;
    for (std::size_t c = 0; c < classes; ++c) t += s[c];
    return t;
  }
  double score(const double* s) const {
    const double w = weight(s);
    if (w <= 0) return 0.0;
    double q = 0;
    for (std::size_t c = 0; c < classes; ++c) q += s[c] * s[c];
    return q / w;
  }
  bool pure(const double* s) const {
    int nonzero = 0;
    for (std::size_t c = 0; c < classes; ++c) nonzero += s[c] > 0 ? 1 : 0;
    return nonzero <= 1;
  }
  bool child_ok(const double*) const { return true; }
  std::vector<double> leaf(const double* s) const {
    const double w = weight(s);
    std::vector<double> p(s, s + classes);
    if (w > 0)
      for (double& v : p) v /= w;
    return p;
  }
};

// Second-order statistics (sum g, sum h, count); gain is
//   G_L^2/(H_L+l2) + G_R^2/(H_R+l2) - G^2/(H+l2), leaf value -G/(H+l2).
struct NewtonCriterion {
  const std::vector<double>* grad;
  const std::vector<double>* hess;
  double l2 = 1.0;
  double min_child_hessian = 0.0;

  std::size_t dim() const { return 3; }
  void add(double* s, std::size_t row, double w) const {
    s[0] += w * (*grad)[row];
    s[1] += w * (*hess)[row];
    s[2] += w;
  }
  double weight(const double* s) const { return s[2]; }
  double score(const double* s) const { return s[0] * s[0] / (s[1] + l2); }
  bool pure(const double*) const { return false; }
  bool child_ok(const double* s) const { return s[1] >= min_child_hessian; }
  std::vector<double> leaf(const double* s) const { return {-s[0] / (s[1] + l2)}; }
};

struct TreeParams {
  int max_depth = -1;              // -1: unlimited
  double min_samples_split = 2.0;  // in row weight
  double min_samples_leaf = 1.0;
  std::size_t max_features = 0;    // per-node candidate features, 0: all
  bool split_on_zero_gain = false; // let impure nodes split even when no split reduces impurity
};

template <typename Criterion>
class TreeBuilder {
public:
  TreeBuilder(const DenseMatrix& X, const ColumnIndex& columns, const Criterion& criterion, TreeParams params)
      : X_(X), columns_(columns), crit_(criterion), params_(params), dim_(criterion.dim()) {}

  // row_weight[i] == 0 excludes row i (e.g. out-of-bag rows).
  Tree build(const std::vector<double>& row_weight, Rng& rng) {
    const std::size_t n = X_.rows();
    node_of_.assign(n, -1);
    tree_ = Tree{};
    stats_.clear();
    row_count_.clear();
    depth_.clear();

    new_node(0);
    for (std::size_t i = 0; i < n; ++i) {
      if (row_weight[i] <= 0) continue;
      node_of_[i] = 0;
      crit_.add(stats_.data(), i, row_weight[i]);
      ++row_count_[0];
    }
    weights_ = &row_weight;

    std::vector<int> open{0};
    while (!open.empty()) {
      std::vector<int> splittable;
      for (int node : open) {
        if (can_split(node))
          splittable.push_back(node);
        else
          make_leaf(node);
      }
      if (splittable.empty()) break;
      find_splits(splittable, rng);

      std::vector<int> next;
      bool any_split = false;
      for (int node : splittable) {
        const Best b = best_[static_cast<std::size_t>(slot_of_[static_cast<std::size_t>(node)])];
        const bool accept = b.feature >= 0 && (b.gain > 1e-12 || (params_.split_on_zero_gain && b.gain >= -1e-12));
        if (!accept) {
          make_leaf(node);
          continue;
        }
        split_node(node, b);
        any_split = true;
        next.push_back(tree_.nodes[static_cast<std::size_t>(node)].left);
        next.push_back(tree_.nodes[static_cast<std::size_t>(node)].right);
      }
      if (any_split) reroute_rows();
      open = std::move(next);
    }
    return std::move(tree_);
  }

private:
  struct Best {
    int feature = -1;
    double threshold = 0.0;
    double gain = -std::numeric_limits<double>::infinity();
  };

  int new_node(std::size_t depth) {
    tree_.nodes.emplace_back();
    stats_.resize(stats_.size() + dim_, 0.0);
    row_count_.push_back(0);
    depth_.push_back(depth);
    return static_cast<int>(tree_.nodes.size() - 1);
  }

  const double* stats(int node) const { return stats_.data() + static_cast<std::size_t>(node) * dim_; }
  double* stats(int node) { return stats_.data() + static_cast<std::size_t>(node) * dim_; }

  bool can_split(int node) const {
    if (params_.max_depth >= 0 && depth_[static_cast<std::size_t>(node)] >= static_cast<std::size_t>(params_.max_depth))
      return false;
    if (crit_.weight(stats(node)) < params_.min_samples_split) return false;
    if (row_count_[static_cast<std::size_t>(node)] < 2) return false;
    return !crit_.pure(stats(node));
  }

  void make_leaf(int node) {
    TreeNode& n = tree_.nodes[static_cast<std::size_t>(node)];
    n.feature = -1;
    n.value = crit_.leaf(stats(node));
  }

  void find_splits(const std::vector<int>& nodes, Rng& rng) {
    const std::size_t m = columns_.cols();
    slot_of_.assign(tree_.nodes.size(), -1);
    best_.assign(nodes.size(), Best{});
    for (std::size_t s = 0; s < nodes.size(); ++s) slot_of_[static_cast<std::size_t>(nodes[s])] = static_cast<int>(s);

    // Candidate features per node.
    std::vector<std::vector<std::size_t>> tried(nodes.size());
    std::vector<std::vector<int>> nodes_for_feature(m);
    const bool subsample = params_.max_features > 0 && params_.max_features < m;
    for (std::size_t s = 0; s < nodes.size(); ++s) {
      if (subsample) {
        tried[s] = sample_without_replacement(rng, m, params_.max_features);
        std::sort(tried[s].begin(), tried[s].end());
      } else {
        tried[s].resize(m);
        for (std::size_t f = 0; f < m; ++f) tried[s][f] = f;
      }
      for (std::size_t f : tried[s]) nodes_for_feature[f].push_back(static_cast<int>(s));
    }
    for (std::size_t f = 0; f < m; ++f)
      if (!nodes_for_feature[f].empty()) scan_feature(f, nodes, nodes_for_feature[f]);

    if (!subsample) return;
    // A node whose sampled features admit no valid split falls back to the
    // rest of the features, like the usual "keep drawing" rule.
    for (auto& v : nodes_for_feature) v.clear();
    bool any = false;
    for (std::size_t s = 0; s < nodes.size(); ++s) {
      if (best_[s].feature >= 0) continue;
      std::vector<char> used(m, 0);
      for (std::size_t f : tried[s]) used[f] = 1;
      for (std::size_t f = 0; f < m; ++f)
        if (!used[f]) {
          nodes_for_feature[f].push_back(static_cast<int>(s));
          any = true;
        }
    }
    if (!any) return;
    for (std::size_t f = 0; f < m; ++f)
      if (!nodes_for_feature[f].empty()) scan_feature(f, nodes, nodes_for_feature[f]);
  }

  void consider(std::size_t slot, int node, std::size_t feature, double lo, double hi, const double* left) {
    const double* parent = stats(node);
    right_buf_.resize(dim_);
    for (std::size_t d = 0; d < dim_; ++d) right_buf_[d] = parent[d] - left[d];
    if (crit_.weight(left) < params_.min_samples_leaf || crit_.weight(right_buf_.data()) < params_.min_samples_leaf) return;
    if (!crit_.child_ok(left) || !crit_.child_ok(right_buf_.data())) return;
    const double gain = crit_.score(left) + crit_.score(right_buf_.data()) - crit_.score(parent);
    Best& b = best_[slot];
    if (gain > b.gain) {
      double thr = lo + (hi - lo) * 0.5;
      if (!(thr < hi)) thr = lo;
      b = Best{static_cast<int>(feature), thr, gain};
    }
  }

  void scan_feature(std::size_t f, const std::vector<int>& nodes, const std::vector<int>& slots) {
    // Local per-slot accumulators, indexed by the slot's position in `slots`.
    const std::size_t k = slots.size();
    local_of_.assign(nodes.size(), -1);
    for (std::size_t j = 0; j < k; ++j) local_of_[static_cast<std::size_t>(slots[j])] = static_cast<int>(j);
    nz_.assign(k * dim_, 0.0);
    left_.assign(k * dim_, 0.0);
    nz_rows_.assign(k, 0);
    last_.assign(k, 0.0);
    seen_.assign(k, 0);

    const auto values = columns_.values(f);
    const auto rows = columns_.row_ids(f);
    const std::vector<double>& w = *weights_;

    auto local_slot = [&](std::uint32_t row) -> int {
      const int node = node_of_[row];
      if (node < 0) return -1;
      const int slot = slot_of_[static_cast<std::size_t>(node)];
      return slot < 0 ? -1 : local_of_[static_cast<std::size_t>(slot)];
    };

    for (std::size_t p = 0; p < values.size(); ++p) {
      const int j = local_slot(rows[p]);
      if (j < 0) continue;
      crit_.add(nz_.data() + static_cast<std::size_t>(j) * dim_, rows[p], w[rows[p]]);
      ++nz_rows_[static_cast<std::size_t>(j)];
    }

    auto step = [&](std::size_t p) {
      const int j = local_slot(rows[p]);
      if (j < 0) return;
      const auto ju = static_cast<std::size_t>(j);
      const int node = nodes[static_cast<std::size_t>(slots[ju])];
      if (seen_[ju] && values[p] > last_[ju])
        consider(static_cast<std::size_t>(slots[ju]), node, f, last_[ju], values[p], left_.data() + ju * dim_);
      crit_.add(left_.data() + ju * dim_, rows[p], w[rows[p]]);
      last_[ju] = values[p];
      seen_[ju] = 1;
    };

    std::size_t p = 0;
    for (; p < values.size() && values[p] < 0.0; ++p) step(p);
    for (std::size_t j = 0; j < k; ++j) {
      const int node = nodes[static_cast<std::size_t>(slots[j])];
      if (row_count_[static_cast<std::size_t>(node)] == nz_rows_[j]) continue;  // no zeros in this node
      double* left = left_.data() + j * dim_;
      if (seen_[j]) consider(static_cast<std::size_t>(slots[j]), node, f, last_[j], 0.0, left);
      const double* parent = stats(node);
      const double* nz = nz_.data() + j * dim_;
      for (std::size_t d = 0; d < dim_; ++d) left[d] += parent[d] - nz[d];
      last_[j] = 0.0;
      seen_[j] = 1;
    }
    for (; p < values.size(); ++p) step(p);
  }

  void split_node(int node, const Best& b) {
    const std::size_t depth = depth_[static_cast<std::size_t>(node)] + 1;
    const int left = new_node(depth);
    const int right = new_node(depth);
    TreeNode& n = tree_.nodes[static_cast<std::size_t>(node)];
    n.feature = b.feature;
    n.threshold = b.threshold;
    n.gain = b.gain;
    n.left = left;
    n.right = right;
  }

  // Moves every row of a freshly split node into its child.
  void reroute_rows() {
    const std::vector<double>& w = *weights_;
    for (std::size_t i = 0; i < node_of_.size(); ++i) {
      if (node_of_[i] < 0) continue;
      const TreeNode& n = tree_.nodes[static_cast<std::size_t>(node_of_[i])];
      if (n.feature < 0) continue;  // leaf
      const int child = X_(i, static_cast<std::size_t>(n.feature)) <= n.threshold ? n.left : n.right;
      node_of_[i] = child;
      crit_.add(stats(child), i, w[i]);
      ++row_count_[static_cast<std::size_t>(child)];
    }
  }

  const DenseMatrix& X_;
  const ColumnIndex& columns_;
  Criterion crit_;
  TreeParams params_;
  std::size_t dim_;

  Tree tree_;
  const std::vector<double>* weights_ = nullptr;
  std::vector<int> node_of_;
  std::vector<double> stats_;
  std::vector<std::size_t> row_count_;
  std::vector<std::size_t> depth_;
  std::vector<int> slot_of_;
  std::vector<Best> best_;

  std::vector<int> local_of_;
  std::vector<double> nz_, left_, right_buf_, last_;
  std::vector<std::size_t> nz_rows_;
  std::vector<char> seen_;
};

} // namespace moralframe::classifiers
