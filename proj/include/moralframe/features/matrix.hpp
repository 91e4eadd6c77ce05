#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "../error.hpp"

namespace moralframe {

// Row-major dense matrix of doubles.
class DenseMatrix {
public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    DenseMatrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cols) throw ValidationError("ragged rows");
      std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  const std::vector<double>& data() const noexcept { return data_; }

  DenseMatrix select_rows(const std::vector<std::size_t>& idx) const {
    DenseMatrix m(idx.size(), cols_);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const auto src = row(idx.at(i));
      std::copy(src.begin(), src.end(), m.row(i).begin());
    }
    return m;
  }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Column span [begin, end) owned by one named feature source.
struct ColumnBlock {
  std::string name;
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const ColumnBlock&, const ColumnBlock&) = default;
};

// One named feature source before fusion.
struct FeatureBlock {
  std::string name;
  DenseMatrix values;
  std::vector<std::string> column_names;
};

struct FeatureMatrix {
  DenseMatrix values;
  std::vector<ColumnBlock> blocks;
  std::vector<std::string> column_names;

  std::size_t rows() const noexcept { return values.rows(); }
  std::size_t cols() const noexcept { return values.cols(); }

  FeatureMatrix select_rows(const std::vector<std::size_t>& idx) const {
    return {values.select_rows(idx), blocks, column_names};
  }
};

// Horizontal concatenation, blocks in the given order. Values are copied
// unscaled.
inline FeatureMatrix fuse_features(const std::vector<FeatureBlock>& blocks) {
  if (blocks.empty()) throw ValidationError("nothing to fuse");
  const std::size_t n = blocks.front().values.rows();
  std::size_t width = 0;
  for (const FeatureBlock& b : blocks) {
    if (b.values.rows() != n)
      throw ValidationError("block \"" + b.name + "\" has " + std::to_string(b.values.rows()) + " rows, expected " +
                            std::to_string(n));
    if (!b.column_names.empty() && b.column_names.size() != b.values.cols())
      throw ValidationError("block \"" + b.name + "\" column names do not match its width");
    width += b.values.cols();
  }
  FeatureMatrix out{DenseMatrix(n, width), {}, {}};
  out.column_names.reserve(width);
  std::size_t offset = 0;
  for (const FeatureBlock& b : blocks) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto src = b.values.row(i);
      std::copy(src.begin(), src.end(), out.values.row(i).begin() + static_cast<std::ptrdiff_t>(offset));
    }
    for (std::size_t c = 0; c < b.values.cols(); ++c)
      out.column_names.push_back(b.column_names.empty() ? b.name + ":" + std::to_string(c) : b.column_names[c]);
    out.blocks.push_back({b.name, offset, offset + b.values.cols()});
    offset += b.values.cols();
  }
  return out;
}

// {"id": ..., "<block name>": [values...], ...} per row.
inline std::string feature_matrix_jsonl(const FeatureMatrix& m, const std::vector<std::string>& ids) {
  if (ids.size() != m.rows()) throw ValidationError("id count does not match matrix rows");
  std::string out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    nlohmann::ordered_json j;
    j["id"] = ids[i];
    for (const ColumnBlock& b : m.blocks) {
      std::vector<double> vals(m.values.row(i).begin() + static_cast<std::ptrdiff_t>(b.begin),
                               m.values.row(i).begin() + static_cast<std::ptrdiff_t>(b.end));
      j[b.name] = vals;
    }
    out += j.dump();
    out += '\n';
  }
  return out;
}

} // namespace moralframe
