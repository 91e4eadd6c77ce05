#pragma once

// Principal-components projection onto two axes.

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "../error.hpp"
#include "../features/matrix.hpp"
#include "../io.hpp"

namespace moralframe {

struct Projection2d {
  DenseMatrix coordinates;          // n x 2, column-centered
  double variance_captured = 0.0;   // sum of the top two covariance eigenvalues
  double total_variance = 0.0;

  std::string to_csv(const std::vector<std::string>& ids, const std::vector<std::string>& labels = {}) const {
    if (ids.size() != coordinates.rows() || (!labels.empty() && labels.size() != coordinates.rows()))
      throw ValidationError("id and label counts must match the projected rows");
    std::string out = labels.empty() ? "id,x,y\n" : "id,label,x,y\n";
    for (std::size_t i = 0; i < coordinates.rows(); ++i) {
      out += ids[i];
      if (!labels.empty()) out += "," + labels[i];
      out += "," + format_fixed(coordinates(i, 0), 9) + "," + format_fixed(coordinates(i, 1), 9) + '\n';
    }
    return out;
  }
};

// Covariance uses the n - 1 denominator. Each axis is signed so that its
// largest-magnitude loading is positive, which makes the output unique.
inline Projection2d project_2d(const DenseMatrix& x) {
  const std::size_t n = x.rows(), d = x.cols();
  if (n < 3) throw ValidationError("projection needs at least 3 rows, got " + std::to_string(n));
  if (d < 1) throw ValidationError("projection needs at least one column");

  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x(i, j);
  const Eigen::RowVectorXd mean = m.colwise().mean();
  m.rowwise() -= mean;
  const Eigen::MatrixXd cov = (m.transpose() * m) / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw Error("eigendecomposition did not converge");
  const Eigen::VectorXd& evals = solver.eigenvalues();  // ascending
  const Eigen::MatrixXd& evecs = solver.eigenvectors();

  Projection2d out{DenseMatrix(n, 2), 0.0, evals.sum()};
  for (int axis = 0; axis < 2; ++axis) {
    const Eigen::Index col = static_cast<Eigen::Index>(d) - 1 - axis;
    if (col < 0) break;  // a single column leaves the second axis at zero
    Eigen::VectorXd v = evecs.col(col);
    Eigen::Index big = 0;
    v.cwiseAbs().maxCoeff(&big);
    if (v(big) < 0) v = -v;
    const Eigen::VectorXd proj = m * v;
    for (std::size_t i = 0; i < n; ++i) out.coordinates(i, static_cast<std::size_t>(axis)) = proj(static_cast<Eigen::Index>(i));
    out.variance_captured += std::max(evals(col), 0.0);
  }
  return out;
}

} // namespace moralframe
