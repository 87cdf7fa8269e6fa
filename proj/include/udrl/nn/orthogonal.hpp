#pragma once

#include <Eigen/Dense>

#include "udrl/error.hpp"
#include "udrl/rng.hpp"

namespace udrl::nn {

// Orthogonal initialization: QR of a Gaussian matrix with the sign of R's
// diagonal folded into Q, so the result is Haar distributed. Rows are
// orthonormal when rows <= cols, columns otherwise.
inline Eigen::MatrixXd orthogonal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng,
                                         double gain = 1.0) {
  if (rows <= 0 || cols <= 0) throw ConfigError("layer", "zero-sized weight matrix");
  const bool wide = rows < cols;
  const Eigen::Index m = wide ? cols : rows;
  const Eigen::Index n = wide ? rows : cols;

  Eigen::MatrixXd a(m, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < m; ++i) a(i, j) = rng.normal();

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m, n);
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);

  q *= gain;
  if (wide) return q.transpose();
  return q;
}

}  // namespace udrl::nn
