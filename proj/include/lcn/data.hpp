#pragma once

#include <Eigen/Dense>

#include "lcn/architecture.hpp"
#include "lcn/loss.hpp"

namespace lcn {

// Training data: inputs X (d0 x m) and labels Y (dN x m), column per sample.
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::MatrixXd Y;

  int samples() const { return static_cast<int>(X.cols()); }

  void check_shape(const Architecture& arch) const;
};

// Entrywise matrix 1-norm (sum of absolute values).
double entrywise_norm1(const Eigen::MatrixXd& a);

// True when the smallest singular value of X exceeds 1e-10 * ||X||_2,
// i.e. X X^T is safely invertible.
bool has_full_rank(const Eigen::MatrixXd& X);

// The a-priori final-filter bound
//   g(L) = (1/d_N) (h(L) + ||Y||_1) ||X^T (X X^T)^{-1}||_1,
// guaranteeing ||pi(w)||_1 <= g(L(w)). Throws RankDeficientInput when
// X X^T is not safely invertible.
double g_bound(const LossSpec& spec, const Dataset& data, double risk);

}  // namespace lcn
