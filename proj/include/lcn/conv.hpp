#pragma once

#include <Eigen/Dense>

#include "lcn/architecture.hpp"

namespace lcn {

// A strided convolution W : R^cols -> R^rows stored in its structured
// (filter, stride) form; the dense matrix is derived on demand.
// Entry (j, j*stride + n) = filter[n], all others exactly zero.
struct ConvMatrix {
  Eigen::VectorXd filter;
  long stride = 1;
  int rows = 0;
  int cols = 0;

  Eigen::MatrixXd dense() const;
};

// Filter of the composed convolution, per the composition recursion.
struct FinalFilter {
  Eigen::VectorXd coeffs;  // length k_v
  long stride = 1;         // s_v
};

// Banded matrix of a single convolution layer; row j applies the filter
// starting at column j*stride (0-based).
ConvMatrix to_matrix(const Eigen::VectorXd& filter, int d_in, long stride);

// Final filter v of the composed network, via the recursion
// v_m = sum_{(n-1)*s~ + l = m} w^(N)_n * v~_l.
FinalFilter final_filter(const Architecture& arch, const FilterStack& w);

// The product W^(N)...W^(1) as a ConvMatrix with filter final_filter(arch, w)
// and stride s_v.
ConvMatrix network_matrix(const Architecture& arch, const FilterStack& w);

// Dense d_N x d_0 product matrix (left-multiplies inputs).
Eigen::MatrixXd network_dense(const Architecture& arch, const FilterStack& w);

}  // namespace lcn
