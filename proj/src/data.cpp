#include "lcn/data.hpp"

#include <Eigen/SVD>

namespace lcn {

void Dataset::check_shape(const Architecture& arch) const {
  if (X.cols() != Y.cols())
    fail(ErrorCode::DimensionMismatch, "X and Y must have equal column count");
  if (X.cols() < 1) fail(ErrorCode::DimensionMismatch, "need m >= 1 samples");
  if (X.rows() != arch.input_dim())
    fail(ErrorCode::DimensionMismatch, "X row count must equal d0");
  if (Y.rows() != arch.output_dim())
    fail(ErrorCode::DimensionMismatch, "Y row count must equal dN");
}

double entrywise_norm1(const Eigen::MatrixXd& a) {
  return a.cwiseAbs().sum();
}

bool has_full_rank(const Eigen::MatrixXd& X) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
  const auto& sv = svd.singularValues();
  if (sv.size() < X.rows()) return false;  // fewer columns than rows
  const double rank_tol = 1e-10 * sv(0);
  return sv(X.rows() - 1) > rank_tol;
}

double g_bound(const LossSpec& spec, const Dataset& data, double risk) {
  const Eigen::MatrixXd& X = data.X;
  if (!has_full_rank(X))
    fail(ErrorCode::RankDeficientInput,
         "X X^T is rank deficient; certificate unavailable");
  const int d_N = static_cast<int>(data.Y.rows());
  const int m = static_cast<int>(data.X.cols());
  const Eigen::MatrixXd gram = X * X.transpose();
  const Eigen::MatrixXd pinv = X.transpose() * gram.inverse();
  const double h = h_bound(spec, risk, d_N, m);
  return (h + entrywise_norm1(data.Y)) * entrywise_norm1(pinv) / d_N;
}

}  // namespace lcn
