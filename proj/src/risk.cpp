#include "lcn/risk.hpp"

namespace lcn {

double empirical_risk(const LossSpec& spec, const Architecture& arch,
                      const FilterStack& w, const Dataset& data) {
  data.check_shape(arch);
  const Eigen::MatrixXd V = network_matrix(arch, w).dense();
  const Eigen::MatrixXd Z = V * data.X;
  double acc = 0.0;
  for (int i = 0; i < data.samples(); ++i)
    acc += loss_value(spec, Z.col(i), data.Y.col(i));
  return acc;
}

FilterStack risk_grad(const LossSpec& spec, const Architecture& arch,
                      const FilterStack& w, const Dataset& data) {
  data.check_shape(arch);
  w.check_shape(arch);
  const int N = arch.depth();

  std::vector<Eigen::MatrixXd> layer(N);
  for (int i = 1; i <= N; ++i)
    layer[i - 1] =
        to_matrix(w.filters[i - 1], arch.dims()[i - 1], arch.strides()[i - 1])
            .dense();

  // prefix[i] = W^(i-1)...W^(1) (identity for i = 1),
  // suffix[i] = W^(N)...W^(i+1) (identity for i = N).
  std::vector<Eigen::MatrixXd> prefix(N + 1), suffix(N + 1);
  prefix[1] = Eigen::MatrixXd::Identity(arch.dims()[0], arch.dims()[0]);
  for (int i = 2; i <= N; ++i) prefix[i] = layer[i - 2] * prefix[i - 1];
  suffix[N] = Eigen::MatrixXd::Identity(arch.dims()[N], arch.dims()[N]);
  for (int i = N - 1; i >= 1; --i) suffix[i] = suffix[i + 1] * layer[i];

  const Eigen::MatrixXd V = suffix[1] * layer[0] * prefix[1];
  const Eigen::MatrixXd Z = V * data.X;
  Eigen::MatrixXd Gz(arch.output_dim(), data.samples());
  for (int i = 0; i < data.samples(); ++i)
    Gz.col(i) = loss_grad(spec, Z.col(i), data.Y.col(i));
  const Eigen::MatrixXd G = Gz * data.X.transpose();  // d_N x d_0

  FilterStack grad;
  for (int i = 1; i <= N; ++i) {
    const Eigen::MatrixXd M =
        suffix[i].transpose() * G * prefix[i].transpose();  // d_i x d_{i-1}
    const int s = arch.strides()[i - 1];
    const int k = arch.widths()[i - 1];
    Eigen::VectorXd gi = Eigen::VectorXd::Zero(k);
    for (int r = 0; r < arch.dims()[i]; ++r)
      for (int j = 0; j < k; ++j) gi(j) += M(r, r * s + j);
    grad.filters.push_back(std::move(gi));
  }
  return grad;
}

}  // namespace lcn
