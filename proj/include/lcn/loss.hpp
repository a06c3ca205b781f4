#pragma once

#include <string>

#include <Eigen/Dense>

#include "lcn/errors.hpp"

namespace lcn {

enum class LossKind { Square, Lp, PseudoHuber, GeneralizedHuber, LogCosh };

// Loss family plus parameters, validated at construction:
// Lp needs even p >= 2, PseudoHuber delta > 0, GeneralizedHuber alpha > 0
// and beta > -2, LogCosh alpha > 0.
class LossSpec {
 public:
  static LossSpec square();
  static LossSpec lp(int p);
  static LossSpec pseudo_huber(double delta);
  static LossSpec generalized_huber(double alpha, double beta);
  static LossSpec log_cosh(double alpha);

  LossKind kind() const { return kind_; }
  int p() const { return p_; }
  double delta() const { return delta_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  std::string name() const;

 private:
  LossSpec() = default;
  LossKind kind_ = LossKind::Square;
  int p_ = 2;
  double delta_ = 1.0;
  double alpha_ = 1.0;
  double beta_ = 0.0;
};

// Scalar loss at a single residual t = z - y (one output component).
double loss_scalar(const LossSpec& spec, double t);

double loss_value(const LossSpec& spec, const Eigen::VectorXd& z,
                  const Eigen::VectorXd& y);

// Componentwise derivative with respect to z.
Eigen::VectorXd loss_grad(const LossSpec& spec, const Eigen::VectorXd& z,
                          const Eigen::VectorXd& y);

// Monotone h with ||W X - Y||_1 <= h(sum_i loss(W x_i, y_i)).
double h_bound(const LossSpec& spec, double risk, int d_N, int m);

}  // namespace lcn
