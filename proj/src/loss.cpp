#include "lcn/loss.hpp"

#include <cmath>

namespace lcn {

LossSpec LossSpec::square() {
  LossSpec s;
  s.kind_ = LossKind::Square;
  return s;
}

LossSpec LossSpec::lp(int p) {
  if (p < 2 || p % 2 != 0)
    fail(ErrorCode::InvalidLossSpec, "lp loss requires even p >= 2");
  LossSpec s;
  s.kind_ = LossKind::Lp;
  s.p_ = p;
  return s;
}

LossSpec LossSpec::pseudo_huber(double delta) {
  if (!(delta > 0.0))
    fail(ErrorCode::InvalidLossSpec, "pseudo-Huber requires delta > 0");
  LossSpec s;
  s.kind_ = LossKind::PseudoHuber;
  s.delta_ = delta;
  return s;
}

LossSpec LossSpec::generalized_huber(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > -2.0))
    fail(ErrorCode::InvalidLossSpec,
         "generalized Huber requires alpha > 0 and beta > -2");
  LossSpec s;
  s.kind_ = LossKind::GeneralizedHuber;
  s.alpha_ = alpha;
  s.beta_ = beta;
  return s;
}

LossSpec LossSpec::log_cosh(double alpha) {
  if (!(alpha > 0.0))
    fail(ErrorCode::InvalidLossSpec, "log-cosh requires alpha > 0");
  LossSpec s;
  s.kind_ = LossKind::LogCosh;
  s.alpha_ = alpha;
  return s;
}

std::string LossSpec::name() const {
  switch (kind_) {
    case LossKind::Square:
      return "square";
    case LossKind::Lp:
      return "lp_p" + std::to_string(p_);
    case LossKind::PseudoHuber:
      return "pseudo_huber";
    case LossKind::GeneralizedHuber:
      return "generalized_huber";
    case LossKind::LogCosh:
      return "log_cosh";
  }
  return "unknown";
}

namespace {

// log(e^a + e^-a + beta), stable for large |a|.
double log_sum_gh(double a, double beta) {
  const double aa = std::abs(a);
  if (aa > 30.0)
    return aa + std::log1p(std::exp(-2.0 * aa) + beta * std::exp(-aa));
  return std::log(std::exp(a) + std::exp(-a) + beta);
}

double log_cosh_stable(double a) {
  const double aa = std::abs(a);
  if (aa > 30.0) return aa + std::log1p(std::exp(-2.0 * aa)) - std::log(2.0);
  return std::log(std::cosh(a));
}

}  // namespace

double loss_scalar(const LossSpec& spec, double t) {
  switch (spec.kind()) {
    case LossKind::Square:
      return t * t;
    case LossKind::Lp:
      return std::pow(std::abs(t), spec.p()) / spec.p();
    case LossKind::PseudoHuber: {
      const double d = spec.delta();
      return d * std::sqrt(1.0 + t * t / (d * d));
    }
    case LossKind::GeneralizedHuber:
      return log_sum_gh(spec.alpha() * t, spec.beta()) / spec.alpha();
    case LossKind::LogCosh:
      return log_cosh_stable(spec.alpha() * t) / spec.alpha();
  }
  return 0.0;
}

double loss_value(const LossSpec& spec, const Eigen::VectorXd& z,
                  const Eigen::VectorXd& y) {
  if (z.size() != y.size())
    fail(ErrorCode::DimensionMismatch, "loss_value: dim(z) != dim(y)");
  double acc = 0.0;
  for (Eigen::Index j = 0; j < z.size(); ++j)
    acc += loss_scalar(spec, z(j) - y(j));
  return acc;
}

namespace {

double grad_scalar(const LossSpec& spec, double t) {
  switch (spec.kind()) {
    case LossKind::Square:
      return 2.0 * t;
    case LossKind::Lp: {
      const double s = (t >= 0.0) ? 1.0 : -1.0;
      return s * std::pow(std::abs(t), spec.p() - 1);
    }
    case LossKind::PseudoHuber: {
      const double d = spec.delta();
      return t / (d * std::sqrt(1.0 + t * t / (d * d)));
    }
    case LossKind::GeneralizedHuber: {
      // (e^a - e^-a)/(e^a + e^-a + beta) with a = alpha*t, scaled by e^-|a|.
      const double a = spec.alpha() * t;
      const double aa = std::abs(a);
      const double s = (a >= 0.0) ? 1.0 : -1.0;
      const double e2 = std::exp(-2.0 * aa);
      return s * (1.0 - e2) / (1.0 + e2 + spec.beta() * std::exp(-aa));
    }
    case LossKind::LogCosh:
      return std::tanh(spec.alpha() * t);
  }
  return 0.0;
}

}  // namespace

Eigen::VectorXd loss_grad(const LossSpec& spec, const Eigen::VectorXd& z,
                          const Eigen::VectorXd& y) {
  if (z.size() != y.size())
    fail(ErrorCode::DimensionMismatch, "loss_grad: dim(z) != dim(y)");
  Eigen::VectorXd g(z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j)
    g(j) = grad_scalar(spec, z(j) - y(j));
  return g;
}

double h_bound(const LossSpec& spec, double risk, int d_N, int m) {
  switch (spec.kind()) {
    case LossKind::Square:
      // Square = 2 * l_2, so apply the l_p bound at L/2.
      if (risk < 0.0) fail(ErrorCode::NegativeRisk, "negative risk");
      return d_N * m * std::sqrt(2.0) * std::sqrt(risk / 2.0);
    case LossKind::Lp:
      if (risk < 0.0) fail(ErrorCode::NegativeRisk, "negative risk");
      return d_N * m * std::pow(spec.p(), 1.0 / spec.p()) *
             std::pow(risk, 1.0 / spec.p());
    case LossKind::PseudoHuber:
      return risk;
    case LossKind::GeneralizedHuber: {
      if (spec.beta() >= 0.0) return risk;
      const double c =
          d_N / spec.alpha() * std::log(2.0 / (2.0 + spec.beta()));
      return risk + c * m;
    }
    case LossKind::LogCosh:
      return risk + d_N * std::log(2.0) / spec.alpha() * m;
  }
  return risk;
}

}  // namespace lcn
