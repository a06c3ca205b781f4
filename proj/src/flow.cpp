#include "lcn/flow.hpp"

#include <chrono>
#include <cmath>

#include "lcn/roots.hpp"

namespace lcn {

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Converged:
      return "converged";
    case Termination::MaxTime:
      return "max_time";
    case Termination::MaxSteps:
      return "max_steps";
    case Termination::StepSizeUnderflow:
      return "step_size_underflow";
    case Termination::CertificateViolation:
      return "certificate_violation";
  }
  return "unknown";
}

Eigen::MatrixXd balancedness_deltas(const FilterStack& w) {
  const int N = w.depth();
  Eigen::MatrixXd d(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      d(i, j) = w.filters[i].squaredNorm() - w.filters[j].squaredNorm();
  return d;
}

double filter_norm_bound(int k_v, double T,
                         const std::vector<double>& deltas) {
  const int N = static_cast<int>(deltas.size()) + 1;

  // Partial sums P_0 = 0, P_i = delta_1 + ... + delta_i.
  std::vector<double> partial{0.0};
  for (double d : deltas) partial.push_back(partial.back() + d);

  // q(z) = prod_i (z + P_i) - C, monic of degree N.
  std::vector<double> q{1.0};
  for (int i = 0; i < N; ++i) {
    std::vector<double> nq(q.size() + 1, 0.0);
    for (std::size_t j = 0; j < q.size(); ++j) {
      nq[j + 1] += q[j];
      nq[j] += partial[i] * q[j];
    }
    q = std::move(nq);
  }
  const double C = std::pow(6.0 * T * k_v, 2 * k_v);
  q[0] -= C;

  double max_coeff = 0.0;
  for (double c : q) max_coeff = std::max(max_coeff, std::abs(c));
  const double A = N * max_coeff;  // leading coefficient is 1

  double max_delta = 0.0;
  for (double d : deltas) max_delta = std::max(max_delta, std::abs(d));
  const double degenerate = (N - 1) * max_delta;

  double shift = 0.0;
  for (std::size_t i = 1; i < partial.size(); ++i)
    shift += std::max(0.0, partial[i]);
  return std::max(A, degenerate) + shift;
}

BoundednessCertificate make_certificate(const LossSpec& spec,
                                        const Architecture& arch,
                                        const FilterStack& w0,
                                        const Dataset& data) {
  BoundednessCertificate cert;
  cert.loss_name = spec.name();
  cert.k_v = arch.final_width();
  for (int i = 1; i < arch.depth(); ++i)
    cert.deltas.push_back(w0.filters[i].squaredNorm() -
                          w0.filters[i - 1].squaredNorm());
  const double L0 = empirical_risk(spec, arch, w0, data);
  try {
    cert.T = g_bound(spec, data, L0);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::RankDeficientInput) throw;
    cert.available = false;
    cert.unavailable_reason = "rank-deficient X";
    return cert;
  }
  cert.tau = filter_norm_bound(cert.k_v, cert.T, cert.deltas);
  cert.available = true;
  return cert;
}

namespace {

TrajectorySample make_sample(const Architecture& arch, double t,
                             const Eigen::VectorXd& w_flat, double loss,
                             double grad_norm) {
  TrajectorySample s;
  s.t = t;
  s.loss = loss;
  s.grad_norm = grad_norm;
  s.w = w_flat;
  const FilterStack w = FilterStack::from_flat(arch, w_flat);
  const int N = arch.depth();
  for (int i = 0; i < N; ++i)
    s.layer_norm_sq.push_back(w.filters[i].squaredNorm());
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j)
      s.deltas.push_back(s.layer_norm_sq[i] - s.layer_norm_sq[j]);
  s.final_filter_l1 = final_filter(arch, w).coeffs.cwiseAbs().sum();
  return s;
}

bool violates(const BoundednessCertificate& cert,
              const TrajectorySample& s) {
  if (!cert.available) return false;
  if (s.final_filter_l1 > cert.T + 1e-6) return true;
  for (double b : s.layer_norm_sq)
    if (b > cert.tau) return true;
  return false;
}

}  // namespace

Trajectory integrate(const LossSpec& spec, const Architecture& arch,
                     const Dataset& data, const FilterStack& w0,
                     const IntegratorConfig& config,
                     const BoundednessCertificate* certificate) {
  data.check_shape(arch);
  w0.check_shape(arch);
  const auto wall_start = std::chrono::steady_clock::now();

  auto deriv = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    const FilterStack w = FilterStack::from_flat(arch, y);
    return -risk_grad(spec, arch, w, data).flatten();
  };
  auto risk_at = [&](const Eigen::VectorXd& y) -> double {
    return empirical_risk(spec, arch, FilterStack::from_flat(arch, y), data);
  };

  Eigen::VectorXd y = w0.flatten();
  double t = 0.0;
  Eigen::VectorXd f = deriv(y);
  const double L0 = risk_at(y);
  const double grad_tol =
      (config.grad_tol < 0.0) ? 1e-8 * (1.0 + L0) : config.grad_tol;

  Trajectory traj;
  traj.depth = arch.depth();
  traj.grad_tol_used = grad_tol;
  traj.samples.push_back(make_sample(arch, t, y, L0, f.norm()));

  auto finish = [&](Termination status) {
    traj.termination = status;
    if (traj.samples.back().t != t)
      traj.samples.push_back(make_sample(arch, t, y, risk_at(y), f.norm()));
    traj.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      wall_start)
            .count();
    return traj;
  };

  if (f.norm() <= grad_tol) return finish(Termination::Converged);

  // Dormand-Prince 5(4) coefficients.
  static const double a21 = 1.0 / 5.0;
  static const double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static const double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static const double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                      a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  static const double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                      a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                      a65 = -5103.0 / 18656.0;
  static const double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0,
                      b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                      b6 = 11.0 / 84.0;
  static const double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0,
                      e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                      e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

  // Two-evaluation initial step heuristic.
  double h;
  {
    const double d0 = y.norm(), d1 = f.norm();
    double h0 = (d0 < 1e-10 || d1 < 1e-10) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::max(h0, 1e-10);
    const Eigen::VectorXd f1 = deriv(y + h0 * f);
    const double d2 =
        f1.allFinite() ? (f1 - f).norm() / h0 : 1e15;  // probe overflowed
    const double dm = std::max(d1, d2);
    const double h1 = (dm <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                    : std::pow(0.01 / dm, 0.2);
    h = std::min({100.0 * h0, h1, config.max_t});
  }

  double facold = 1e-4;
  const double beta_pi = 0.04;
  const double expo1 = 0.2 - beta_pi * 0.75;
  long since_sample = 0;

  while (true) {
    if (traj.accepted_steps + traj.rejected_steps >= config.max_steps)
      return finish(Termination::MaxSteps);
    if (h < config.min_step * std::max(1.0, t))
      return finish(Termination::StepSizeUnderflow);
    if (t + h > config.max_t) h = config.max_t - t;

    const Eigen::VectorXd k1 = f;
    const Eigen::VectorXd k2 = deriv(y + h * (a21 * k1));
    const Eigen::VectorXd k3 = deriv(y + h * (a31 * k1 + a32 * k2));
    const Eigen::VectorXd k4 = deriv(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Eigen::VectorXd k5 =
        deriv(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Eigen::VectorXd k6 =
        deriv(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Eigen::VectorXd ynew =
        y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Eigen::VectorXd k7 = deriv(ynew);
    const Eigen::VectorXd errv =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    if (!ynew.allFinite() || !k7.allFinite() || !errv.allFinite()) {
      // Overflow inside a trial step: reject hard and retry smaller. The
      // step-floor check at the top of the loop turns a persistent failure
      // into StepSizeUnderflow.
      ++traj.rejected_steps;
      h *= 0.1;
      continue;
    }

    const double sc =
        config.abs_tol + config.rel_tol * std::max(y.norm(), ynew.norm());
    const double err = errv.norm() / sc;

    const double fac11 = std::pow(std::max(err, 1e-16), expo1);
    if (err <= 1.0) {
      // accept
      t += h;
      y = ynew;
      f = k7;
      if (y.norm() > 1e150)
        fail(ErrorCode::NonFiniteState,
             "state norm overflow at t = " + std::to_string(t));
      ++traj.accepted_steps;
      ++since_sample;

      // PI controller: h_new = h / clamp(fac/safe), growth capped at 10x.
      double fac = fac11 / std::pow(facold, beta_pi);
      fac = std::max(0.1, std::min(5.0, fac / 0.9));
      h /= fac;
      facold = std::max(err, 1e-4);

      const bool converged = f.norm() <= grad_tol;
      const bool time_up = t >= config.max_t;
      if (converged || time_up || since_sample >= config.sample_every) {
        TrajectorySample s = make_sample(arch, t, y, risk_at(y), f.norm());
        if (certificate && violates(*certificate, s)) {
          traj.samples.push_back(std::move(s));
          return finish(Termination::CertificateViolation);
        }
        traj.samples.push_back(std::move(s));
        since_sample = 0;
      }
      if (converged) return finish(Termination::Converged);
      if (time_up) return finish(Termination::MaxTime);
    } else {
      ++traj.rejected_steps;
      h /= std::min(10.0, fac11 / 0.9);
    }
  }
}

bool VerificationReport::passed() const {
  for (const auto& c : checks)
    if (c.applicable && !c.pass) return false;
  return true;
}

VerificationReport verify_trajectory(const Trajectory& traj,
                                     const BoundednessCertificate& certificate,
                                     const IntegratorConfig& config) {
  VerificationReport report;
  const TrajectorySample& s0 = traj.front();

  double max_layer0 = 0.0;
  for (double b : s0.layer_norm_sq) max_layer0 = std::max(max_layer0, b);

  // Balancedness drift against the t = 0 deltas.
  {
    VerificationCheck c;
    c.name = "balancedness_drift";
    c.bound = 1e-6 * (1.0 + max_layer0);
    for (const auto& s : traj.samples)
      for (std::size_t p = 0; p < s.deltas.size(); ++p)
        c.observed = std::max(c.observed, std::abs(s.deltas[p] - s0.deltas[p]));
    c.applicable = !s0.deltas.empty();
    c.pass = c.observed <= c.bound;
    report.checks.push_back(c);
  }

  // Loss descent between consecutive samples.
  {
    VerificationCheck c;
    c.name = "loss_descent";
    c.observed = 0.0;
    c.bound = 0.0;
    c.pass = true;
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
      const double increase = traj.samples[i].loss - traj.samples[i - 1].loss;
      double wnorm_sq = 0.0;
      for (double b : traj.samples[i - 1].layer_norm_sq) wnorm_sq += b;
      const double allowed =
          10.0 * (config.abs_tol + config.rel_tol * std::sqrt(wnorm_sq));
      if (increase > c.observed) {
        c.observed = increase;
        c.bound = allowed;
      }
      if (increase > allowed) c.pass = false;
    }
    report.checks.push_back(c);
  }

  // Final-filter 1-norm against T.
  {
    VerificationCheck c;
    c.name = "final_filter_bound";
    c.applicable = certificate.available;
    c.bound = certificate.T + 1e-6;
    for (const auto& s : traj.samples)
      c.observed = std::max(c.observed, s.final_filter_l1);
    c.pass = !c.applicable || c.observed <= c.bound;
    report.checks.push_back(c);
  }

  // Layer squared norms against tau.
  {
    VerificationCheck c;
    c.name = "layer_norm_bound";
    c.applicable = certificate.available;
    c.bound = certificate.tau;
    for (const auto& s : traj.samples)
      for (double b : s.layer_norm_sq) c.observed = std::max(c.observed, b);
    c.pass = !c.applicable || c.observed <= c.bound;
    report.checks.push_back(c);
  }

  return report;
}

}  // namespace lcn
