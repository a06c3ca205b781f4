#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lcn/risk.hpp"

namespace lcn {

struct IntegratorConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  // Negative means "auto": 1e-8 * (1 + L(w0)).
  double grad_tol = -1.0;
  double max_t = 1e6;
  long max_steps = 20'000'000;
  int sample_every = 10;
  // Step floor coefficient: underflow when h < min_step * max(1, t).
  double min_step = 1e-14;
};

enum class Termination {
  Converged,
  MaxTime,
  MaxSteps,
  StepSizeUnderflow,
  CertificateViolation,
};

std::string to_string(Termination t);

// A-priori bounds derived from the loss value at initialization:
// ||v(t)||_1 <= T and ||w^(i)(t)||_2^2 <= tau for all t >= 0.
struct BoundednessCertificate {
  bool available = false;
  std::string unavailable_reason;
  double T = 0.0;
  double tau = 0.0;
  int k_v = 0;
  std::vector<double> deltas;  // delta_1..delta_{N-1} at t = 0
  std::string loss_name;
};

struct TrajectorySample {
  double t = 0.0;
  double loss = 0.0;
  double grad_norm = 0.0;
  std::vector<double> deltas;         // delta_ij for i<j, lexicographic
  std::vector<double> layer_norm_sq;  // ||w^(i)||_2^2
  double final_filter_l1 = 0.0;
  Eigen::VectorXd w;  // flattened filter stack
};

struct Trajectory {
  int depth = 0;
  std::vector<TrajectorySample> samples;
  Termination termination = Termination::MaxTime;
  long accepted_steps = 0;
  long rejected_steps = 0;
  double wall_seconds = 0.0;
  double grad_tol_used = 0.0;

  const TrajectorySample& front() const { return samples.front(); }
  const TrajectorySample& back() const { return samples.back(); }
};

// Antisymmetric N x N matrix of delta_ij = ||w^(i)||_2^2 - ||w^(j)||_2^2.
Eigen::MatrixXd balancedness_deltas(const FilterStack& w);

// Constructive tau of the layer-norm bound: beta_1 is a root of the monic
// polynomial z(z+P_1)(z+P_2)...(z+P_{N-1}) - C with partial sums
// P_i = delta_1+...+delta_i and C = (6 T k_v)^{2 k_v}; tau combines the
// coefficient root bound with the degenerate all-zero-filter case and the
// positive partial sums so that every beta_i <= tau.
double filter_norm_bound(int k_v, double T, const std::vector<double>& deltas);

// Builds the (T, tau) certificate for a flow started at w0, or marks it
// unavailable when X is rank deficient.
BoundednessCertificate make_certificate(const LossSpec& spec,
                                        const Architecture& arch,
                                        const FilterStack& w0,
                                        const Dataset& data);

// Integrates dw/dt = -grad L(w) with an adaptive embedded Runge-Kutta
// pair (Dormand-Prince 5(4), PI step-size control). Records a diagnostic
// sample every config.sample_every accepted steps plus the initial and
// final states. If a certificate is supplied, a gross bound violation
// terminates the run with CertificateViolation.
Trajectory integrate(const LossSpec& spec, const Architecture& arch,
                     const Dataset& data, const FilterStack& w0,
                     const IntegratorConfig& config,
                     const BoundednessCertificate* certificate = nullptr);

struct VerificationCheck {
  std::string name;
  double observed = 0.0;
  double bound = 0.0;
  bool applicable = true;
  bool pass = true;
};

struct VerificationReport {
  std::vector<VerificationCheck> checks;
  bool passed() const;
};

// Post-hoc invariant checks on a recorded trajectory: balancedness drift,
// loss descent, and (when the certificate is available) the final-filter
// and layer-norm bounds.
VerificationReport verify_trajectory(const Trajectory& traj,
                                     const BoundednessCertificate& certificate,
                                     const IntegratorConfig& config);

// --- limit-point classification -------------------------------------------

enum class LimitStatus { NotCritical, GlobalMinCertificate, NoCertificate };

struct LimitClassification {
  LimitStatus status = LimitStatus::NoCertificate;
  double grad_norm = 0.0;
  std::vector<std::complex<double>> witnesses;  // shared roots, if any
  std::string note;
};

// Applies the common-root global-minimum criterion (stride-1 architectures
// only) to a candidate critical point.
LimitClassification classify_limit(const LossSpec& spec,
                                   const Architecture& arch,
                                   const FilterStack& w_final,
                                   const Dataset& data, double tol);

}  // namespace lcn
