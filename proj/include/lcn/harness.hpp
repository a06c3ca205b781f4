#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "lcn/flow.hpp"

namespace lcn {

struct DatasetSpec {
  enum class Kind { Inline, Csv, Synthetic };
  Kind kind = Kind::Synthetic;
  // inline
  Eigen::MatrixXd X, Y;
  // csv
  std::string x_path, y_path;
  // synthetic
  std::uint64_t seed = 1;
  int m = 8;
  bool teacher = false;
  std::vector<double> teacher_filter;  // optional; random when empty
};

struct InitSpec {
  std::uint64_t seed = 1;
  enum class Mode { Uniform, Balanced };
  Mode mode = Mode::Uniform;
};

struct ExperimentConfig {
  int d0 = 1;
  std::vector<int> widths{1};
  std::vector<int> strides{1};
  LossSpec loss = LossSpec::square();
  DatasetSpec dataset;
  InitSpec init;
  IntegratorConfig integrator;
  std::string output_dir = "run";

  Architecture architecture() const;
};

// JSON (de)serialization of the config and its pieces.
LossSpec loss_spec_from_json(const nlohmann::json& j);
nlohmann::json loss_spec_to_json(const LossSpec& spec);
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

// Materializes the dataset (inline passthrough, CSV load, or seeded
// synthetic generation).
Dataset build_dataset(const ExperimentConfig& config);

// Componentwise uniform [-1,1] scaled by 1/sqrt(k_i); balanced mode then
// rescales each filter to the geometric mean norm so all deltas vanish.
FilterStack initial_filters(const Architecture& arch, const InitSpec& init);

struct RunSummary {
  std::string status;  // converged | max_time | max_steps |
                       // uncertified_divergence | error
  double final_t = 0.0;
  double final_loss = 0.0;
  double final_grad_norm = 0.0;
  BoundednessCertificate certificate;
  VerificationReport verification;
  LimitClassification classification;
  double wall_seconds = 0.0;
  int exit_code = 1;
};

// Runs one experiment end to end and writes trajectory.csv, summary.json
// and certificate.json into the output directory. Exit code: 0 converged,
// 2 budget exhausted, 3 verification failure, 1 error.
RunSummary run_experiment(const ExperimentConfig& config);

// Re-checks a persisted run directory from its artifacts alone.
// Returns the process exit code (0 on pass) and prints a report.
int verify_run_dir(const std::filesystem::path& dir, std::ostream& out);

// Loss-figure grid: column t plus one scalar-loss column per spec.
void emit_loss_figure(const std::vector<LossSpec>& specs, double t_min,
                      double t_max, double step, std::ostream& out);

// Resolves relative output dirs against $LCNFLOW_OUTPUT_ROOT when set.
std::filesystem::path resolve_output_dir(const std::string& dir);

// 17-significant-digit formatting used for all CSV output.
std::string format_double(double x);

}  // namespace lcn
