#include "lcn/harness.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "lcn/rng.hpp"

namespace lcn {

using nlohmann::json;

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

Architecture ExperimentConfig::architecture() const {
  return Architecture::create(d0, widths, strides);
}

// --- JSON (de)serialization -----------------------------------------------

LossSpec loss_spec_from_json(const json& j) {
  const std::string kind = j.value("kind", "");
  if (kind == "square") return LossSpec::square();
  if (kind == "lp") {
    if (!j.contains("p"))
      fail(ErrorCode::ConfigError, "lp loss requires field \"p\"");
    return LossSpec::lp(j.at("p").get<int>());
  }
  if (kind == "pseudo_huber")
    return LossSpec::pseudo_huber(j.value("delta", 1.0));
  if (kind == "generalized_huber")
    return LossSpec::generalized_huber(j.value("alpha", 1.0),
                                       j.value("beta", 0.0));
  if (kind == "log_cosh") return LossSpec::log_cosh(j.value("alpha", 1.0));
  fail(ErrorCode::ConfigError, "unknown loss kind \"" + kind + "\"");
}

json loss_spec_to_json(const LossSpec& spec) {
  json j;
  switch (spec.kind()) {
    case LossKind::Square:
      j["kind"] = "square";
      break;
    case LossKind::Lp:
      j["kind"] = "lp";
      j["p"] = spec.p();
      break;
    case LossKind::PseudoHuber:
      j["kind"] = "pseudo_huber";
      j["delta"] = spec.delta();
      break;
    case LossKind::GeneralizedHuber:
      j["kind"] = "generalized_huber";
      j["alpha"] = spec.alpha();
      j["beta"] = spec.beta();
      break;
    case LossKind::LogCosh:
      j["kind"] = "log_cosh";
      j["alpha"] = spec.alpha();
      break;
  }
  return j;
}

namespace {

Eigen::MatrixXd matrix_from_json(const json& rows) {
  if (!rows.is_array() || rows.empty())
    fail(ErrorCode::ConfigError, "matrix must be a non-empty array of rows");
  const std::size_t cols = rows.front().size();
  Eigen::MatrixXd m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols)
      fail(ErrorCode::ConfigError, "ragged matrix rows");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j].get<double>();
  }
  return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd load_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open CSV file " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorCode::IoError, "empty CSV file " + path);
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size())
      fail(ErrorCode::IoError, "ragged CSV rows in " + path);
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  const json& arch = j.at("architecture");
  c.d0 = arch.at("d0").get<int>();
  c.widths = arch.at("k").get<std::vector<int>>();
  c.strides = arch.at("s").get<std::vector<int>>();

  c.loss = loss_spec_from_json(j.at("loss"));

  const json& ds = j.at("dataset");
  const std::string type = ds.value("type", "synthetic");
  if (type == "inline") {
    c.dataset.kind = DatasetSpec::Kind::Inline;
    c.dataset.X = matrix_from_json(ds.at("X"));
    c.dataset.Y = matrix_from_json(ds.at("Y"));
  } else if (type == "csv") {
    c.dataset.kind = DatasetSpec::Kind::Csv;
    c.dataset.x_path = ds.at("x_path").get<std::string>();
    c.dataset.y_path = ds.at("y_path").get<std::string>();
  } else if (type == "synthetic") {
    c.dataset.kind = DatasetSpec::Kind::Synthetic;
    c.dataset.seed = ds.value("seed", std::uint64_t{1});
    c.dataset.m = ds.value("m", 8);
    c.dataset.teacher = ds.value("teacher", false);
    if (ds.contains("teacher_filter"))
      c.dataset.teacher_filter = ds.at("teacher_filter").get<std::vector<double>>();
  } else {
    fail(ErrorCode::ConfigError, "unknown dataset type \"" + type + "\"");
  }

  if (j.contains("init")) {
    const json& init = j.at("init");
    c.init.seed = init.value("seed", std::uint64_t{1});
    const std::string mode = init.value("mode", "uniform");
    if (mode == "uniform")
      c.init.mode = InitSpec::Mode::Uniform;
    else if (mode == "balanced")
      c.init.mode = InitSpec::Mode::Balanced;
    else
      fail(ErrorCode::ConfigError, "unknown init mode \"" + mode + "\"");
  }

  if (j.contains("integrator")) {
    const json& ic = j.at("integrator");
    c.integrator.rel_tol = ic.value("rel_tol", c.integrator.rel_tol);
    c.integrator.abs_tol = ic.value("abs_tol", c.integrator.abs_tol);
    c.integrator.grad_tol = ic.value("grad_tol", c.integrator.grad_tol);
    c.integrator.max_t = ic.value("max_t", c.integrator.max_t);
    c.integrator.max_steps = ic.value("max_steps", c.integrator.max_steps);
    c.integrator.sample_every =
        ic.value("sample_every", c.integrator.sample_every);
    c.integrator.min_step = ic.value("min_step", c.integrator.min_step);
  }

  c.output_dir = j.value("output_dir", std::string("run"));
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["architecture"] = {{"d0", c.d0}, {"k", c.widths}, {"s", c.strides}};
  j["loss"] = loss_spec_to_json(c.loss);
  json ds;
  switch (c.dataset.kind) {
    case DatasetSpec::Kind::Inline:
      ds["type"] = "inline";
      ds["X"] = matrix_to_json(c.dataset.X);
      ds["Y"] = matrix_to_json(c.dataset.Y);
      break;
    case DatasetSpec::Kind::Csv:
      ds["type"] = "csv";
      ds["x_path"] = c.dataset.x_path;
      ds["y_path"] = c.dataset.y_path;
      break;
    case DatasetSpec::Kind::Synthetic:
      ds["type"] = "synthetic";
      ds["seed"] = c.dataset.seed;
      ds["m"] = c.dataset.m;
      ds["teacher"] = c.dataset.teacher;
      if (!c.dataset.teacher_filter.empty())
        ds["teacher_filter"] = c.dataset.teacher_filter;
      break;
  }
  j["dataset"] = std::move(ds);
  j["init"] = {
      {"seed", c.init.seed},
      {"mode", c.init.mode == InitSpec::Mode::Uniform ? "uniform" : "balanced"}};
  j["integrator"] = {{"rel_tol", c.integrator.rel_tol},
                     {"abs_tol", c.integrator.abs_tol},
                     {"grad_tol", c.integrator.grad_tol},
                     {"max_t", c.integrator.max_t},
                     {"max_steps", c.integrator.max_steps},
                     {"sample_every", c.integrator.sample_every},
                     {"min_step", c.integrator.min_step}};
  j["output_dir"] = c.output_dir;
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigError,
         "invalid JSON in " + path.string() + ": " + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigError,
         "invalid config " + path.string() + ": " + e.what());
  }
}

// --- dataset and initialization -------------------------------------------

Dataset build_dataset(const ExperimentConfig& config) {
  const Architecture arch = config.architecture();
  Dataset data;
  switch (config.dataset.kind) {
    case DatasetSpec::Kind::Inline:
      data.X = config.dataset.X;
      data.Y = config.dataset.Y;
      break;
    case DatasetSpec::Kind::Csv:
      data.X = load_csv_matrix(config.dataset.x_path);
      data.Y = load_csv_matrix(config.dataset.y_path);
      break;
    case DatasetSpec::Kind::Synthetic: {
      Rng rng(config.dataset.seed);
      data.X = rng.normal_matrix(arch.input_dim(), config.dataset.m);
      if (config.dataset.teacher) {
        const int k_v = arch.final_width();
        Eigen::VectorXd teacher(k_v);
        if (!config.dataset.teacher_filter.empty()) {
          if (static_cast<int>(config.dataset.teacher_filter.size()) != k_v)
            fail(ErrorCode::ConfigError,
                 "teacher_filter must have length k_v = " +
                     std::to_string(k_v));
          for (int i = 0; i < k_v; ++i)
            teacher(i) = config.dataset.teacher_filter[i];
        } else {
          for (int i = 0; i < k_v; ++i) teacher(i) = rng.normal();
        }
        const Eigen::MatrixXd V =
            to_matrix(teacher, arch.input_dim(), arch.final_stride()).dense();
        data.Y = V * data.X;
      } else {
        data.Y = rng.normal_matrix(arch.output_dim(), config.dataset.m);
      }
      break;
    }
  }
  data.check_shape(arch);
  return data;
}

FilterStack initial_filters(const Architecture& arch, const InitSpec& init) {
  Rng rng(init.seed);
  FilterStack w;
  for (int k : arch.widths())
    w.filters.push_back(rng.uniform_vector(k, -1.0, 1.0) / std::sqrt(k));
  if (init.mode == InitSpec::Mode::Balanced) {
    // Rescale every filter to the geometric-mean norm; all deltas vanish.
    // This changes the represented function (rescaling is only
    // function-preserving pairwise).
    double log_prod = 0.0;
    for (const auto& f : w.filters) log_prod += std::log(f.norm());
    const double target = std::exp(log_prod / arch.depth());
    for (auto& f : w.filters) f *= target / f.norm();
  }
  return w;
}

// --- artifacts ------------------------------------------------------------

namespace {

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  const int N = traj.depth;
  out << "t,loss,grad_norm";
  for (int i = 1; i <= N; ++i)
    for (int j = i + 1; j <= N; ++j) out << ",delta_" << i << "_" << j;
  for (int i = 1; i <= N; ++i) out << ",layer_norm_sq_" << i;
  out << ",final_filter_l1\n";
  for (const auto& s : traj.samples) {
    out << format_double(s.t) << ',' << format_double(s.loss) << ','
        << format_double(s.grad_norm);
    for (double d : s.deltas) out << ',' << format_double(d);
    for (double b : s.layer_norm_sq) out << ',' << format_double(b);
    out << ',' << format_double(s.final_filter_l1) << '\n';
  }
}

json certificate_to_json(const BoundednessCertificate& cert) {
  json j;
  j["available"] = cert.available;
  if (cert.available) {
    j["T"] = cert.T;
    j["tau"] = cert.tau;
  } else {
    j["reason"] = cert.unavailable_reason;
  }
  j["k_v"] = cert.k_v;
  j["deltas"] = cert.deltas;
  j["loss"] = cert.loss_name;
  return j;
}

BoundednessCertificate certificate_from_json(const json& j) {
  BoundednessCertificate cert;
  cert.available = j.value("available", false);
  if (cert.available) {
    cert.T = j.at("T").get<double>();
    cert.tau = j.at("tau").get<double>();
  } else {
    cert.unavailable_reason = j.value("reason", "");
  }
  cert.k_v = j.value("k_v", 0);
  cert.deltas = j.value("deltas", std::vector<double>{});
  cert.loss_name = j.value("loss", "");
  return cert;
}

json verification_to_json(const VerificationReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"name", c.name},
                      {"observed", c.observed},
                      {"bound", c.bound},
                      {"applicable", c.applicable},
                      {"pass", c.pass}});
  return {{"passed", report.passed()}, {"checks", std::move(checks)}};
}

std::string limit_status_name(LimitStatus s) {
  switch (s) {
    case LimitStatus::NotCritical:
      return "not_critical";
    case LimitStatus::GlobalMinCertificate:
      return "global_min_certificate";
    case LimitStatus::NoCertificate:
      return "no_certificate";
  }
  return "unknown";
}

json classification_to_json(const LimitClassification& cls) {
  json witnesses = json::array();
  for (const auto& z : cls.witnesses)
    witnesses.push_back({z.real(), z.imag()});
  return {{"status", limit_status_name(cls.status)},
          {"grad_norm", cls.grad_norm},
          {"witnesses", std::move(witnesses)},
          {"note", cls.note}};
}

}  // namespace

std::filesystem::path resolve_output_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  if (p.is_absolute()) return p;
  if (const char* root = std::getenv("LCNFLOW_OUTPUT_ROOT"))
    return std::filesystem::path(root) / p;
  return p;
}

RunSummary run_experiment(const ExperimentConfig& config) {
  RunSummary summary;
  const Architecture arch = config.architecture();
  const Dataset data = build_dataset(config);
  const FilterStack w0 = initial_filters(arch, config.init);

  summary.certificate = make_certificate(config.loss, arch, w0, data);

  Trajectory traj;
  bool nonfinite = false;
  std::string error_note;
  try {
    traj = integrate(config.loss, arch, data, w0, config.integrator,
                     summary.certificate.available ? &summary.certificate
                                                   : nullptr);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NonFiniteState) throw;
    nonfinite = true;
    error_note = e.what();
  }

  const std::filesystem::path out_dir = resolve_output_dir(config.output_dir);
  std::filesystem::create_directories(out_dir);

  json summary_json;
  if (nonfinite) {
    summary.status =
        summary.certificate.available ? "error" : "uncertified_divergence";
    summary.exit_code = 1;
    summary_json["note"] = error_note;
  } else {
    summary.final_t = traj.back().t;
    summary.final_loss = traj.back().loss;
    summary.final_grad_norm = traj.back().grad_norm;
    summary.wall_seconds = traj.wall_seconds;
    summary.verification =
        verify_trajectory(traj, summary.certificate, config.integrator);
    summary.classification = classify_limit(
        config.loss, arch, FilterStack::from_flat(arch, traj.back().w), data,
        traj.grad_tol_used);

    switch (traj.termination) {
      case Termination::Converged:
        summary.status = "converged";
        summary.exit_code = summary.verification.passed() ? 0 : 3;
        break;
      case Termination::MaxTime:
        summary.status = "max_time";
        summary.exit_code = 2;
        break;
      case Termination::MaxSteps:
        summary.status = "max_steps";
        summary.exit_code = 2;
        break;
      case Termination::CertificateViolation:
        summary.status = "error";
        summary.exit_code = 3;
        break;
      case Termination::StepSizeUnderflow:
        summary.status = "error";
        summary.exit_code = 1;
        break;
    }
    if (summary.exit_code == 0 && !summary.verification.passed())
      summary.exit_code = 3;

    std::ofstream csv(out_dir / "trajectory.csv");
    write_trajectory_csv(traj, csv);

    summary_json["termination"] = to_string(traj.termination);
    summary_json["final_t"] = summary.final_t;
    summary_json["final_loss"] = summary.final_loss;
    summary_json["final_grad_norm"] = summary.final_grad_norm;
    summary_json["grad_tol_used"] = traj.grad_tol_used;
    summary_json["accepted_steps"] = traj.accepted_steps;
    summary_json["rejected_steps"] = traj.rejected_steps;
    std::vector<double> wf(traj.back().w.data(),
                           traj.back().w.data() + traj.back().w.size());
    summary_json["final_w"] = wf;
    summary_json["verification"] = verification_to_json(summary.verification);
    summary_json["classification"] =
        classification_to_json(summary.classification);
  }
  summary_json["status"] = summary.status;
  if (!summary.certificate.available)
    summary_json["certificate_note"] =
        "certificate: unavailable (" + summary.certificate.unavailable_reason +
        ")";
  summary_json["certificate"] = certificate_to_json(summary.certificate);
  summary_json["config"] = config_to_json(config);

  {
    std::ofstream cert_out(out_dir / "certificate.json");
    cert_out << certificate_to_json(summary.certificate).dump(2) << '\n';
    std::ofstream sum_out(out_dir / "summary.json");
    sum_out << summary_json.dump(2) << '\n';
  }
  return summary;
}

// --- verify ---------------------------------------------------------------

namespace {

Trajectory trajectory_from_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "missing artifact " + path.string());
  std::string header;
  if (!std::getline(in, header))
    fail(ErrorCode::IoError, "empty trajectory " + path.string());

  std::vector<std::string> cols;
  {
    std::stringstream ss(header);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
  }
  int n_delta = 0, n_layer = 0;
  for (const auto& c : cols) {
    if (c.rfind("delta_", 0) == 0) ++n_delta;
    if (c.rfind("layer_norm_sq_", 0) == 0) ++n_layer;
  }

  Trajectory traj;
  traj.depth = n_layer;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    if (vals.size() != cols.size())
      fail(ErrorCode::IoError, "ragged trajectory row in " + path.string());
    TrajectorySample s;
    s.t = vals[0];
    s.loss = vals[1];
    s.grad_norm = vals[2];
    s.deltas.assign(vals.begin() + 3, vals.begin() + 3 + n_delta);
    s.layer_norm_sq.assign(vals.begin() + 3 + n_delta,
                           vals.begin() + 3 + n_delta + n_layer);
    s.final_filter_l1 = vals.back();
    traj.samples.push_back(std::move(s));
  }
  if (traj.samples.empty())
    fail(ErrorCode::IoError, "trajectory has no samples: " + path.string());
  return traj;
}

}  // namespace

int verify_run_dir(const std::filesystem::path& dir, std::ostream& out) {
  const auto traj_path = dir / "trajectory.csv";
  const auto cert_path = dir / "certificate.json";
  const auto summary_path = dir / "summary.json";
  for (const auto& p : {traj_path, cert_path, summary_path})
    if (!std::filesystem::exists(p))
      fail(ErrorCode::IoError, "missing artifact " + p.string());

  const Trajectory traj = trajectory_from_csv(traj_path);

  json cert_json, summary_json;
  {
    std::ifstream cin(cert_path);
    cin >> cert_json;
    std::ifstream sin(summary_path);
    sin >> summary_json;
  }
  const BoundednessCertificate cert = certificate_from_json(cert_json);

  IntegratorConfig ic;
  if (summary_json.contains("config") &&
      summary_json["config"].contains("integrator")) {
    const json& j = summary_json["config"]["integrator"];
    ic.rel_tol = j.value("rel_tol", ic.rel_tol);
    ic.abs_tol = j.value("abs_tol", ic.abs_tol);
  }

  const VerificationReport report = verify_trajectory(traj, cert, ic);
  for (const auto& c : report.checks) {
    out << (c.applicable ? (c.pass ? "PASS " : "FAIL ") : "SKIP ") << c.name
        << "  observed=" << format_double(c.observed)
        << "  bound=" << format_double(c.bound) << '\n';
  }
  out << verification_to_json(report).dump(2) << '\n';
  return report.passed() ? 0 : 1;
}

// --- loss figure ----------------------------------------------------------

void emit_loss_figure(const std::vector<LossSpec>& specs, double t_min,
                      double t_max, double step, std::ostream& out) {
  if (!(t_min < t_max) || !(step > 0.0))
    fail(ErrorCode::ConfigError, "need t_min < t_max and step > 0");
  out << "t";
  for (std::size_t i = 0; i < specs.size(); ++i) {
    std::string name = specs[i].name();
    out << ',' << name;
  }
  out << '\n';
  const long n = std::lround((t_max - t_min) / step);
  for (long i = 0; i <= n; ++i) {
    const double t = t_min + i * step;
    out << format_double(t);
    for (const auto& spec : specs) out << ',' << format_double(loss_scalar(spec, t));
    out << '\n';
  }
}

}  // namespace lcn
