// Command-line front end: run experiments, verify persisted runs, emit the
// loss-figure grid, and run seed batches.

#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "lcn/harness.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& out_override) {
  lcn::ExperimentConfig config = lcn::load_config(config_path);
  if (!out_override.empty()) config.output_dir = out_override;
  const lcn::RunSummary summary = lcn::run_experiment(config);
  std::cout << "status: " << summary.status
            << "  final_loss: " << lcn::format_double(summary.final_loss)
            << "  final_grad_norm: "
            << lcn::format_double(summary.final_grad_norm)
            << "  wall_s: " << summary.wall_seconds << '\n';
  return summary.exit_code;
}

int cmd_batch(const std::string& config_path, int seeds, int jobs,
              const std::string& out_override) {
  lcn::ExperimentConfig base = lcn::load_config(config_path);
  if (!out_override.empty()) base.output_dir = out_override;
  const std::string root = base.output_dir;

  std::atomic<int> next{0};
  std::atomic<int> worst{0};
  std::mutex io_mutex;
  auto worker = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= seeds) return;
      lcn::ExperimentConfig config = base;
      config.init.seed = base.init.seed + static_cast<std::uint64_t>(i);
      config.output_dir = root + "/seed_" + std::to_string(i);
      try {
        const lcn::RunSummary s = lcn::run_experiment(config);
        std::lock_guard<std::mutex> lock(io_mutex);
        std::cout << "seed " << i << ": " << s.status << '\n';
        int cur = worst.load();
        while (s.exit_code > cur && !worst.compare_exchange_weak(cur, s.exit_code)) {
        }
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(io_mutex);
        std::cerr << "seed " << i << ": error: " << e.what() << '\n';
        worst.store(1);
      }
    }
  };

  std::vector<std::thread> pool;
  for (int j = 0; j < std::max(1, jobs); ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return worst.load();
}

int cmd_loss_figure(const std::string& specs_path, double t_min, double t_max,
                    double step, const std::string& out_path) {
  std::ifstream in(specs_path);
  if (!in) {
    std::cerr << "cannot open " << specs_path << '\n';
    return 1;
  }
  nlohmann::json j;
  in >> j;
  std::vector<lcn::LossSpec> specs;
  for (const auto& item : j) specs.push_back(lcn::loss_spec_from_json(item));

  if (out_path.empty() || out_path == "-") {
    lcn::emit_loss_figure(specs, t_min, t_max, step, std::cout);
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "cannot write " << out_path << '\n';
      return 1;
    }
    lcn::emit_loss_figure(specs, t_min, t_max, step, out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gradient-flow experiments for linear convolutional networks"};
  app.require_subcommand(1);

  std::string config_path, out_dir, run_dir;
  std::string specs_path, figure_out;
  std::vector<double> range{-4.0, 4.0};
  double step = 0.01;
  int seeds = 1, jobs = 1;

  auto* run = app.add_subcommand("run", "run one experiment from a config");
  run->add_option("config", config_path, "experiment config JSON")->required();
  run->add_option("--out", out_dir, "override output directory");

  auto* verify = app.add_subcommand("verify", "re-check a persisted run");
  verify->add_option("dir", run_dir, "run output directory")->required();

  auto* figure =
      app.add_subcommand("loss-figure", "tabulate scalar losses on a grid");
  figure->add_option("--specs", specs_path, "JSON array of loss specs")
      ->required();
  figure->add_option("--range", range, "t_min t_max")->expected(2);
  figure->add_option("--step", step, "grid step");
  figure->add_option("--out", figure_out, "output CSV ('-' for stdout)");

  auto* batch = app.add_subcommand("batch", "run a batch of seeds");
  batch->add_option("config", config_path, "experiment config JSON")
      ->required();
  batch->add_option("--seeds", seeds, "number of seeds")->required();
  batch->add_option("--jobs", jobs, "parallel workers");
  batch->add_option("--out", out_dir, "override output root");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, out_dir);
    if (*verify) return lcn::verify_run_dir(run_dir, std::cout);
    if (*figure)
      return cmd_loss_figure(specs_path, range[0], range[1], step, figure_out);
    if (*batch) return cmd_batch(config_path, seeds, jobs, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
