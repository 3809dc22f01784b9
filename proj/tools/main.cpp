#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tslab/empirical.hpp"
#include "tslab/gauss_kernels.hpp"
#include "tslab/init_solvers.hpp"
#include "tslab/io.hpp"
#include "tslab/mc_oracle.hpp"
#include "tslab/population.hpp"
#include "tslab/trainer.hpp"
#include "tslab/verifier.hpp"

namespace {

tslab::WeightVector parse_vector(const std::string& csv) {
  std::vector<double> values;
  std::stringstream ss(csv);
  std::string field;
  while (std::getline(ss, field, ',')) values.push_back(std::stod(field));
  tslab::WeightVector v(static_cast<int>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<int>(i)] = values[i];
  return v;
}

int run_train(const std::string& config_path, const std::string& traj_path,
              const std::string& svg_path) {
  tslab::ExperimentConfig cfg;
  try {
    cfg = tslab::load_experiment_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  if (!traj_path.empty()) cfg.trajectory_csv = traj_path;
  if (!svg_path.empty()) cfg.svg = svg_path;
  if (!cfg.svg.empty()) cfg.train.record_weights = true;

  const tslab::TeacherNetwork teacher = tslab::build_teacher(cfg);
  const tslab::StudentNetwork init = tslab::build_init(cfg, teacher);
  const tslab::TrainResult result = tslab::train(teacher, init, cfg.train);

  if (!cfg.trajectory_csv.empty()) tslab::write_trajectory_csv(result.trajectory, cfg.trajectory_csv);
  if (!cfg.final_network_json.empty()) {
    tslab::write_network_json(result.final_state, cfg.final_network_json);
  }
  if (!cfg.svg.empty()) tslab::write_trajectory_svg(teacher, result.trajectory, cfg.svg);

  std::cout << "steps=" << result.trajectory.final_step << " loss=" << result.trajectory.final_loss
            << " stop=" << tslab::stop_reason_name(result.trajectory.reason) << "\n";
  switch (result.trajectory.reason) {
    case tslab::StopReason::TargetReached: return 0;
    case tslab::StopReason::StepCap: return 2;
    case tslab::StopReason::Divergence: return 3;
  }
  return 3;
}

int run_verify(const std::string& suite, const std::string& report_path, std::uint64_t seed) {
  if (!tslab::suite_known(suite)) {
    std::cerr << "unknown suite: " << suite
              << " (expected kernels | landscape | claims | init | sampling | all)\n";
    return 1;
  }
  const std::vector<tslab::CheckReport> reports = tslab::run_suite(suite, seed);
  const std::string json = tslab::check_report_json(reports);
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) {
      std::cerr << "cannot open " << report_path << " for writing\n";
      return 1;
    }
    out << json << "\n";
  }
  int failures = 0;
  for (const auto& r : reports) {
    std::cout << "[" << tslab::check_status_name(r.status) << "] " << r.name;
    if (!r.details.empty()) std::cout << " - " << r.details;
    std::cout << "\n";
    if (r.status == tslab::CheckStatus::Fail) ++failures;
  }
  std::cout << reports.size() << " checks, " << failures << " failures\n";
  return failures == 0 ? 0 : 4;
}

int run_init(const std::string& algo, int m, const std::string& config_path,
             const std::string& out_path) {
  tslab::ExperimentConfig cfg;
  try {
    cfg = tslab::load_experiment_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  const tslab::TeacherNetwork teacher = tslab::build_teacher(cfg);
  tslab::StudentNetwork s;
  if (algo == "random") {
    s = tslab::random_init(teacher, m, cfg.init.seed, cfg.init.sampled_gram);
  } else if (algo == "subspace") {
    s = tslab::subspace_init(teacher, m, cfg.r, cfg.init.subspace_samples, cfg.init.seed);
  } else {
    std::cerr << "unknown init algorithm: " << algo << " (expected random | subspace)\n";
    return 1;
  }
  tslab::write_network_json(s, out_path);
  std::cout << "loss=" << tslab::population_loss(teacher, s) << " out=" << out_path << "\n";
  return 0;
}

int run_kernel(const std::string& u_csv, const std::string& v_csv, std::int64_t mc_n,
               std::uint64_t seed) {
  const tslab::WeightVector u = parse_vector(u_csv);
  const tslab::WeightVector v = parse_vector(v_csv);
  if (u.size() != v.size()) {
    std::cerr << "dimension mismatch: u has " << u.size() << " entries, v has " << v.size()
              << "\n";
    return 1;
  }
  const int d = static_cast<int>(u.size());
  std::cout.precision(10);

  const double k = tslab::abs_pair_expectation(u, v);
  std::cout << "K(u,v)         " << k;
  if (mc_n > 0) {
    const tslab::MCEstimate mc = tslab::mc_estimate(
        [&](const Eigen::VectorXd& x) { return std::abs(u.dot(x)) * std::abs(v.dot(x)); }, d,
        mc_n, seed);
    std::cout << "   mc " << mc.mean << " +- " << mc.std_err << "  |gap|/sigma "
              << std::abs(k - mc.mean) / mc.std_err;
  }
  std::cout << "\n";

  const tslab::WeightVector g = tslab::abs_pair_gradient(u, v);
  std::cout << "G(u;v)         [";
  for (int i = 0; i < d; ++i) std::cout << (i ? ", " : "") << g[i];
  std::cout << "]\n";

  const Eigen::MatrixXd scov = tslab::sign_cov_block(u, v);
  std::cout << "Scov trace     " << scov.trace() << "\n";
  std::cout << "Scov(0,0)      " << scov(0, 0) << "\n";
  std::cout << "mismatch prob  " << tslab::mismatch_probability(u, v) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"teacher-student absolute-value network laboratory"};
  app.require_subcommand(1);

  std::string config_path, traj_path, svg_path, report_path, suite, algo, out_path, u_csv, v_csv;
  std::uint64_t seed = 0;
  std::int64_t mc_n = 0;
  int m = 0;
  int threads = 1;

  CLI::App* train = app.add_subcommand("train", "run a training experiment from a config");
  train->add_option("--config", config_path, "experiment config JSON")->required();
  train->add_option("--out-traj", traj_path, "trajectory CSV path");
  train->add_option("--svg", svg_path, "trajectory SVG path (d = 2 runs)");
  train->add_option("--threads", threads, "engine thread cap");

  CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("--suite", suite, "kernels | landscape | claims | init | sampling | all")
      ->required();
  verify->add_option("--report", report_path, "JSON report path");
  verify->add_option("--seed", seed, "suite seed");

  CLI::App* init = app.add_subcommand("init", "run an initialization algorithm");
  init->add_option("--algo", algo, "random | subspace")->required();
  init->add_option("--m", m, "number of student neurons")->required();
  init->add_option("--config", config_path, "experiment config JSON")->required();
  init->add_option("--out", out_path, "output network JSON")->required();

  CLI::App* kernel = app.add_subcommand("kernel", "print closed-form kernel values for a pair");
  kernel->add_option("--u", u_csv, "comma-separated vector")->required();
  kernel->add_option("--v", v_csv, "comma-separated vector")->required();
  kernel->add_option("--mc", mc_n, "cross-check sample count");
  kernel->add_option("--seed", seed, "MC seed");

  CLI11_PARSE(app, argc, argv);

  tslab::set_mc_threads(threads);
  try {
    if (*train) return run_train(config_path, traj_path, svg_path);
    if (*verify) return run_verify(suite, report_path, seed);
    if (*init) return run_init(algo, m, config_path, out_path);
    if (*kernel) return run_kernel(u_csv, v_csv, mc_n, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
