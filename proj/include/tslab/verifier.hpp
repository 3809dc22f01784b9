#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tslab/networks.hpp"
#include "tslab/trainer.hpp"

namespace tslab {

// Executable numerical checks for the landscape theorems, claims and
// algorithms. Nothing here asserts an asymptotic constant: each check pins a
// finite desk-scale inequality, records what it measured, and fails only on
// regression beyond twice the frozen calibration constant.

enum class CheckStatus { Pass, Fail, Inconclusive };

struct CheckReport {
  std::string name;
  CheckStatus status = CheckStatus::Fail;
  std::map<std::string, double> measured;
  std::string details;

  bool passed() const { return status == CheckStatus::Pass; }
};

std::string check_report_json(const std::vector<CheckReport>& reports);
const char* check_status_name(CheckStatus status);

// Desk-scale calibration constants. Frozen from the calibration run; checks
// fail on regression beyond 2x.
struct VerifierConfig {
  double low_loss_threshold = 1e-3;
  double kappa_floor = 1e-2;
  double descent_C = 1.0;
  double warmup_descent_C = 2.0;  // C = 1 leaves the warm-up family uncovered
  double neighbor_C = 2.0;
  double smoothness_C = 1.2;      // calibration measured 1.16
  double lipschitz_C = 8.0;       // calibration measured 7.7
  double m_floor_C = 0.5;         // calibration measured 0.80
  double r2_ratio_C = 0.25;       // calibration measured 0.13
  double weighted_angle_C = 0.6;  // calibration measured 0.51
  double test_function_floor = 0.02;
  double test_function_c1 = 0.3;
};

// --- landscape ---
CheckReport lojasiewicz_check(const TeacherNetwork& t, const std::vector<StudentNetwork>& states,
                              const VerifierConfig& cfg);
CheckReport descent_correlation_check(const TeacherNetwork& t,
                                      const std::vector<StudentNetwork>& states, double C,
                                      const VerifierConfig& cfg);
CheckReport smoothness_check(const TeacherNetwork& t, const std::vector<StudentNetwork>& states,
                             int n_directions, std::uint64_t seed, const VerifierConfig& cfg);
CheckReport lipschitz_check(const TeacherNetwork& t, const std::vector<StudentNetwork>& states,
                            const VerifierConfig& cfg);
CheckReport g_smoothness_check(int n_pairs, std::uint64_t seed);
CheckReport neighbor_and_mass_check(const TeacherNetwork& t,
                                    const std::vector<StudentNetwork>& states,
                                    const VerifierConfig& cfg);
CheckReport average_closeness_check(const TeacherNetwork& t, const Trajectory& trajectory);
CheckReport r2_and_weighted_angle_check(const TeacherNetwork& t, const Trajectory& trajectory,
                                        const VerifierConfig& cfg);
CheckReport test_function_check(std::uint64_t seed, const VerifierConfig& cfg);
CheckReport hermite_test_function_check(double eps, std::uint64_t seed);
CheckReport residual_identity_check(std::uint64_t seed);
CheckReport m_eigenvalue_floor_check(std::uint64_t seed, const VerifierConfig& cfg);

// --- claims ---
CheckReport warmup_cubic_check(std::uint64_t seed);
CheckReport relu_counterexample_check(std::uint64_t seed);

// --- sampling ---
CheckReport sample_concentration_check(std::uint64_t seed);
CheckReport sgd_consistency_check(std::uint64_t seed);
CheckReport gradient_unbiasedness_check(std::uint64_t seed);

// --- init ---
CheckReport nnls_oracle_check(int n_instances, std::uint64_t seed);
CheckReport random_init_quality_check(int n_seeds, std::uint64_t seed);
CheckReport random_init_monotone_check(std::uint64_t seed);
CheckReport init_loss_identity_check(std::uint64_t seed);
CheckReport moment_convergence_check(std::uint64_t seed);
CheckReport subspace_angle_check(std::uint64_t seed);

// --- kernels ---
CheckReport kernel_k_vs_mc_check(int pairs_per_dim, std::int64_t n, std::uint64_t seed);
CheckReport kernel_g_vs_mc_check(int pairs_per_dim, std::int64_t n, std::uint64_t seed);
CheckReport kernel_scov_vs_mc_check(int pairs_per_dim, std::int64_t n, std::uint64_t seed);
CheckReport mismatch_vs_mc_check(std::int64_t n, std::uint64_t seed);
CheckReport slab_bounds_check(std::int64_t n, std::uint64_t seed);
CheckReport owen_t_check(std::int64_t n, std::uint64_t seed);
CheckReport hermite_coeff_check();
CheckReport hermite_orthonormality_check(std::int64_t n, std::uint64_t seed);
CheckReport gram_psd_check(std::uint64_t seed);

// Brute-force NNLS oracle: enumerate all active sets, keep the feasible
// minimizer. Independent of the active-set solver it gates.
Eigen::VectorXd nnls_brute_force(const Eigen::MatrixXd& G, const Eigen::VectorXd& b);

std::vector<CheckReport> run_suite(const std::string& suite, std::uint64_t seed);
bool suite_known(const std::string& suite);

}  // namespace tslab
