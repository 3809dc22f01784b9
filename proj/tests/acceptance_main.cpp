// Acceptance suite: every criterion pinned here, one pass/fail line each.
// Exit status 0 iff all criteria pass.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "tslab/empirical.hpp"
#include "tslab/gauss_kernels.hpp"
#include "tslab/init_solvers.hpp"
#include "tslab/io.hpp"
#include "tslab/mc_oracle.hpp"
#include "tslab/population.hpp"
#include "tslab/rng.hpp"
#include "tslab/states.hpp"
#include "tslab/trainer.hpp"
#include "tslab/verifier.hpp"

using namespace tslab;

namespace {

constexpr double kPi = 3.14159265358979323846;

int g_failures = 0;

void line(int criterion, bool pass, const std::string& what) {
  std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": " << what
            << std::endl;
  if (!pass) ++g_failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

WeightVector random_vec(Rng& rng, int d) {
  WeightVector v(d);
  for (int i = 0; i < d; ++i) v[i] = rng.gaussian();
  return v;
}

// ---------------------------------------------------------------- criterion 1

// Each closed form is compared to scalar MC probes that span all of its
// structural degrees of freedom (K itself; G along u, in-plane normal, and an
// out-of-plane axis; Scov as bilinear forms over the in-plane block, the
// out-of-plane diagonal, and a vanishing cross term). Scalar probes carry
// their own standard error, keeping the family of 4-sigma comparisons small
// enough that the gate is not dominated by multiple-testing noise.
void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<int> dims = {2, 5, 20};
  double worst_k = 0.0, worst_g = 0.0, worst_s = 0.0;
  int idx = 0;
  for (int pair = 0; pair < 50; ++pair) {
    const int d = dims[pair % 3];
    Rng rng(derive_seed(101, pair));
    const WeightVector u = random_vec(rng, d);
    const WeightVector v = random_vec(rng, d);
    const WeightVector uh = u / u.norm();
    WeightVector p = v - uh.dot(v) * uh;  // in-plane normal
    p /= p.norm();

    const double k_exact = abs_pair_expectation(u, v);
    const WeightVector g_exact = abs_pair_gradient(u, v);
    const Eigen::MatrixXd s_exact = sign_cov_block(u, v);

    std::vector<WeightVector> g_probes = {uh, p};
    std::vector<std::pair<WeightVector, WeightVector>> s_probes = {{uh, uh}, {uh, p}, {p, p}};
    if (d > 2) {
      WeightVector q1 = random_vec(rng, d), q2 = random_vec(rng, d);
      q1 -= uh.dot(q1) * uh;
      q1 -= p.dot(q1) * p;
      q1 /= q1.norm();
      q2 -= uh.dot(q2) * uh;
      q2 -= p.dot(q2) * p;
      q2 -= q1.dot(q2) * q1;
      q2 /= q2.norm();
      g_probes.push_back(q1);
      s_probes.push_back({q1, q1});  // out-of-plane diagonal c_out
      s_probes.push_back({q1, q2});  // vanishing cross term
    }

    // all probes for the pair share one 1e6-sample stream
    const int n_out = 1 + static_cast<int>(g_probes.size() + s_probes.size());
    const MCVectorEstimate mc = mc_estimate_vector(
        [&](const Eigen::VectorXd& x, Eigen::VectorXd& out) {
          const double ux = u.dot(x);
          const double vx = v.dot(x);
          const double su = ux > 0 ? 1.0 : (ux < 0 ? -1.0 : 0.0);
          const double sv = vx > 0 ? 1.0 : (vx < 0 ? -1.0 : 0.0);
          int e = 0;
          out[e++] = std::abs(ux) * std::abs(vx);
          for (const auto& b : g_probes) out[e++] = su * std::abs(vx) * b.dot(x);
          for (const auto& [a, b] : s_probes) out[e++] = su * sv * a.dot(x) * b.dot(x);
        },
        d, n_out, 1000000, derive_seed(102, idx));

    int e = 0;
    worst_k = std::max(worst_k, std::abs(k_exact - mc.mean[e]) / mc.std_err[e]);
    ++e;
    for (const auto& b : g_probes) {
      worst_g = std::max(worst_g, std::abs(b.dot(g_exact) - mc.mean[e]) / mc.std_err[e]);
      ++e;
    }
    for (const auto& [a, b] : s_probes) {
      worst_s = std::max(worst_s, std::abs(a.dot(s_exact * b) - mc.mean[e]) / mc.std_err[e]);
      ++e;
    }
    ++idx;
  }
  const double secs = seconds_since(t0);
  std::ostringstream what;
  what << "kernel exactness vs MC at 1e6 samples, 50 pairs each over d in {2,5,20}: "
       << "max |gap|/sigma K " << worst_k << ", G " << worst_g << ", Scov " << worst_s << " (<= 4), "
       << std::fixed << std::setprecision(1) << secs << " s (< 120)";
  line(1, worst_k <= 4.0 && worst_g <= 4.0 && worst_s <= 4.0 && secs < 120.0, what.str());
}

// ---------------------------------------------------------------- criterion 2

void criterion_2() {
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    Rng rng(derive_seed(200, rep));
    const int d = 2 + static_cast<int>(rng.next_u64() % 9);    // <= 10
    const int rr = 1 + static_cast<int>(rng.next_u64() % 4);   // <= 4
    const int m = rr + static_cast<int>(rng.next_u64() % (21 - rr));
    const TeacherNetwork t = random_teacher(d, rr, 0.2, 0.6, 1.4, derive_seed(201, rep));
    StudentNetwork s;
    for (int j = 0; j < m; ++j) {
      WeightVector w = random_vec(rng, d);
      while (w.norm() < 0.3) w = random_vec(rng, d);
      s.neurons.push_back(w);
    }
    const auto grad = population_gradient(t, s);
    const double h = 1e-5;
    double num = 0.0, den = 0.0;
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < d; ++i) {
        StudentNetwork up = s, dn = s;
        up.neurons[j][i] += h;
        dn.neurons[j][i] -= h;
        const double fd = (population_loss(t, up) - population_loss(t, dn)) / (2 * h);
        num += (grad[j][i] - fd) * (grad[j][i] - fd);
        den += grad[j][i] * grad[j][i];
      }
    }
    worst = std::max(worst, std::sqrt(num / den));
  }
  std::ostringstream what;
  what << "analytic gradient vs central differences (h = 1e-5) on 20 random states: "
       << "max rel err " << worst << " (<= 1e-5)";
  line(2, worst <= 1e-5, what.str());
}

// ---------------------------------------------------------------- criterion 3

void criterion_3() {
  const CheckReport r = warmup_cubic_check(derive_seed(300, 1));
  std::ostringstream what;
  what << "warm-up loss is Theta(delta^3): L/delta^3 spread "
       << r.measured.at("ratio_max_over_min") << " (<= 2), R1 <= 1e-15 on each configuration";
  line(3, r.passed(), what.str());
}

// ------------------------------------------------------- criteria 4, 5, 13(b)

struct MainRunStats {
  bool monotone = true;
  std::int64_t first_step_below_1e8 = -1;
  double sup_t_loss = 0.0;
  double max_survivor_angle = 0.0;
  double min_loja_ratio = std::numeric_limits<double>::infinity();
  double final_loss = 0.0;
};

MainRunStats run_main_experiment(std::uint64_t seed, bool record_weights,
                                 Trajectory* traj_out, TeacherNetwork* teacher_out) {
  const TeacherNetwork t = random_teacher(2, 3, 0.5, 1.0, 1.0, derive_seed(400, seed));
  // perturbed-teacher init: angle scale pinned at 3e-4 (the angular tail
  // contracts like 1/t and forgets its start, so the 1e6-step budget bounds
  // the admissible initial spread), mass noise tuned until L0 <= 1e-3
  double mass_scale = 0.4;
  StudentNetwork s0 = make_perturbed_state(t, 20, 3e-4, mass_scale, derive_seed(401, seed));
  while (population_loss(t, s0) > 1e-3) {
    mass_scale *= 0.7;
    s0 = make_perturbed_state(t, 20, 3e-4, mass_scale, derive_seed(401, seed));
  }
  TrainConfig cfg;
  cfg.eta = 0.01 / (3.0 * 1.0);  // 0.01 / (r w_max)
  cfg.max_steps = 1000000;
  cfg.target_loss = 1e-12;
  cfg.record_every = record_weights ? 1000 : 1;
  cfg.record_weights = record_weights;
  const TrainResult result = train(t, s0, cfg);

  MainRunStats stats;
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& snap : result.trajectory.snapshots) {
    if (snap.loss > prev + 1e-12) stats.monotone = false;
    prev = snap.loss;
    if (stats.first_step_below_1e8 < 0 && snap.loss <= 1e-8) {
      stats.first_step_below_1e8 = snap.step;
    }
    stats.sup_t_loss = std::max(stats.sup_t_loss, static_cast<double>(snap.step) * snap.loss);
    if (snap.loss > 0.0 && snap.loss <= 1e-3) {
      stats.min_loja_ratio = std::min(stats.min_loja_ratio, snap.grad_norm / snap.loss);
    }
  }
  const NeuronPartition part = partition_students(t, result.final_state);
  for (int j = 0; j < result.final_state.m(); ++j) {
    if (result.final_state.neurons[j].norm() > 1e-4) {
      stats.max_survivor_angle = std::max(stats.max_survivor_angle, part.angles[j]);
    }
  }
  stats.final_loss = result.trajectory.final_loss;
  if (traj_out) *traj_out = result.trajectory;
  if (teacher_out) *teacher_out = t;
  return stats;
}

double g_min_loja_ratio_runs = std::numeric_limits<double>::infinity();

void criteria_4_and_5() {
  const auto t0 = std::chrono::steady_clock::now();
  bool all_ok = true;
  std::int64_t worst_first_step = 0;
  double worst_angle = 0.0, worst_sup = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MainRunStats stats = run_main_experiment(seed, false, nullptr, nullptr);
    const bool ok = stats.monotone && stats.first_step_below_1e8 >= 0 &&
                    stats.first_step_below_1e8 <= 1000000 &&
                    std::isfinite(stats.sup_t_loss) && stats.max_survivor_angle <= 1e-3;
    all_ok = all_ok && ok;
    worst_first_step = std::max(worst_first_step, stats.first_step_below_1e8);
    worst_angle = std::max(worst_angle, stats.max_survivor_angle);
    worst_sup = std::max(worst_sup, stats.sup_t_loss);
    g_min_loja_ratio_runs = std::min(g_min_loja_ratio_runs, stats.min_loja_ratio);
  }
  const double secs = seconds_since(t0);
  std::ostringstream what;
  what << "main convergence (d=2, r=3, m=20, eta=0.01/(r w_max)), 10/10 seeds: monotone, "
       << "loss <= 1e-8 by step " << worst_first_step << " (<= 1e6), sup t*L = " << worst_sup
       << " (finite), max survivor angle " << worst_angle << " rad (<= 1e-3), " << std::fixed
       << std::setprecision(1) << secs << " s (< 300)";
  line(4, all_ok && secs < 300.0, what.str());

  // criterion 5: Lojasiewicz along the criterion-4 runs plus warm-up states
  double warm_min = std::numeric_limits<double>::infinity();
  VerifierConfig vcfg;
  for (const double delta : {0.15, 0.1, 0.05, 0.025}) {
    const WarmupState ws = make_warmup_state(delta);
    const double loss = population_loss(ws.teacher, ws.student);
    if (loss > 1e-3 || loss <= 0.0) continue;
    const double gnorm = gradient_frobenius_norm(population_gradient(ws.teacher, ws.student));
    warm_min = std::min(warm_min, gnorm / loss);
  }
  const double overall = std::min(g_min_loja_ratio_runs, warm_min);
  std::ostringstream what5;
  what5 << "Lojasiewicz |grad|_F / L once L <= 1e-3: min over runs " << g_min_loja_ratio_runs
        << ", warm-up states " << warm_min << " (>= " << vcfg.kappa_floor << ")";
  line(5, overall >= vcfg.kappa_floor, what5.str());
}

// ---------------------------------------------------------------- criterion 6

void criterion_6() {
  VerifierConfig vcfg;
  int used = 0, violations = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  // perturbed states over several teachers
  for (std::uint64_t ts = 0; ts < 4; ++ts) {
    const TeacherNetwork t = random_teacher(2, 3, 0.5, 1.0, 1.0, derive_seed(600, ts));
    for (int k = 0; k < 20; ++k) {
      const double scale = 0.004 + 0.004 * (k % 5);
      const StudentNetwork s =
          make_perturbed_state(t, 6, scale, scale, derive_seed(601, 100 * ts + k));
      const double loss = population_loss(t, s);
      if (loss <= 0.0 || loss > 1e-3) continue;
      const NeuronPartition part = partition_students(t, s);
      std::vector<WeightVector> g;
      try {
        g = descent_direction(t, s, part, loss, vcfg.descent_C);
      } catch (const CoverageError&) {
        continue;
      }
      const auto grad = population_gradient(t, s);
      double inner = 0.0;
      for (int j = 0; j < s.m(); ++j) inner += grad[j].dot(g[j]);
      ++used;
      min_margin = std::min(min_margin, inner - loss);
      if (inner < loss) ++violations;
    }
  }
  // warm-up family with the covering constant
  for (const double delta : {0.15, 0.12, 0.1, 0.08, 0.05, 0.025}) {
    const WarmupState ws = make_warmup_state(delta);
    const double loss = population_loss(ws.teacher, ws.student);
    if (loss > 1e-3) continue;
    const NeuronPartition part = partition_students(ws.teacher, ws.student);
    const auto g = descent_direction(ws.teacher, ws.student, part, loss, vcfg.warmup_descent_C);
    const auto grad = population_gradient(ws.teacher, ws.student);
    double inner = 0.0;
    for (int j = 0; j < 2; ++j) inner += grad[j].dot(g[j]);
    ++used;
    min_margin = std::min(min_margin, inner - loss);
    if (inner < loss) ++violations;
  }
  std::ostringstream what;
  what << "descent direction <grad L, g> >= L on " << used
       << " low-loss states (>= 60), violations " << violations << ", min margin " << min_margin;
  line(6, used >= 60 && violations == 0, what.str());
}

// ---------------------------------------------------------------- criterion 7

void criterion_7() {
  const HermiteCoefficients hc = hermite_abs_coeffs(40);
  const bool sigma_ok = std::abs(hc.coeffs[0] - std::sqrt(2.0 / kPi)) <= 1e-12 &&
                        std::abs(hc.coeffs[2] - 1.0 / std::sqrt(kPi)) <= 1e-12 &&
                        std::abs(hc.coeffs[4] + std::sqrt(2.0 / (24.0 * kPi))) <= 1e-12;
  double series_err = 0.0;
  for (double x = -3.0; x <= 3.0; x += 0.002) {
    double sum = 0.0;
    for (int k = 0; k <= 40; k += 2) sum += hc.coeffs[k] * hermite_value(k, x);
    series_err = std::max(series_err, std::abs(sum - std::abs(x)));
  }
  const CheckReport ortho = hermite_orthonormality_check(200000, derive_seed(700, 1));
  std::ostringstream what;
  what << "Hermite layer: sigma_0/2/4 exact to 1e-12 " << (sigma_ok ? "yes" : "NO")
       << "; 40-term series max err " << series_err
       << " (<= 0.02 is unattainable: at the kink the k > 40 tail terms share one sign and sum "
          "to (2/pi) sum k^-3/2 = 0.0998, Theta(L^-1/2), so 0.02 needs L ~ 1024); "
       << "orthonormality max |gap|/sigma " << ortho.measured.at("worst_gap_over_sigma")
       << " (<= 4)";
  line(7, sigma_ok && series_err <= 0.02 && ortho.passed(), what.str());
}

// ---------------------------------------------------------------- criterion 8

void criterion_8() {
  double worst_r1 = 0.0, worst_total = 0.0;
  for (int rep = 0; rep < 30; ++rep) {
    Rng rng(derive_seed(800, rep));
    const int d = 2 + static_cast<int>(rng.next_u64() % 4);
    const int rr = 1 + rep % 3;
    const TeacherNetwork t = random_teacher(d, rr, 0.3, 0.6, 1.5, derive_seed(801, rep));
    StudentNetwork s;
    const int m = 2 * rr;
    for (int j = 0; j < m; ++j) {
      WeightVector w = random_vec(rng, d);
      while (w.norm() < 0.2) w = random_vec(rng, d);
      s.neurons.push_back(0.8 * w);
    }
    const NeuronPartition part = partition_students(t, s);
    const ResidualStats stats = residual_stats(t, s, part);
    // route A: per-pair compensated sums inside residual_stats
    // route B: the assembled dr x dr matrix
    const HessianSurrogate hess = build_M(t);
    Eigen::VectorXd v(d * rr);
    for (int i = 0; i < rr; ++i) v.segment(i * d, d) = stats.gaps[i];
    const double via_matrix = v.dot(hess.M * v);
    worst_r1 = std::max(worst_r1, std::abs(stats.r1_norm_sq - via_matrix) /
                                      std::max(via_matrix, 1e-12));
    const double total = stats.r1_norm_sq + 2.0 * stats.cross_term + stats.r2_norm_sq;
    worst_total = std::max(worst_total,
                           std::abs(total - 2.0 * stats.loss) / std::max(2.0 * stats.loss, 1e-12));
  }

  TeacherNetwork single;
  WeightVector w(3);
  w << 0.2, -1.1, 0.4;
  single.neurons = {w};
  const double m_identity_gap =
      (build_M(single).M - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff();

  TeacherNetwork ortho;
  WeightVector e1 = WeightVector::Zero(2), e2 = WeightVector::Zero(2);
  e1[0] = 1.0;
  e2[1] = 1.0;
  ortho.neurons = {e1, e2};
  const double lam_gap = std::abs(build_M(ortho).min_eigenvalue - (1.0 - 2.0 / kPi));

  std::ostringstream what;
  what << "exact identities on 30 random states: |R1|^2 = v'Mv rel gap " << worst_r1
       << ", |R|^2 = 2L rel gap " << worst_total << " (<= 1e-8); r=1 M=I gap " << m_identity_gap
       << "; r=2 orthogonal lambda_min gap " << lam_gap << " (<= 1e-8)";
  line(8, worst_r1 <= 1e-8 && worst_total <= 1e-8 && m_identity_gap == 0.0 && lam_gap <= 1e-8,
       what.str());
}

// ---------------------------------------------------------------- criterion 9

void criterion_9() {
  const CheckReport r = g_smoothness_check(10000, derive_seed(900, 1));
  std::ostringstream what;
  what << "(1+sqrt 3)-smoothness of |w|w over 10^4 pairs incl. near-zero/near-collinear: "
       << "violations " << r.measured.at("violations") << ", worst ratio "
       << r.measured.at("worst_ratio") << " (bound " << r.measured.at("bound") << ")";
  line(9, r.passed(), what.str());
}

// --------------------------------------------------------------- criterion 10

void criterion_10() {
  // Algorithm 1 quality at d=2, r=3, m=200
  int good = 0;
  double worst_loss = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TeacherNetwork t = random_teacher(2, 3, 0.5, 1.0, 1.0, derive_seed(1000, seed));
    const StudentNetwork s = random_init(t, 200, derive_seed(1001, seed));
    const double loss = population_loss(t, s);
    worst_loss = std::max(worst_loss, loss);
    if (loss <= 1e-2) ++good;
  }

  // Algorithm 2 subspace angle at d=20, r=3, N=1e5 (orthogonal unit teachers)
  TeacherNetwork t20;
  for (int i = 0; i < 3; ++i) {
    WeightVector w = WeightVector::Zero(20);
    w[i] = 1.0;
    t20.neurons.push_back(w);
  }
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(20, 3);
  for (int i = 0; i < 3; ++i) basis(i, i) = 1.0;
  double worst_angle = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Dataset data = sample_dataset(t20, 100000, derive_seed(1002, seed));
    data.labels.array() -= data.labels.mean();
    const Eigen::MatrixXd Q = top_eigenvectors(moment_matrix(data).M_hat, 3);
    worst_angle = std::max(worst_angle, largest_principal_angle(basis, Q));
  }

  const CheckReport oracle = nnls_oracle_check(100, derive_seed(1003, 1));

  std::ostringstream what;
  what << "initialization: Algorithm 1 (d=2, r=3, m=200) loss <= 1e-2 in " << good
       << "/20 seeds (>= 18, worst " << worst_loss << "); Algorithm 2 subspace angle "
       << worst_angle << " rad (<= 0.05, 5 seeds); NNLS vs 2^5 brute force on 100 instances "
       << (oracle.passed() ? "exact" : "mismatch");
  line(10, good >= 18 && worst_angle <= 0.05 && oracle.passed(), what.str());
}

// --------------------------------------------------------------- criterion 11

void criterion_11() {
  const CheckReport slope_check = sample_concentration_check(derive_seed(1100, 1));
  const double slope = slope_check.measured.at("slope");

  // SGD with fresh batches of 4096 on the criterion-4 problem, from a start
  // above the target so the descent is nontrivial
  int good = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const TeacherNetwork t = random_teacher(2, 3, 0.5, 1.0, 1.0, derive_seed(1101, seed));
    double scale = 0.08;
    StudentNetwork s0 = make_perturbed_state(t, 20, scale, scale, derive_seed(1102, seed));
    while (population_loss(t, s0) > 1e-2) {
      scale *= 0.8;
      s0 = make_perturbed_state(t, 20, scale, scale, derive_seed(1102, seed));
    }
    TrainConfig cfg;
    cfg.mode = TrainMode::SGD;
    cfg.batch = 4096;
    cfg.eta = 0.01 / 3.0;
    cfg.max_steps = 30000;
    cfg.target_loss = 1e-3;
    cfg.seed = derive_seed(1103, seed);
    cfg.record_every = 0;
    const TrainResult result = train(t, s0, cfg);
    if (result.trajectory.reason == StopReason::TargetReached) ++good;
  }

  std::ostringstream what;
  what << "concentration: log-log slope of median |grad Lhat - grad L|_F = " << slope
       << " (-1/2 +/- 0.1); SGD with fresh N=4096 batches reached L <= 1e-3 in " << good
       << "/10 seeds (>= 8)";
  line(11, slope_check.passed() && good >= 8, what.str());
}

// --------------------------------------------------------------- criterion 12

void criterion_12() {
  const CheckReport r = relu_counterexample_check(derive_seed(1200, 1));
  std::ostringstream what;
  what << "ReLU counterexample: MC loss " << r.measured.at("relu_mse")
       << " (within 4 sigma of 0), min sign-sensitive angle "
       << r.measured.at("min_signed_angle_deg") << " deg (>= 59); abs-activation student vs the "
       << "same ReLU teacher: loss " << r.measured.at("abs_vs_relu_teacher_loss") << " (> 0.1)";
  line(12, r.passed(), what.str());
}

// --------------------------------------------------------------- criterion 13

void criterion_13() {
  namespace fs = std::filesystem;
  fs::create_directories("acceptance_artifacts");

  // (a) lazy regime: large norms, step size resolving the stiff mass mode,
  // run to a 100x loss reduction
  double worst_rot = 0.0;
  bool lazy_ok = true;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const TeacherNetwork t = random_teacher(2, 3, 0.5, 1.0, 1.0, derive_seed(1300, seed));
    Rng rng(derive_seed(1301, seed));
    StudentNetwork s;
    std::vector<WeightVector> dirs0;
    for (int j = 0; j < 20; ++j) {
      WeightVector w = random_vec(rng, 2);
      w *= 10.0 / w.norm();
      s.neurons.push_back(w);
      dirs0.push_back(w / w.norm());
    }
    PopulationEngine engine(t);
    Eigen::MatrixXd grad;
    const double eta = 3e-6;
    const double L0 = engine.loss(s);
    Trajectory traj;
    Eigen::MatrixXd W(2, 20);
    for (long step = 0; step < 20000; ++step) {
      const double loss = engine.loss_and_gradient(s, grad);
      if (step % 10 == 0) {
        traj.snapshots.push_back({step, loss, grad.norm()});
        for (int j = 0; j < 20; ++j) W.col(j) = s.neurons[j];
        traj.weights.push_back(W);
      }
      if (loss <= 0.01 * L0) break;
      for (int j = 0; j < 20; ++j) s.neurons[j] -= eta * grad.col(j);
    }
    double rot = 0.0;
    for (int j = 0; j < 20; ++j) rot = std::max(rot, angle_signed(s.neurons[j], dirs0[j]));
    worst_rot = std::max(worst_rot, rot);
    lazy_ok = lazy_ok && rot <= 0.1;
    if (seed == 0) write_trajectory_svg(t, traj, "acceptance_artifacts/regime_lazy.svg");
  }

  // (b) low-loss init: the criterion-4 experiment with weights recorded
  Trajectory traj;
  TeacherNetwork teacher;
  const MainRunStats stats = run_main_experiment(0, true, &traj, &teacher);
  write_trajectory_svg(teacher, traj, "acceptance_artifacts/regime_aligned.svg");

  const bool svgs = fs::exists("acceptance_artifacts/regime_lazy.svg") &&
                    fs::file_size("acceptance_artifacts/regime_lazy.svg") > 0 &&
                    fs::exists("acceptance_artifacts/regime_aligned.svg") &&
                    fs::file_size("acceptance_artifacts/regime_aligned.svg") > 0;

  std::ostringstream what;
  what << "regimes (d=2, r=3, m=20): lazy large-norm init max direction change " << worst_rot
       << " rad (<= 0.1, 5 seeds); low-loss init max heavy-neuron angle "
       << stats.max_survivor_angle << " rad (<= 1e-3); SVGs "
       << (svgs ? "emitted" : "missing");
  line(13, lazy_ok && stats.max_survivor_angle <= 1e-3 && svgs, what.str());
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  criterion_1();
  criterion_2();
  criterion_3();
  criteria_4_and_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  criterion_12();
  criterion_13();
  std::cout << (g_failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED") << " ("
            << g_failures << " failing criteria, " << std::fixed << std::setprecision(1)
            << seconds_since(t0) << " s total)" << std::endl;
  return g_failures == 0 ? 0 : 1;
}
