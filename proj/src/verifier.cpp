#include "tslab/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "tslab/empirical.hpp"
#include "tslab/gauss_kernels.hpp"
#include "tslab/init_solvers.hpp"
#include "tslab/mc_oracle.hpp"
#include "tslab/population.hpp"
#include "tslab/rng.hpp"
#include "tslab/states.hpp"

namespace tslab {

namespace {

constexpr double kPi = 3.14159265358979323846;

CheckReport report(const std::string& name) {
  CheckReport r;
  r.name = name;
  r.status = CheckStatus::Pass;
  return r;
}

void fail_if(CheckReport& r, bool bad, const std::string& why) {
  if (bad) {
    r.status = CheckStatus::Fail;
    if (!r.details.empty()) r.details += "; ";
    r.details += why;
  }
}

WeightVector random_vector(Rng& rng, int d, double scale = 1.0) {
  WeightVector v(d);
  for (int k = 0; k < d; ++k) v[k] = scale * rng.gaussian();
  return v;
}

WeightVector random_unit(Rng& rng, int d) {
  WeightVector v = random_vector(rng, d);
  while (v.norm() < 1e-8) v = random_vector(rng, d);
  return v / v.norm();
}

// wild state with bounded loss: random directions, masses shrunk until the
// loss is inside the lemma's O(r^2 w_max^2) regime
StudentNetwork make_bounded_state(const TeacherNetwork& t, int m, std::uint64_t seed,
                                  double loss_cap) {
  Rng rng(seed);
  StudentNetwork s;
  s.neurons.resize(m);
  for (int j = 0; j < m; ++j) {
    const double mass = 0.1 + 1.4 * rng.uniform();
    s.neurons[j] = std::sqrt(mass) * random_unit(rng, t.dim());
  }
  for (int guard = 0; guard < 60 && population_loss(t, s) > loss_cap; ++guard) {
    for (auto& w : s.neurons) w *= std::sqrt(0.8);
  }
  return s;
}

double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  return num / den;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double frobenius_inner(const std::vector<WeightVector>& a, const std::vector<WeightVector>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j].dot(b[j]);
  return s;
}

std::vector<StudentNetwork> landscape_states(const TeacherNetwork& t, int count,
                                             std::uint64_t seed) {
  std::vector<StudentNetwork> states;
  for (int k = 0; k < count; ++k) {
    const double scale = 0.01 + 0.03 * (k % 4);
    states.push_back(make_perturbed_state(t, 2 * t.r(), scale, scale, derive_seed(seed, k)));
  }
  return states;
}

}  // namespace

const char* check_status_name(CheckStatus status) {
  switch (status) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

std::string check_report_json(const std::vector<CheckReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json item;
    item["name"] = r.name;
    item["status"] = check_status_name(r.status);
    item["measured"] = r.measured;
    item["details"] = r.details;
    arr.push_back(item);
  }
  return arr.dump(2);
}

// ---------------------------------------------------------------- landscape

CheckReport lojasiewicz_check(const TeacherNetwork& t, const std::vector<StudentNetwork>& states,
                              const VerifierConfig& cfg) {
  CheckReport r = report("lojasiewicz_gradient_lower_bound");
  double min_ratio = std::numeric_limits<double>::infinity();
  int used = 0, skipped = 0;
  for (const auto& s : states) {
    const double loss = population_loss(t, s);
    if (loss <= 0.0) {
      ++skipped;  // ratio undefined at an exact optimum, vacuously satisfied
      continue;
    }
    if (loss > cfg.low_loss_threshold) {
      ++skipped;
      continue;
    }
    const double gnorm = gradient_frobenius_norm(population_gradient(t, s));
    min_ratio = std::min(min_ratio, gnorm / loss);
    ++used;
  }
  r.measured["min_ratio"] = used > 0 ? min_ratio : 0.0;
  r.measured["states_used"] = used;
  r.measured["states_skipped"] = skipped;
  r.measured["kappa_floor"] = cfg.kappa_floor;
  if (used == 0) {
    r.status = CheckStatus::Inconclusive;
    r.details = "no state below the low-loss threshold";
    return r;
  }
  fail_if(r, min_ratio < cfg.kappa_floor, "gradient/loss ratio under the configured floor");
  return r;
}

CheckReport descent_correlation_check(const TeacherNetwork& t,
                                      const std::vector<StudentNetwork>& states, double C,
                                      const VerifierConfig& cfg) {
  CheckReport r = report("descent_direction_correlation");
  int used = 0, skipped = 0, uncovered = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  for (const auto& s : states) {
    const double loss = population_loss(t, s);
    if (loss <= 0.0 || loss > cfg.low_loss_threshold) {
      ++skipped;
      continue;
    }
    const NeuronPartition part = partition_students(t, s);
    try {
      const auto g = descent_direction(t, s, part, loss, C);
      const double inner = frobenius_inner(population_gradient(t, s), g);
      min_margin = std::min(min_margin, inner - loss);
      fail_if(r, inner < loss, "inner product below the loss");
      ++used;
    } catch (const CoverageError&) {
      ++uncovered;
    }
  }
  r.measured["states_used"] = used;
  r.measured["states_uncovered"] = uncovered;
  r.measured["states_skipped"] = skipped;
  r.measured["min_margin"] = used > 0 ? min_margin : 0.0;
  r.measured["C"] = C;
  if (used == 0) {
    r.status = CheckStatus::Inconclusive;
    r.details = uncovered > 0 ? "delta_max excluded a teacher on every state" : "no usable state";
  }
  return r;
}

CheckReport smoothness_check(const TeacherNetwork& t, const std::vector<StudentNetwork>& states,
                             int n_directions, std::uint64_t seed, const VerifierConfig& cfg) {
  CheckReport r = report("loss_smoothness");
  const SeparationStats st = separation(t);
  const double rw = t.r() * st.w_max;
  Rng rng(derive_seed(seed, 17));
  double worst = 0.0;
  for (const auto& s : states) {
    const double loss = population_loss(t, s);
    const auto grad = population_gradient(t, s);
    for (int k = 0; k < n_directions; ++k) {
      std::vector<WeightVector> dir(s.m());
      double norm_sq = 0.0;
      for (int j = 0; j < s.m(); ++j) {
        dir[j] = random_vector(rng, t.dim());
        norm_sq += dir[j].squaredNorm();
      }
      const double norm = std::sqrt(norm_sq);
      for (const double target : {1e-3, 1e-2, 1e-1, 0.3, 1.0}) {
        StudentNetwork moved = s;
        double inner = 0.0;
        for (int j = 0; j < s.m(); ++j) {
          moved.neurons[j] += target / norm * dir[j];
          inner += grad[j].dot(target / norm * dir[j]);
        }
        const double excess = population_loss(t, moved) - loss - inner;
        const double bound = std::pow(rw, 0.25) * std::sqrt(loss) * std::pow(target, 1.5) +
                             rw * target * target + std::pow(target, 4.0);
        worst = std::max(worst, excess / bound);
      }
    }
  }
  r.measured["fitted_C"] = worst;
  r.measured["frozen_C"] = cfg.smoothness_C;
  fail_if(r, worst > 2.0 * cfg.smoothness_C, "smoothness constant regressed beyond 2x frozen");
  return r;
}

CheckReport lipschitz_check(const TeacherNetwork& t, const std::vector<StudentNetwork>& states,
                            const VerifierConfig& cfg) {
  CheckReport r = report("gradient_lipschitz_bound");
  const SeparationStats st = separation(t);
  const double scale = std::pow(t.r() * st.w_max, 3.0);
  double worst = 0.0;
  for (const auto& s : states) {
    const double g2 = std::pow(gradient_frobenius_norm(population_gradient(t, s)), 2.0);
    worst = std::max(worst, g2 / scale);
  }
  r.measured["fitted_C"] = worst;
  r.measured["frozen_C"] = cfg.lipschitz_C;
  fail_if(r, worst > 2.0 * cfg.lipschitz_C, "Lipschitz constant regressed beyond 2x frozen");
  return r;
}

CheckReport g_smoothness_check(int n_pairs, std::uint64_t seed) {
  CheckReport r = report("effective_map_smoothness");
  const double bound = 1.0 + std::sqrt(3.0);
  Rng rng(seed);
  auto jacobian = [](const WeightVector& w) {
    const int d = static_cast<int>(w.size());
    const double n = w.norm();
    if (n == 0.0) return Eigen::MatrixXd::Zero(d, d).eval();
    const WeightVector u = w / n;
    return (n * (Eigen::MatrixXd::Identity(d, d) + u * u.transpose())).eval();
  };
  int violations = 0;
  double worst = 0.0;
  auto probe = [&](const WeightVector& w, const WeightVector& u) {
    const double un = u.norm();
    if (un == 0.0) return;
    const double lhs = (jacobian(w + u) - jacobian(w)).norm();
    worst = std::max(worst, lhs / un);
    if (lhs > bound * un + 1e-12) ++violations;
  };
  for (int k = 0; k < n_pairs; ++k) {
    const int d = 2 + static_cast<int>(rng.next_u64() % 3);  // Frobenius bound needs d <= 4
    const double wscale = std::pow(10.0, -6.0 + 7.0 * rng.uniform());
    const double uscale = std::pow(10.0, -6.0 + 7.0 * rng.uniform());
    const WeightVector w = wscale * random_unit(rng, d);
    switch (k % 5) {
      case 0: probe(w, uscale * random_unit(rng, d)); break;
      case 1: probe(WeightVector::Zero(d), uscale * random_unit(rng, d)); break;          // kink
      case 2: probe(w, -w * (1.0 + 1e-9)); break;                                         // through zero
      case 3: probe(w, uscale * (w / w.norm())); break;                                   // collinear
      case 4: probe(w, uscale * (w / w.norm()) + 1e-9 * random_unit(rng, d)); break;      // near-collinear
    }
  }
  r.measured["violations"] = violations;
  r.measured["worst_ratio"] = worst;
  r.measured["bound"] = bound;
  fail_if(r, violations > 0, "smoothness bound violated");
  return r;
}

CheckReport neighbor_and_mass_check(const TeacherNetwork& t,
                                    const std::vector<StudentNetwork>& states,
                                    const VerifierConfig& cfg) {
  CheckReport r = report("neighbor_and_mass");
  int used = 0, skipped = 0;
  double min_mass_ratio = std::numeric_limits<double>::infinity();
  for (const auto& s : states) {
    const double loss = population_loss(t, s);
    if (loss <= 0.0 || loss > cfg.low_loss_threshold) {
      ++skipped;
      continue;
    }
    const double dmax = delta_max(loss, t, cfg.neighbor_C);
    const NeuronPartition part = partition_students(t, s);
    std::vector<double> mass(t.r(), 0.0);
    std::vector<int> count(t.r(), 0);
    for (int j = 0; j < s.m(); ++j) {
      const double n = s.neurons[j].norm();
      if (n > 0.0 && part.angles[j] <= dmax) {
        mass[part.assignment[j]] += n * n;
        ++count[part.assignment[j]];
      }
    }
    for (int i = 0; i < t.r(); ++i) {
      fail_if(r, count[i] < 1, "teacher " + std::to_string(i) + " uncovered at delta_max");
      const double ratio = mass[i] / t.neurons[i].norm();
      min_mass_ratio = std::min(min_mass_ratio, ratio);
      fail_if(r, ratio < 0.5, "mass below half the teacher norm");
    }
    ++used;
  }
  r.measured["states_used"] = used;
  r.measured["states_skipped"] = skipped;
  r.measured["min_mass_ratio"] = used > 0 ? min_mass_ratio : 0.0;
  r.measured["C"] = cfg.neighbor_C;
  if (used == 0) {
    r.status = CheckStatus::Inconclusive;
    r.details = "no state below the low-loss threshold";
  }
  return r;
}

CheckReport average_closeness_check(const TeacherNetwork& t, const Trajectory& trajectory) {
  CheckReport r = report("average_student_close_to_teacher");
  if (trajectory.weights.empty()) {
    r.status = CheckStatus::Inconclusive;
    r.details = "trajectory has no recorded weights";
    return r;
  }
  const double floor = trajectory.final_loss;
  std::vector<double> log_loss, log_gap;
  for (std::size_t k = 0; k < trajectory.snapshots.size(); ++k) {
    const double loss = trajectory.snapshots[k].loss;
    if (loss <= 0.0 || loss > 10.0 * std::max(floor, 1e-300) || loss < floor) continue;
    StudentNetwork s;
    s.neurons.resize(static_cast<int>(trajectory.weights[k].cols()));
    for (int j = 0; j < trajectory.weights[k].cols(); ++j) {
      s.neurons[j] = trajectory.weights[k].col(j);
    }
    const ResidualStats stats = residual_stats(t, s, partition_students(t, s));
    double vmax = 0.0;
    for (const auto& v : stats.gaps) vmax = std::max(vmax, v.norm());
    if (vmax < 1e-13) continue;  // warm-up-like family: v identically zero
    log_loss.push_back(std::log(loss));
    log_gap.push_back(std::log(vmax));
  }
  r.measured["points"] = static_cast<double>(log_loss.size());
  if (log_loss.size() < 4) {
    r.status = CheckStatus::Pass;
    r.details = "degenerate-pass: gaps at numerical zero over the final decade";
    r.measured["slope"] = 0.0;
    return r;
  }
  const double slope = least_squares_slope(log_loss, log_gap);
  r.measured["slope"] = slope;
  fail_if(r, slope < 3.0 / 8.0 - 0.05, "gap decay slope below 3/8 - 0.05");
  return r;
}

CheckReport r2_and_weighted_angle_check(const TeacherNetwork& t, const Trajectory& trajectory,
                                        const VerifierConfig& cfg) {
  CheckReport r = report("r2_and_weighted_angle_bounds");
  if (trajectory.weights.empty()) {
    r.status = CheckStatus::Inconclusive;
    r.details = "trajectory has no recorded weights";
    return r;
  }
  double r2_ratio = 0.0, angle_ratio = 0.0;
  int used = 0;
  for (std::size_t k = 0; k < trajectory.snapshots.size(); ++k) {
    const double loss = trajectory.snapshots[k].loss;
    if (loss < 1e-8 || loss > 1e-3) continue;
    StudentNetwork s;
    s.neurons.resize(static_cast<int>(trajectory.weights[k].cols()));
    for (int j = 0; j < trajectory.weights[k].cols(); ++j) {
      s.neurons[j] = trajectory.weights[k].col(j);
    }
    const NeuronPartition part = partition_students(t, s);
    const ResidualStats stats = residual_stats(t, s, part);
    double weighted = 0.0;
    for (int j = 0; j < s.m(); ++j) {
      weighted += s.neurons[j].squaredNorm() * part.angles[j] * part.angles[j];
    }
    r2_ratio = std::max(r2_ratio, stats.r2_norm_sq / std::pow(loss, 0.75));
    angle_ratio = std::max(angle_ratio, weighted / std::sqrt(loss));
    ++used;
  }
  r.measured["states_used"] = used;
  r.measured["r2_ratio"] = r2_ratio;
  r.measured["weighted_angle_ratio"] = angle_ratio;
  r.measured["frozen_r2_C"] = cfg.r2_ratio_C;
  r.measured["frozen_angle_C"] = cfg.weighted_angle_C;
  if (used == 0) {
    r.status = CheckStatus::Inconclusive;
    r.details = "trajectory never visited the loss window 1e-8..1e-3";
    return r;
  }
  fail_if(r, r2_ratio > 2.0 * cfg.r2_ratio_C, "R2 ratio regressed beyond 2x frozen");
  fail_if(r, angle_ratio > 2.0 * cfg.weighted_angle_C,
          "weighted angle ratio regressed beyond 2x frozen");
  return r;
}

namespace {

// mean of |w*.x| over the slab {|w_bar*.x| <= tau}, for unit w*
double slab_mean(double tau) {
  return std::sqrt(2.0 / kPi) * (1.0 - std::exp(-0.5 * tau * tau)) /
         std::erf(tau / std::sqrt(2.0));
}

double test_function_correlation(const TeacherNetwork& t, const StudentNetwork& s, int teacher,
                                 double tau, std::int64_t n, std::uint64_t seed) {
  const WeightVector& wstar = t.neurons[teacher];
  const double wnorm = wstar.norm();
  const WeightVector unit = wstar / wnorm;
  const double g = slab_mean(tau);
  // <h, f* - f>_S with h = (|w*.x| - g |w*|) on the slab
  const MCEstimate est = mc_estimate(
      [&](const Eigen::VectorXd& x) {
        const double z = unit.dot(x);
        if (std::abs(z) > tau) return 0.0;
        double residual = 0.0;
        for (const auto& w : t.neurons) residual += std::abs(w.dot(x));
        for (const auto& w : s.neurons) residual -= w.norm() * std::abs(w.dot(x));
        return (wnorm * std::abs(z) - g * wnorm) * residual;
      },
      t.dim(), n, seed);
  return est.mean;
}

}  // namespace

CheckReport test_function_check(std::uint64_t seed, const VerifierConfig& cfg) {
  CheckReport r = report("slab_test_function");
  // teachers e1, e2; teacher 0 has no student within delta = pi/2 - 0.6
  TeacherNetwork t;
  WeightVector e1 = WeightVector::Zero(2), e2 = WeightVector::Zero(2);
  e1[0] = 1.0;
  e2[1] = 1.0;
  t.neurons = {e1, e2};
  StudentNetwork s;
  s.neurons = {e2, WeightVector(2)};
  s.neurons[1] << std::cos(0.6), std::sin(0.6);
  s.neurons[1] *= std::sqrt(0.5);  // stray mass 0.5 at angle 0.6 from e1

  const double delta = 0.55;  // no student of teacher 0 within this angle
  const double tau = cfg.test_function_c1 * delta;  // c1 w_min delta / (r w_max), w = r... folded
  const double g = slab_mean(tau);
  r.measured["tau"] = tau;
  r.measured["g"] = g;
  r.measured["g_linear_term"] = tau / 2.0;
  fail_if(r, std::abs(g - tau / 2.0) > tau * tau * tau, "slab mean far from tau/2 + O(tau^3)");

  const double corr =
      test_function_correlation(t, s, 0, tau, 4000000, derive_seed(seed, 1));
  r.measured["correlation_over_tau3"] = corr / (tau * tau * tau);
  fail_if(r, corr < cfg.test_function_floor * tau * tau * tau,
          "slab correlation below the fitted floor");

  // contrast: add a matching student; the correlation collapses
  StudentNetwork matched = s;
  matched.neurons.push_back(e1);
  const double corr_matched =
      test_function_correlation(t, matched, 0, tau, 4000000, derive_seed(seed, 2));
  r.measured["matched_correlation_over_tau3"] = corr_matched / (tau * tau * tau);
  fail_if(r, std::abs(corr_matched) > 0.5 * std::max(corr, 1e-12),
          "matched-student correlation did not collapse");
  return r;
}

CheckReport hermite_test_function_check(double eps, std::uint64_t seed) {
  CheckReport r = report("hermite_test_function");
  struct Case {
    const char* tag;
    WarmupState state;
  };
  std::vector<Case> cases;
  cases.push_back({"warmup", make_warmup_state(0.35)});
  {
    WarmupState single = make_warmup_state(0.3);
    single.student.neurons.resize(1);
    single.student.neurons[0] = WeightVector(2);
    single.student.neurons[0] << std::cos(0.3), std::sin(0.3);
    cases.push_back({"single_rotated", single});
  }
  {
    WarmupState copy = make_warmup_state(0.3);
    copy.student.neurons.resize(1);
    copy.student.neurons[0] = copy.teacher.neurons[0];
    cases.push_back({"exact_copy", copy});
  }

  int idx = 0;
  for (auto& c : cases) {
    const TeacherNetwork& t = c.state.teacher;
    const StudentNetwork& s = c.state.student;
    const SeparationStats st = separation(t);
    const int l = 2 * std::max<int>(
        static_cast<int>(std::ceil(std::log(1.0 / eps) / std::log(1.0 / std::cos(st.delta / 2.0)))),
        1);
    const double sigma_l = hermite_abs_coeffs(l).coeffs[l];

    // analytic <h, R> from E[h_m(x) h_n(y)] = rho^n delta_mn
    double analytic = 0.0;
    double rhs = 0.0;
    const NeuronPartition part = partition_students(t, s);
    for (int j = 0; j < s.m(); ++j) {
      const WeightVector eff = effective_neuron(s.neurons[j]);
      const double meff = eff.norm();
      if (meff == 0.0) continue;
      double sum = 0.0;
      for (const auto& wstar : t.neurons) {
        const double rho = eff.dot(wstar) / (meff * wstar.norm());
        sum += std::pow(rho, l);
      }
      analytic += meff * (1.0 - sum);
      const double sd = std::sin(part.angles[j]);
      rhs += 0.25 * meff * sd * sd - (t.r() - 1) * eps * meff;
    }
    for (int i = 0; i < t.r(); ++i) {
      const double ni = t.neurons[i].norm();
      double sum = 0.0;
      for (int k = 0; k < t.r(); ++k) {
        const double rho = t.neurons[k].dot(t.neurons[i]) / (t.neurons[k].norm() * ni);
        sum += std::pow(rho, l);
      }
      analytic -= ni * (1.0 - sum);
    }

    const std::string tag = c.tag;
    r.measured[tag + "_analytic"] = analytic;
    r.measured[tag + "_rhs"] = rhs;
    fail_if(r, analytic < rhs - 1e-10, tag + ": analytic correlation below the lemma bound");

    // MC cross-check of the analytic inner product
    const MCEstimate mc = mc_estimate(
        [&](const Eigen::VectorXd& x) {
          double h = std::sqrt(kPi / 2.0);
          for (const auto& wstar : t.neurons) {
            h -= hermite_value(l, wstar.dot(x) / wstar.norm()) / sigma_l;
          }
          double residual = 0.0;
          for (const auto& w : s.neurons) residual += w.norm() * std::abs(w.dot(x));
          for (const auto& wstar : t.neurons) residual -= std::abs(wstar.dot(x));
          return h * residual;
        },
        t.dim(), 1000000, derive_seed(seed, 90 + idx));
    r.measured[tag + "_mc"] = mc.mean;
    r.measured[tag + "_mc_sigma"] = mc.std_err;
    fail_if(r, std::abs(mc.mean - analytic) > 4.0 * mc.std_err + 1e-9,
            tag + ": MC disagrees with the analytic inner product");
    ++idx;
  }
  r.measured["eps"] = eps;
  return r;
}

CheckReport residual_identity_check(std::uint64_t seed) {
  CheckReport r = report("residual_identities");
  Rng rng(seed);
  double worst_rel = 0.0;
  double worst_r2_pointwise = 0.0;
  double worst_r1_excess = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    const int d = rep % 2 == 0 ? 2 : 5;
    const int rr = 1 + rep % 3;
    const TeacherNetwork t = random_teacher(d, rr, 0.4, 0.7, 1.5, derive_seed(seed, rep));
    const StudentNetwork s = rep % 2 == 0
                                 ? make_perturbed_state(t, 2 * rr, 0.1, 0.2, derive_seed(seed, 50 + rep))
                                 : make_bounded_state(t, 2 * rr, derive_seed(seed, 80 + rep), 5.0);
    const NeuronPartition part = partition_students(t, s);
    const ResidualStats stats = residual_stats(t, s, part);
    const double total = stats.r1_norm_sq + 2.0 * stats.cross_term + stats.r2_norm_sq;
    const double rel = std::abs(total - 2.0 * stats.loss) / std::max(2.0 * stats.loss, 1e-12);
    worst_rel = std::max(worst_rel, rel);
    fail_if(r, stats.r2_norm_sq < -1e-12, "negative E[R2^2]");

    // sampled pointwise structure of the decomposition
    double v_norm_sum = 0.0;
    for (const auto& v : stats.gaps) v_norm_sum += v.norm();
    Rng xr(derive_seed(seed, 100 + rep));
    for (int k = 0; k < 10000; ++k) {
      const WeightVector x = random_vector(xr, d);
      double r1 = 0.0;
      for (int i = 0; i < t.r(); ++i) {
        const double z = t.neurons[i].dot(x);
        r1 += stats.gaps[i].dot(x) * (z > 0 ? 1.0 : (z < 0 ? -1.0 : 0.0));
      }
      double r2 = 0.0;
      for (int j = 0; j < s.m(); ++j) {
        const WeightVector eff = part.sign_flips[j] * effective_neuron(s.neurons[j]);
        if (eff.norm() == 0.0) continue;
        const double a = eff.dot(x);
        const double z = t.neurons[part.assignment[j]].dot(x);
        r2 += std::abs(a) - a * (z > 0 ? 1.0 : (z < 0 ? -1.0 : 0.0));
      }
      worst_r2_pointwise = std::min(worst_r2_pointwise, r2);
      worst_r1_excess = std::max(worst_r1_excess, std::abs(r1) / x.norm() - v_norm_sum);
    }
  }
  r.measured["worst_identity_rel_err"] = worst_rel;
  r.measured["worst_r2_pointwise"] = worst_r2_pointwise;
  r.measured["worst_r1_excess"] = worst_r1_excess;
  fail_if(r, worst_rel > 1e-8, "||R||^2 = 2 loss identity violated");
  fail_if(r, worst_r2_pointwise < -1e-10, "R2 pointwise negativity");
  fail_if(r, worst_r1_excess > 1e-10, "R1 bound violated");
  return r;
}

CheckReport m_eigenvalue_floor_check(std::uint64_t seed, const VerifierConfig& cfg) {
  CheckReport r = report("m_eigenvalue_floor");
  double min_ratio = std::numeric_limits<double>::infinity();
  int idx = 0;
  for (const int rr : {2, 3, 4}) {
    for (const int d : {2, 4, 6}) {
      if (rr > d) continue;
      const TeacherNetwork t = random_teacher(d, rr, 0.3, 1.0, 1.0, derive_seed(seed, idx++));
      const SeparationStats st = separation(t);
      const HessianSurrogate h = build_M(t);
      const double ratio = h.min_eigenvalue * std::pow(rr, 3.0) / std::pow(st.delta, 3.0);
      min_ratio = std::min(min_ratio, ratio);
      fail_if(r, h.min_eigenvalue <= 0.0, "M not positive definite for separated teachers");
    }
  }
  r.measured["min_ratio"] = min_ratio;
  r.measured["frozen_C"] = cfg.m_floor_C;
  fail_if(r, min_ratio < 0.5 * cfg.m_floor_C, "lambda_min scaling regressed below half frozen");
  return r;
}

// ------------------------------------------------------------------- claims

CheckReport warmup_cubic_check(std::uint64_t seed) {
  CheckReport r = report("warmup_cubic_loss");
  const std::vector<double> deltas = {0.2, 0.1, 0.05, 0.025};
  double cmin = std::numeric_limits<double>::infinity();
  double cmax = 0.0;
  for (const double delta : deltas) {
    const WarmupState ws = make_warmup_state(delta);
    const double loss = population_loss(ws.teacher, ws.student);
    const double c = loss / (delta * delta * delta);
    cmin = std::min(cmin, c);
    cmax = std::max(cmax, c);
    std::ostringstream key;
    key << "c_at_" << delta;
    r.measured[key.str()] = c;
    const ResidualStats stats =
        residual_stats(ws.teacher, ws.student, partition_students(ws.teacher, ws.student));
    fail_if(r, stats.r1_norm_sq > 1e-15, "R1 not numerically zero on the warm-up family");
    fail_if(r, stats.r2_norm_sq <= 0.0, "R2 vanished on the warm-up family");
  }
  r.measured["ratio_max_over_min"] = cmax / cmin;
  fail_if(r, cmax / cmin > 2.0, "L/delta^3 not constant within factor 2");
  fail_if(r, cmin < 0.01 || cmax > 1.0, "cubic constant left the expected window");

  // kernel loss vs sampled loss at delta = 0.1
  const WarmupState ws = make_warmup_state(0.1);
  const double loss = population_loss(ws.teacher, ws.student);
  const MCEstimate mc = mc_estimate(
      [&](const Eigen::VectorXd& x) {
        double res = 0.0;
        for (const auto& w : ws.student.neurons) res += w.norm() * std::abs(w.dot(x));
        for (const auto& w : ws.teacher.neurons) res -= std::abs(w.dot(x));
        return 0.5 * res * res;
      },
      2, 10000000, derive_seed(seed, 5));
  r.measured["kernel_loss"] = loss;
  r.measured["mc_loss"] = mc.mean;
  r.measured["mc_sigma"] = mc.std_err;
  fail_if(r, std::abs(loss - mc.mean) > 4.0 * mc.std_err, "kernel and MC losses disagree");
  return r;
}

CheckReport relu_counterexample_check(std::uint64_t seed) {
  CheckReport r = report("relu_counterexample");
  // three unit teachers at 0, 120, 240 degrees: they sum to zero
  TeacherNetwork t;
  for (int i = 0; i < 3; ++i) {
    WeightVector w(2);
    const double a = 2.0 * kPi * i / 3.0;
    w << std::cos(a), std::sin(a);
    t.neurons.push_back(w);
  }
  // students with effective vectors -w_i*: unit neurons opposite each teacher
  StudentNetwork s;
  for (const auto& w : t.neurons) s.neurons.push_back(-w);

  auto relu = [](double x) { return x > 0.0 ? x : 0.0; };
  const MCEstimate mc = mc_estimate(
      [&](const Eigen::VectorXd& x) {
        double f = 0.0;
        for (const auto& w : s.neurons) f += w.norm() * relu(w.dot(x));
        double fstar = 0.0;
        for (const auto& w : t.neurons) fstar += relu(w.dot(x));
        const double res = f - fstar;
        return res * res;
      },
      2, 1000000, derive_seed(seed, 1));
  r.measured["relu_mse"] = mc.mean;
  r.measured["relu_mse_sigma"] = mc.std_err;
  fail_if(r, std::abs(mc.mean) > 4.0 * mc.std_err + 1e-12, "ReLU loss not zero");

  double min_angle = kPi;
  for (const auto& ws : s.neurons) {
    for (const auto& wt : t.neurons) min_angle = std::min(min_angle, angle_signed(ws, wt));
  }
  r.measured["min_signed_angle_deg"] = min_angle * 180.0 / kPi;
  fail_if(r, min_angle < 59.0 * kPi / 180.0, "a student matches a teacher direction under ReLU");

  // the same weights cannot fit the ReLU teacher once the student activation
  // is |.|: exact value via E[|u.x| relu(v.x)] = K/2 and
  // E[relu(u.x) relu(v.x)] = (K + u.v)/4
  double loss_abs = 0.0;
  std::vector<WeightVector> eff;
  for (const auto& w : s.neurons) eff.push_back(effective_neuron(w));
  for (const auto& a : eff) {
    for (const auto& b : eff) loss_abs += 0.5 * abs_pair_expectation(a, b);
  }
  for (const auto& a : eff) {
    for (const auto& wt : t.neurons) loss_abs -= abs_pair_expectation(a, wt) * 0.5;
  }
  for (const auto& wa : t.neurons) {
    for (const auto& wb : t.neurons) {
      loss_abs += 0.125 * (abs_pair_expectation(wa, wb) + wa.dot(wb));
    }
  }
  r.measured["abs_vs_relu_teacher_loss"] = loss_abs;
  fail_if(r, loss_abs <= 0.1, "absolute-value mismatch loss unexpectedly small");

  // r = 2 antipodal variant: same cancellation
  TeacherNetwork t2;
  WeightVector e1(2);
  e1 << 1.0, 0.0;
  t2.neurons = {e1, -e1};
  StudentNetwork s2;
  for (const auto& w : t2.neurons) s2.neurons.push_back(-w);
  const MCEstimate mc2 = mc_estimate(
      [&](const Eigen::VectorXd& x) {
        double f = 0.0;
        for (const auto& w : s2.neurons) f += w.norm() * relu(w.dot(x));
        double fstar = 0.0;
        for (const auto& w : t2.neurons) fstar += relu(w.dot(x));
        const double res = f - fstar;
        return res * res;
      },
      2, 100000, derive_seed(seed, 2));
  r.measured["antipodal_relu_mse"] = mc2.mean;
  fail_if(r, std::abs(mc2.mean) > 4.0 * mc2.std_err + 1e-12, "antipodal variant not zero");
  return r;
}

// ----------------------------------------------------------------- sampling

CheckReport sample_concentration_check(std::uint64_t seed) {
  CheckReport r = report("gradient_concentration_slope");
  const TeacherNetwork t = random_teacher(2, 2, 0.6, 1.0, 1.0, derive_seed(seed, 0));
  const StudentNetwork s = make_perturbed_state(t, 6, 0.15, 0.3, derive_seed(seed, 1));
  const std::vector<WeightVector> pop = population_gradient(t, s);
  std::vector<double> log_n, log_dev;
  for (const std::int64_t N : {1000, 10000, 100000, 1000000}) {
    std::vector<double> devs;
    for (int rep = 0; rep < 5; ++rep) {
      const Dataset data = sample_dataset(t, N, derive_seed(seed, 100 + 10 * rep + N % 97));
      const std::vector<WeightVector> emp = empirical_gradient(s, data);
      double sq = 0.0;
      for (int j = 0; j < s.m(); ++j) sq += (emp[j] - pop[j]).squaredNorm();
      devs.push_back(std::sqrt(sq));
    }
    log_n.push_back(std::log10(static_cast<double>(N)));
    log_dev.push_back(std::log10(median(devs)));
  }
  const double slope = least_squares_slope(log_n, log_dev);
  r.measured["slope"] = slope;
  fail_if(r, std::abs(slope + 0.5) > 0.1, "concentration slope outside -1/2 +/- 0.1");

  // exact copy: deviation identically zero at any N
  StudentNetwork copy;
  for (const auto& w : t.neurons) copy.neurons.push_back(std::sqrt(w.norm()) * (w / w.norm()));
  const Dataset data = sample_dataset(t, 1000, derive_seed(seed, 7));
  const std::vector<WeightVector> emp = empirical_gradient(copy, data);
  double dev = 0.0;
  for (const auto& gvec : emp) dev += gvec.squaredNorm();
  r.measured["exact_copy_deviation"] = std::sqrt(dev);
  fail_if(r, std::sqrt(dev) > 1e-12, "exact copy has nonzero empirical gradient");
  return r;
}

CheckReport sgd_consistency_check(std::uint64_t seed) {
  CheckReport r = report("sgd_population_consistency");
  const TeacherNetwork t = random_teacher(2, 2, 0.6, 1.0, 1.0, derive_seed(seed, 0));
  const StudentNetwork s = make_perturbed_state(t, 5, 0.1, 0.2, derive_seed(seed, 1));
  const std::vector<WeightVector> pop = population_gradient(t, s);

  // per-entry Welford over per-sample gradient contributions
  const std::int64_t N = 1000000;
  const Dataset data = sample_dataset(t, N, derive_seed(seed, 2));
  const int d = t.dim();
  const int m = s.m();
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(d, m);
  Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(d, m);
  std::vector<double> norms(m);
  for (int j = 0; j < m; ++j) norms[j] = s.neurons[j].norm();
  for (std::int64_t k = 0; k < N; ++k) {
    const Eigen::VectorXd x = data.inputs.row(k).transpose();
    double f = 0.0;
    for (int j = 0; j < m; ++j) f += norms[j] * std::abs(s.neurons[j].dot(x));
    const double res = f - data.labels[k];
    for (int j = 0; j < m; ++j) {
      const WeightVector u = s.neurons[j] / norms[j];
      const double proj = u.dot(x);
      const double sgn = proj > 0 ? 1.0 : (proj < 0 ? -1.0 : 0.0);
      const WeightVector gj = res * norms[j] * sgn * (x + proj * u);
      for (int e = 0; e < d; ++e) {
        const double d1 = gj[e] - mean(e, j);
        mean(e, j) += d1 / static_cast<double>(k + 1);
        m2(e, j) += d1 * (gj[e] - mean(e, j));
      }
    }
  }
  double worst_sigma = 0.0;
  for (int j = 0; j < m; ++j) {
    for (int e = 0; e < d; ++e) {
      const double sigma = std::sqrt(m2(e, j) / static_cast<double>(N - 1) / static_cast<double>(N));
      const double gap = std::abs(mean(e, j) - pop[j][e]);
      worst_sigma = std::max(worst_sigma, gap / std::max(sigma, 1e-300));
    }
  }
  r.measured["worst_gap_over_sigma"] = worst_sigma;
  fail_if(r, worst_sigma > 4.0, "empirical gradient entry outside 4 standard errors");

  // replay determinism of a full SGD step
  const StudentNetwork a = sgd_step(t, s, 1e-3, 4096, derive_seed(seed, 3));
  const StudentNetwork b = sgd_step(t, s, 1e-3, 4096, derive_seed(seed, 3));
  double diff = 0.0;
  for (int j = 0; j < m; ++j) diff += (a.neurons[j] - b.neurons[j]).norm();
  r.measured["replay_difference"] = diff;
  fail_if(r, diff != 0.0, "sgd_step not reproducible under a fixed seed");
  return r;
}

CheckReport gradient_unbiasedness_check(std::uint64_t seed) {
  CheckReport r = report("gradient_unbiasedness");
  const TeacherNetwork t = random_teacher(2, 2, 0.6, 1.0, 1.0, derive_seed(seed, 0));
  const StudentNetwork s = make_perturbed_state(t, 5, 0.1, 0.2, derive_seed(seed, 1));
  const std::vector<WeightVector> pop = population_gradient(t, s);
  const int reps = 50;
  const std::int64_t N = 2000;
  const int d = t.dim();
  const int m = s.m();
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(d, m);
  Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(d, m);
  for (int rep = 0; rep < reps; ++rep) {
    const Dataset data = sample_dataset(t, N, derive_seed(seed, 10 + rep));
    const std::vector<WeightVector> emp = empirical_gradient(s, data);
    for (int j = 0; j < m; ++j) {
      for (int e = 0; e < d; ++e) {
        const double d1 = emp[j][e] - mean(e, j);
        mean(e, j) += d1 / static_cast<double>(rep + 1);
        m2(e, j) += d1 * (emp[j][e] - mean(e, j));
      }
    }
  }
  double worst = 0.0;
  for (int j = 0; j < m; ++j) {
    for (int e = 0; e < d; ++e) {
      const double sigma =
          std::sqrt(m2(e, j) / static_cast<double>(reps - 1) / static_cast<double>(reps));
      worst = std::max(worst, std::abs(mean(e, j) - pop[j][e]) / std::max(sigma, 1e-300));
    }
  }
  r.measured["worst_gap_over_sigma"] = worst;
  fail_if(r, worst > 4.0, "averaged empirical gradient biased beyond 4 standard errors");
  return r;
}

// --------------------------------------------------------------------- init

Eigen::VectorXd nnls_brute_force(const Eigen::MatrixXd& G, const Eigen::VectorXd& b) {
  const int m = static_cast<int>(b.size());
  if (m > 20) throw std::invalid_argument("nnls_brute_force: too many variables");
  Eigen::VectorXd best = Eigen::VectorXd::Zero(m);
  double best_obj = 0.0;
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < m; ++i) {
      if (mask & (1u << i)) idx.push_back(i);
    }
    const int p = static_cast<int>(idx.size());
    Eigen::MatrixXd Gp(p, p);
    Eigen::VectorXd bp(p);
    for (int a = 0; a < p; ++a) {
      bp[a] = b[idx[a]];
      for (int c = 0; c < p; ++c) Gp(a, c) = G(idx[a], idx[c]);
    }
    const Eigen::VectorXd zp = Gp.ldlt().solve(bp);
    if ((zp.array() < 0.0).any()) continue;
    Eigen::VectorXd z = Eigen::VectorXd::Zero(m);
    for (int a = 0; a < p; ++a) z[idx[a]] = zp[a];
    const double obj = 0.5 * z.dot(G * z) - b.dot(z);
    if (obj < best_obj) {
      best_obj = obj;
      best = z;
    }
  }
  return best;
}

CheckReport nnls_oracle_check(int n_instances, std::uint64_t seed) {
  CheckReport r = report("nnls_brute_force_oracle");
  Rng rng(seed);
  double worst_obj_gap = 0.0;
  double worst_z_gap = 0.0;
  for (int k = 0; k < n_instances; ++k) {
    const int m = 5;
    Eigen::MatrixXd A(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) A(i, j) = rng.gaussian();
    }
    const Eigen::MatrixXd G = A.transpose() * A + 0.05 * Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) b[i] = rng.gaussian();
    const NNLSResult sol = nnls(G, b);
    const Eigen::VectorXd oracle = nnls_brute_force(G, b);
    const double obj_oracle = 0.5 * oracle.dot(G * oracle) - b.dot(oracle);
    worst_obj_gap = std::max(worst_obj_gap, std::abs(sol.objective - obj_oracle));
    worst_z_gap = std::max(worst_z_gap, (sol.z - oracle).cwiseAbs().maxCoeff());
    fail_if(r, sol.objective > 1e-12, "NNLS objective above the z = 0 value");
  }
  r.measured["instances"] = n_instances;
  r.measured["worst_objective_gap"] = worst_obj_gap;
  r.measured["worst_z_gap"] = worst_z_gap;
  fail_if(r, worst_obj_gap > 1e-9, "active-set objective differs from brute force");
  fail_if(r, worst_z_gap > 1e-6, "active-set solution differs from brute force");
  return r;
}

CheckReport random_init_quality_check(int n_seeds, std::uint64_t seed) {
  CheckReport r = report("random_init_quality");
  TeacherNetwork t;
  WeightVector e1 = WeightVector::Zero(2);
  e1[0] = 1.0;
  t.neurons = {e1};
  int good = 0;
  double worst = 0.0;
  for (int k = 0; k < n_seeds; ++k) {
    const StudentNetwork s = random_init(t, 200, derive_seed(seed, k));
    const double loss = population_loss(t, s);
    worst = std::max(worst, loss);
    if (loss <= 1e-2) ++good;
  }
  r.measured["seeds"] = n_seeds;
  r.measured["good"] = good;
  r.measured["worst_loss"] = worst;
  fail_if(r, good < static_cast<int>(0.9 * n_seeds), "random init misses the loss target too often");
  return r;
}

CheckReport random_init_monotone_check(std::uint64_t seed) {
  CheckReport r = report("random_init_monotone_in_m");
  const TeacherNetwork t = random_teacher(2, 2, 0.6, 1.0, 1.0, derive_seed(seed, 0));
  auto median_loss = [&](int m, std::uint64_t tag) {
    std::vector<double> losses;
    for (int k = 0; k < 20; ++k) {
      losses.push_back(population_loss(t, random_init(t, m, derive_seed(seed, tag + k))));
    }
    return median(losses);
  };
  const double at_m = median_loss(25, 1000);
  const double at_4m = median_loss(100, 2000);
  r.measured["median_loss_m25"] = at_m;
  r.measured["median_loss_m100"] = at_4m;
  fail_if(r, at_4m > at_m, "median init loss increased with m");
  return r;
}

CheckReport init_loss_identity_check(std::uint64_t seed) {
  CheckReport r = report("init_loss_two_evaluation_paths");
  const TeacherNetwork t = random_teacher(2, 2, 0.5, 0.8, 1.3, derive_seed(seed, 0));
  double teacher_term = 0.0;
  for (const auto& a : t.neurons) {
    for (const auto& b : t.neurons) teacher_term += abs_pair_expectation(a, b);
  }
  Rng rng(derive_seed(seed, 1));
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    const int m = 20;
    std::vector<WeightVector> dirs(m);
    for (int j = 0; j < m; ++j) dirs[j] = random_vector(rng, 2);
    Eigen::MatrixXd G(m, m);
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) G(i, j) = abs_pair_expectation(dirs[i], dirs[j]);
      double bi = 0.0;
      for (const auto& w : t.neurons) bi += abs_pair_expectation(dirs[i], w);
      b[i] = bi;
    }
    const NNLSResult sol = nnls(G, b);
    const double via_quadratic = sol.objective + 0.5 * teacher_term;
    const StudentNetwork s = rescale_by_nnls(t, dirs, 0, derive_seed(seed, 100 + k));
    const double via_engine = population_loss(t, s);
    worst = std::max(worst, std::abs(via_quadratic - via_engine));
  }
  r.measured["worst_gap"] = worst;
  fail_if(r, worst > 1e-10, "quadratic and kernel-engine init losses disagree");
  return r;
}

CheckReport moment_convergence_check(std::uint64_t seed) {
  CheckReport r = report("moment_matrix_convergence");
  const TeacherNetwork t = random_teacher(5, 2, 0.5, 1.0, 1.0, derive_seed(seed, 0));
  const Eigen::MatrixXd pop = population_moment_matrix(t);
  std::vector<double> log_n, log_err;
  for (const std::int64_t N : {1000, 10000, 100000, 1000000}) {
    std::vector<double> errs;
    for (int rep = 0; rep < 5; ++rep) {
      const Dataset data = sample_dataset(t, N, derive_seed(seed, 10 * rep + N % 89));
      const MomentMatrix mm = moment_matrix(data);
      errs.push_back((mm.M_hat - pop).operatorNorm());
    }
    log_n.push_back(std::log10(static_cast<double>(N)));
    log_err.push_back(std::log10(median(errs)));
  }
  const double slope = least_squares_slope(log_n, log_err);
  r.measured["slope"] = slope;
  fail_if(r, std::abs(slope + 0.5) > 0.15, "moment error slope outside -1/2 +/- 0.15");
  return r;
}

CheckReport subspace_angle_check(std::uint64_t seed) {
  CheckReport r = report("subspace_principal_angle");
  const int d = 20, rr = 3;
  TeacherNetwork t;
  for (int i = 0; i < rr; ++i) {
    WeightVector w = WeightVector::Zero(d);
    w[i] = 1.0;
    t.neurons.push_back(w);
  }
  Eigen::MatrixXd teacher_basis = Eigen::MatrixXd::Zero(d, rr);
  for (int i = 0; i < rr; ++i) teacher_basis(i, i) = 1.0;

  Dataset data = sample_dataset(t, 100000, derive_seed(seed, 1));
  data.labels.array() -= data.labels.mean();  // the estimator subspace_init uses
  const MomentMatrix mm = moment_matrix(data);
  const Eigen::MatrixXd Q = top_eigenvectors(mm.M_hat, rr);
  const double angle = largest_principal_angle(teacher_basis, Q);
  r.measured["angle"] = angle;
  fail_if(r, angle > 0.05, "principal angle above 0.05 rad at N = 1e5");

  const Eigen::MatrixXd Qpop = top_eigenvectors(population_moment_matrix(t), rr);
  const double angle_pop = largest_principal_angle(teacher_basis, Qpop);
  r.measured["population_angle"] = angle_pop;
  // the top eigenvalue is triple-degenerate, so the solver recovers the span
  // only to iteration tolerance
  fail_if(r, angle_pop > 1e-6, "population moment matrix does not recover the span");
  return r;
}

// ------------------------------------------------------------------ kernels

CheckReport kernel_k_vs_mc_check(int pairs_per_dim, std::int64_t n, std::uint64_t seed) {
  CheckReport r = report("kernel_k_vs_mc");
  double worst = 0.0;
  int idx = 0;
  for (const int d : {2, 5, 20}) {
    Rng rng(derive_seed(seed, d));
    for (int k = 0; k < pairs_per_dim; ++k) {
      const WeightVector u = random_vector(rng, d);
      const WeightVector v = random_vector(rng, d);
      const double exact = abs_pair_expectation(u, v);
      const MCEstimate mc = mc_estimate(
          [&](const Eigen::VectorXd& x) { return std::abs(u.dot(x)) * std::abs(v.dot(x)); }, d, n,
          derive_seed(seed, 100 + idx++));
      worst = std::max(worst, std::abs(exact - mc.mean) / mc.std_err);
    }
  }
  r.measured["worst_gap_over_sigma"] = worst;
  fail_if(r, worst > 4.0, "closed-form K outside 4 standard errors of MC");
  return r;
}

CheckReport kernel_g_vs_mc_check(int pairs_per_dim, std::int64_t n, std::uint64_t seed) {
  CheckReport r = report("kernel_g_vs_mc");
  double worst = 0.0;
  int idx = 0;
  for (const int d : {2, 5, 20}) {
    Rng rng(derive_seed(seed, 7 * d));
    for (int k = 0; k < pairs_per_dim; ++k) {
      const WeightVector u = random_vector(rng, d);
      const WeightVector v = random_vector(rng, d);
      const WeightVector exact = abs_pair_gradient(u, v);
      const MCVectorEstimate mc = mc_estimate_vector(
          [&](const Eigen::VectorXd& x, Eigen::VectorXd& out) {
            const double s = u.dot(x) > 0 ? 1.0 : (u.dot(x) < 0 ? -1.0 : 0.0);
            out = s * std::abs(v.dot(x)) * x;
          },
          d, d, n, derive_seed(seed, 300 + idx++));
      for (int e = 0; e < d; ++e) {
        worst = std::max(worst, std::abs(exact[e] - mc.mean[e]) / mc.std_err[e]);
      }
    }
  }
  r.measured["worst_gap_over_sigma"] = worst;
  fail_if(r, worst > 4.0, "closed-form G outside 4 standard errors of MC");
  return r;
}

CheckReport kernel_scov_vs_mc_check(int pairs_per_dim, std::int64_t n, std::uint64_t seed) {
  CheckReport r = report("kernel_scov_vs_mc");
  double worst = 0.0;
  int idx = 0;
  for (const int d : {2, 4, 5}) {
    Rng rng(derive_seed(seed, 11 * d));
    for (int k = 0; k < pairs_per_dim; ++k) {
      const WeightVector a = random_vector(rng, d);
      const WeightVector b = random_vector(rng, d);
      const Eigen::MatrixXd exact = sign_cov_block(a, b);
      const MCVectorEstimate mc = mc_estimate_vector(
          [&](const Eigen::VectorXd& x, Eigen::VectorXd& out) {
            const double sa = a.dot(x) > 0 ? 1.0 : (a.dot(x) < 0 ? -1.0 : 0.0);
            const double sb = b.dot(x) > 0 ? 1.0 : (b.dot(x) < 0 ? -1.0 : 0.0);
            int e = 0;
            for (int i = 0; i < x.size(); ++i) {
              for (int j = 0; j < x.size(); ++j) out[e++] = sa * sb * x[i] * x[j];
            }
          },
          d, d * d, n, derive_seed(seed, 500 + idx++));
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          const double sigma = std::max(mc.std_err[i * d + j], 1e-300);
          worst = std::max(worst, std::abs(exact(i, j) - mc.mean[i * d + j]) / sigma);
        }
      }
      // trace never exceeds d
      fail_if(r, exact.trace() > d + 1e-12, "Scov trace above the dimension");
    }
  }
  r.measured["worst_gap_over_sigma"] = worst;
  fail_if(r, worst > 4.0, "closed-form Scov outside 4 standard errors of MC");
  return r;
}

CheckReport mismatch_vs_mc_check(std::int64_t n, std::uint64_t seed) {
  CheckReport r = report("mismatch_moments_vs_mc");
  Rng rng(derive_seed(seed, 3));
  double worst = 0.0;
  for (int k = 0; k < 8; ++k) {
    const int d = k % 2 == 0 ? 2 : 5;
    const WeightVector a = random_vector(rng, d);
    const WeightVector b = random_vector(rng, d);
    const double p = mismatch_probability(a, b);
    const MCEstimate mcp = mc_estimate(
        [&](const Eigen::VectorXd& x) {
          const double sa = a.dot(x) > 0 ? 1.0 : (a.dot(x) < 0 ? -1.0 : 0.0);
          const double sb = b.dot(x) > 0 ? 1.0 : (b.dot(x) < 0 ? -1.0 : 0.0);
          return sa != sb ? 1.0 : 0.0;
        },
        d, n, derive_seed(seed, 700 + k));
    worst = std::max(worst, std::abs(p - mcp.mean) / mcp.std_err);

    const double m2 = mismatch_second_moment(a, b);
    const MCEstimate mcm = mc_estimate(
        [&](const Eigen::VectorXd& x) {
          const double za = a.dot(x);
          const double zb = b.dot(x);
          const double sa = za > 0 ? 1.0 : (za < 0 ? -1.0 : 0.0);
          const double sb = zb > 0 ? 1.0 : (zb < 0 ? -1.0 : 0.0);
          return sa != sb ? za * za : 0.0;
        },
        d, n, derive_seed(seed, 800 + k));
    worst = std::max(worst, std::abs(m2 - mcm.mean) / mcm.std_err);
  }
  r.measured["worst_gap_over_sigma"] = worst;
  fail_if(r, worst > 4.0, "mismatch moments outside 4 standard errors of MC");
  return r;
}

CheckReport slab_bounds_check(std::int64_t n, std::uint64_t seed) {
  CheckReport r = report("slab_probability_bounds");
  double worst = 0.0;
  int idx = 0;
  for (const double delta : {0.1, 0.5, 1.0, 2.0}) {
    const SlabProbability p = slab_probability(delta);
    fail_if(r, p.lower > p.exact + 1e-14 || p.exact > p.upper + 1e-14, "bound ordering violated");
    const MCEstimate mc = mc_estimate(
        [&](const Eigen::VectorXd& x) { return std::abs(x[0]) <= delta ? 1.0 : 0.0; }, 1, n,
        derive_seed(seed, idx++));
    worst = std::max(worst, std::abs(p.exact - mc.mean) / mc.std_err);
  }
  const SlabProbability large = slab_probability(10.0);
  fail_if(r, large.exact < 1.0 - 1e-12, "exact slab probability should saturate");
  fail_if(r, large.upper < 1.0, "upper bound is loose for large delta by design");
  r.measured["worst_gap_over_sigma"] = worst;
  fail_if(r, worst > 4.0, "exact slab probability outside 4 standard errors of MC");
  return r;
}

CheckReport owen_t_check(std::int64_t n, std::uint64_t seed) {
  CheckReport r = report("owen_t_quadrature");
  const double at_zero_one = owen_t(0.0, 1.0);
  r.measured["t_0_1"] = at_zero_one;
  fail_if(r, std::abs(at_zero_one - 0.125) > 1e-10, "T(0,1) != 1/8");
  fail_if(r, owen_t(1.7, 0.0) != 0.0, "T(x,0) != 0");

  // MC of the defining integral, t ~ U(0, a)
  double worst = 0.0;
  int idx = 0;
  for (const auto& [x, a] : std::vector<std::pair<double, double>>{{1.0, 2.0}, {0.3, 5.0}, {2.0, 0.7}}) {
    const double quad = owen_t(x, a);
    Rng rng(derive_seed(seed, 40 + idx++));
    double mean = 0.0, m2 = 0.0;
    for (std::int64_t k = 0; k < n; ++k) {
      const double tt = a * rng.uniform();
      const double val = a * std::exp(-0.5 * x * x * (1.0 + tt * tt)) / (1.0 + tt * tt) /
                         (2.0 * kPi);
      const double d1 = val - mean;
      mean += d1 / static_cast<double>(k + 1);
      m2 += d1 * (val - mean);
    }
    const double sigma = std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
    worst = std::max(worst, std::abs(quad - mean) / sigma);
  }
  r.measured["worst_gap_over_sigma"] = worst;
  fail_if(r, worst > 4.0, "quadrature outside 4 standard errors of the MC integral");

  // h2(tau, phi) <= 0 on the small grid used by the monotonicity argument
  double h2_max = -std::numeric_limits<double>::infinity();
  for (double tau = 0.02; tau <= 0.2001; tau += 0.02) {
    for (double phi = 0.02; phi <= 0.2001; phi += 0.02) {
      const double cot = 1.0 / std::tan(phi);
      const double h2 = 4.0 * owen_t(tau, cot) - 1.0 + 2.0 * phi / kPi +
                        tau / std::sqrt(2.0 * kPi) * std::erf(tau * cot / std::sqrt(2.0));
      h2_max = std::max(h2_max, h2);
    }
  }
  r.measured["h2_grid_max"] = h2_max;
  fail_if(r, h2_max > 0.0, "h2(tau, phi) positive on the grid");
  return r;
}

CheckReport hermite_coeff_check() {
  CheckReport r = report("hermite_abs_coefficients");
  const HermiteCoefficients hc = hermite_abs_coeffs(40);
  const double s0 = std::sqrt(2.0 / kPi);
  const double s2 = 1.0 / std::sqrt(kPi);
  const double s4 = -std::sqrt(2.0 / (kPi * 24.0));
  r.measured["sigma0"] = hc.coeffs[0];
  r.measured["sigma2"] = hc.coeffs[2];
  r.measured["sigma4"] = hc.coeffs[4];
  fail_if(r, std::abs(hc.coeffs[0] - s0) > 1e-12, "sigma_0 mismatch");
  fail_if(r, std::abs(hc.coeffs[2] - s2) > 1e-12, "sigma_2 mismatch");
  fail_if(r, std::abs(hc.coeffs[4] - s4) > 1e-12, "sigma_4 mismatch");
  for (int k = 1; k < 40; k += 2) fail_if(r, hc.coeffs[k] != 0.0, "odd coefficient nonzero");

  // Decay envelope: the coefficient formula gives sigma_k^2 =
  // (2/pi)((k-3)!!)^2/k! ~ (2/pi)^{3/2} k^{-5/2} (the often-quoted k^{-3/2}
  // exponent belongs to sigma_k h_k(0), not sigma_k^2). Tested as a monotone
  // envelope of sigma_k^2 k^{5/2} for even k >= 4.
  double env_min = std::numeric_limits<double>::infinity(), env_max = 0.0;
  double prev_scaled = std::numeric_limits<double>::infinity();
  bool monotone = true;
  for (int k = 4; k <= 40; k += 2) {
    const double scaled = hc.coeffs[k] * hc.coeffs[k] * std::pow(k, 2.5);
    if (scaled > prev_scaled) monotone = false;
    prev_scaled = scaled;
    env_min = std::min(env_min, scaled);
    env_max = std::max(env_max, scaled);
  }
  r.measured["decay_env_min"] = env_min;
  r.measured["decay_env_max"] = env_max;
  fail_if(r, env_min <= 0.0 || env_max / env_min > 2.0 || !monotone,
          "decay envelope not a monotone Theta(k^-5/2)");

  // Truncation error of the series on [-3, 3]. At the kink every tail term
  // sigma_k h_k(0) has the same sign, so the error there equals the tail sum
  // (2/pi) sum_{even k > L} ~k^{-3/2} = Theta(L^{-1/2}): about 0.100 at L = 40,
  // under 0.02 only from L ~ 1024 on. Frozen values from calibration.
  auto series_err = [&](int L) {
    const HermiteCoefficients c = hermite_abs_coeffs(L);
    double max_err = 0.0;
    for (double x = -3.0; x <= 3.0; x += 0.002) {
      double sum = 0.0;
      for (int k = 0; k <= L; k += 2) sum += c.coeffs[k] * hermite_value(k, x);
      max_err = std::max(max_err, std::abs(sum - std::abs(x)));
    }
    return max_err;
  };
  const double err40 = series_err(40);
  const double err2048 = series_err(2048);
  r.measured["series_max_err_L40"] = err40;
  r.measured["series_max_err_L2048"] = err2048;
  r.measured["kink_scaling_ratio"] = (err40 * std::sqrt(40.0)) / (err2048 * std::sqrt(2048.0));
  fail_if(r, err40 > 0.2, "L = 40 series error regressed beyond 2x the frozen 0.100");
  fail_if(r, err2048 > 0.02, "deep series error above 0.02");
  fail_if(r, r.measured["kink_scaling_ratio"] < 0.7 || r.measured["kink_scaling_ratio"] > 1.4,
          "kink error does not scale like L^{-1/2}");
  return r;
}

CheckReport hermite_orthonormality_check(std::int64_t n, std::uint64_t seed) {
  CheckReport r = report("hermite_orthonormality");
  double worst = 0.0;
  int idx = 0;
  for (const double rho : {0.0, 0.5, -0.7}) {
    for (int mdeg = 0; mdeg <= 6; ++mdeg) {
      for (int ndeg = mdeg; ndeg <= 6; ++ndeg) {
        const double expected = mdeg == ndeg ? std::pow(rho, ndeg) : 0.0;
        const MCEstimate mc = mc_estimate(
            [&](const Eigen::VectorXd& x) {
              const double y = rho * x[0] + std::sqrt(1.0 - rho * rho) * x[1];
              return hermite_value(mdeg, x[0]) * hermite_value(ndeg, y);
            },
            2, n, derive_seed(seed, 1000 + idx++));
        const double sigma = std::max(mc.std_err, 1e-300);
        if (mdeg == 0 && ndeg == 0) continue;  // deterministic 1*1
        worst = std::max(worst, std::abs(mc.mean - expected) / sigma);
      }
    }
  }
  r.measured["worst_gap_over_sigma"] = worst;
  fail_if(r, worst > 4.0, "E[h_m h_n] != rho^n delta_mn beyond 4 standard errors");
  return r;
}

CheckReport gram_psd_check(std::uint64_t seed) {
  CheckReport r = report("kernel_gram_psd");
  Rng rng(seed);
  double min_eig = std::numeric_limits<double>::infinity();
  for (int rep = 0; rep < 10; ++rep) {
    const int d = 2 + static_cast<int>(rng.next_u64() % 5);
    const int count = 3 + static_cast<int>(rng.next_u64() % 6);
    std::vector<WeightVector> vecs;
    for (int k = 0; k < count; ++k) vecs.push_back(random_vector(rng, d));
    Eigen::MatrixXd G(count, count);
    for (int i = 0; i < count; ++i) {
      for (int j = 0; j < count; ++j) G(i, j) = abs_pair_expectation(vecs[i], vecs[j]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (G + G.transpose()));
    min_eig = std::min(min_eig, solver.eigenvalues().minCoeff());
  }
  r.measured["min_eigenvalue"] = min_eig;
  fail_if(r, min_eig < -1e-10, "kernel Gram matrix has a negative eigenvalue");
  return r;
}

// ------------------------------------------------------------------- suites

namespace {

Trajectory landscape_trajectory(const TeacherNetwork& t, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.eta_rule = EtaRule::Auto;
  cfg.max_steps = 300000;
  cfg.target_loss = 1e-10;
  cfg.record_every = 50;
  cfg.record_weights = true;
  cfg.seed = seed;
  const StudentNetwork s0 = make_perturbed_state(t, 6, 0.05, 0.1, derive_seed(seed, 3));
  return train(t, s0, cfg).trajectory;
}

std::vector<CheckReport> suite_kernels(std::uint64_t seed) {
  std::vector<CheckReport> out;
  out.push_back(kernel_k_vs_mc_check(4, 1000000, derive_seed(seed, 1)));
  out.push_back(kernel_g_vs_mc_check(3, 500000, derive_seed(seed, 2)));
  out.push_back(kernel_scov_vs_mc_check(3, 500000, derive_seed(seed, 3)));
  out.push_back(mismatch_vs_mc_check(500000, derive_seed(seed, 4)));
  out.push_back(slab_bounds_check(500000, derive_seed(seed, 5)));
  out.push_back(owen_t_check(1000000, derive_seed(seed, 6)));
  out.push_back(hermite_coeff_check());
  out.push_back(hermite_orthonormality_check(200000, derive_seed(seed, 7)));
  out.push_back(gram_psd_check(derive_seed(seed, 8)));
  return out;
}

std::vector<CheckReport> suite_landscape(std::uint64_t seed) {
  VerifierConfig cfg;
  std::vector<CheckReport> out;
  const TeacherNetwork t = random_teacher(2, 3, 0.5, 1.0, 1.0, derive_seed(seed, 1));
  std::vector<StudentNetwork> states = landscape_states(t, 20, derive_seed(seed, 2));

  out.push_back(lojasiewicz_check(t, states, cfg));
  out.push_back(descent_correlation_check(t, states, cfg.descent_C, cfg));
  out.push_back(neighbor_and_mass_check(t, states, cfg));
  out.push_back(smoothness_check(t, states, 2, derive_seed(seed, 4), cfg));

  std::vector<StudentNetwork> bounded = states;
  for (int k = 0; k < 6; ++k) {
    bounded.push_back(make_bounded_state(t, 8, derive_seed(seed, 40 + k),
                                         std::pow(t.r() * 1.0, 2.0)));
  }
  bounded.push_back(StudentNetwork{{WeightVector::Zero(2), WeightVector::Zero(2)}});
  out.push_back(lipschitz_check(t, bounded, cfg));
  out.push_back(g_smoothness_check(10000, derive_seed(seed, 5)));

  // warm-up family exercises the checks on the pure activation-mismatch manifold
  std::vector<StudentNetwork> warm;
  TeacherNetwork warm_teacher;
  for (const double delta : {0.15, 0.1, 0.05, 0.025}) {
    const WarmupState ws = make_warmup_state(delta);
    warm_teacher = ws.teacher;
    warm.push_back(ws.student);
  }
  CheckReport warm_loja = lojasiewicz_check(warm_teacher, warm, cfg);
  warm_loja.name += "_warmup";
  out.push_back(warm_loja);
  CheckReport warm_descent =
      descent_correlation_check(warm_teacher, warm, cfg.warmup_descent_C, cfg);
  warm_descent.name += "_warmup";
  out.push_back(warm_descent);

  const TeacherNetwork t2 = random_teacher(2, 2, 0.7, 1.0, 1.0, derive_seed(seed, 6));
  const Trajectory traj = landscape_trajectory(t2, derive_seed(seed, 7));
  out.push_back(average_closeness_check(t2, traj));
  out.push_back(r2_and_weighted_angle_check(t2, traj, cfg));

  out.push_back(test_function_check(derive_seed(seed, 8), cfg));
  out.push_back(hermite_test_function_check(0.05, derive_seed(seed, 9)));
  out.push_back(residual_identity_check(derive_seed(seed, 10)));
  out.push_back(m_eigenvalue_floor_check(derive_seed(seed, 11), cfg));
  return out;
}

std::vector<CheckReport> suite_claims(std::uint64_t seed) {
  std::vector<CheckReport> out;
  out.push_back(warmup_cubic_check(derive_seed(seed, 1)));
  out.push_back(relu_counterexample_check(derive_seed(seed, 2)));
  return out;
}

std::vector<CheckReport> suite_init(std::uint64_t seed) {
  std::vector<CheckReport> out;
  out.push_back(nnls_oracle_check(100, derive_seed(seed, 1)));
  out.push_back(random_init_quality_check(10, derive_seed(seed, 2)));
  out.push_back(random_init_monotone_check(derive_seed(seed, 3)));
  out.push_back(init_loss_identity_check(derive_seed(seed, 4)));
  out.push_back(moment_convergence_check(derive_seed(seed, 5)));
  out.push_back(subspace_angle_check(derive_seed(seed, 6)));
  return out;
}

std::vector<CheckReport> suite_sampling(std::uint64_t seed) {
  std::vector<CheckReport> out;
  out.push_back(sample_concentration_check(derive_seed(seed, 1)));
  out.push_back(sgd_consistency_check(derive_seed(seed, 2)));
  out.push_back(gradient_unbiasedness_check(derive_seed(seed, 3)));
  return out;
}

}  // namespace

bool suite_known(const std::string& suite) {
  return suite == "kernels" || suite == "landscape" || suite == "claims" || suite == "init" ||
         suite == "sampling" || suite == "all";
}

std::vector<CheckReport> run_suite(const std::string& suite, std::uint64_t seed) {
  if (suite == "kernels") return suite_kernels(seed);
  if (suite == "landscape") return suite_landscape(seed);
  if (suite == "claims") return suite_claims(seed);
  if (suite == "init") return suite_init(seed);
  if (suite == "sampling") return suite_sampling(seed);
  if (suite == "all") {
    std::vector<CheckReport> out;
    for (const char* name : {"kernels", "landscape", "claims", "init", "sampling"}) {
      auto part = run_suite(name, seed);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  throw std::invalid_argument("unknown suite: " + suite);
}

}  // namespace tslab
