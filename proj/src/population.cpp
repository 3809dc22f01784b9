#include "tslab/population.hpp"

#include <algorithm>
#include <cmath>

#include "tslab/gauss_kernels.hpp"

namespace tslab {

namespace {

// Neumaier-compensated accumulator; kernel sums cancel heavily near optima.
struct Accumulator {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + comp; }
};

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

}  // namespace

double population_loss(const TeacherNetwork& t, const StudentNetwork& s) {
  PopulationEngine engine(t);
  return engine.loss(s);
}

std::vector<WeightVector> population_gradient(const TeacherNetwork& t, const StudentNetwork& s) {
  PopulationEngine engine(t);
  Eigen::MatrixXd grad;
  engine.loss_and_gradient(s, grad);
  std::vector<WeightVector> out(s.m());
  for (int j = 0; j < s.m(); ++j) out[j] = grad.col(j);
  return out;
}

double gradient_frobenius_norm(const std::vector<WeightVector>& grad) {
  double sq = 0.0;
  for (const auto& g : grad) sq += g.squaredNorm();
  return std::sqrt(sq);
}

ResidualStats residual_stats(const TeacherNetwork& t, const StudentNetwork& s,
                             const NeuronPartition& partition) {
  const int d = t.dim();
  const int r = t.r();
  const int m = s.m();
  ResidualStats stats;
  stats.loss = population_loss(t, s);

  // flipped effective neurons; zero students contribute nothing
  std::vector<WeightVector> eff(m);
  for (int j = 0; j < m; ++j) {
    eff[j] = static_cast<double>(partition.sign_flips[j]) * effective_neuron(s.neurons[j]);
  }

  stats.avg_neurons.assign(r, WeightVector::Zero(d));
  for (int j = 0; j < m; ++j) stats.avg_neurons[partition.assignment[j]] += eff[j];
  stats.gaps.resize(r);
  for (int i = 0; i < r; ++i) stats.gaps[i] = stats.avg_neurons[i] - t.neurons[i];

  // R1: v^T M v
  Accumulator r1;
  for (int i = 0; i < r; ++i) {
    for (int k = 0; k < r; ++k) {
      r1.add(stats.gaps[i].dot(sign_cov_block(t.neurons[i], t.neurons[k]) * stats.gaps[k]));
    }
  }
  stats.r1_norm_sq = r1.value();

  // R2 as bilinear forms in Scov over student pairs; b_j is the assigned teacher
  std::vector<int> live;
  for (int j = 0; j < m; ++j) {
    if (eff[j].norm() > 0.0) live.push_back(j);
  }
  Accumulator r2;
  for (int a : live) {
    const WeightVector& ta = t.neurons[partition.assignment[a]];
    for (int b : live) {
      const WeightVector& tb = t.neurons[partition.assignment[b]];
      Eigen::MatrixXd block = sign_cov_block(eff[a], eff[b]);
      block -= sign_cov_block(eff[a], tb);
      block -= sign_cov_block(ta, eff[b]);
      block += sign_cov_block(ta, tb);
      r2.add(eff[a].dot(block * eff[b]));
    }
  }
  stats.r2_norm_sq = r2.value();

  Accumulator cross;
  for (int i = 0; i < r; ++i) {
    if (stats.gaps[i].norm() == 0.0) continue;
    for (int b : live) {
      const WeightVector& tb = t.neurons[partition.assignment[b]];
      Eigen::MatrixXd block = sign_cov_block(t.neurons[i], eff[b]);
      block -= sign_cov_block(t.neurons[i], tb);
      cross.add(stats.gaps[i].dot(block * eff[b]));
    }
  }
  stats.cross_term = cross.value();
  return stats;
}

HessianSurrogate build_M(const TeacherNetwork& t) {
  const int d = t.dim();
  const int r = t.r();
  HessianSurrogate h;
  h.M.resize(d * r, d * r);
  for (int i = 0; i < r; ++i) {
    for (int k = i; k < r; ++k) {
      const Eigen::MatrixXd block = sign_cov_block(t.neurons[i], t.neurons[k]);
      h.M.block(i * d, k * d, d, d) = block;
      if (k != i) h.M.block(k * d, i * d, d, d) = block.transpose();
    }
  }
  h.M = 0.5 * (h.M + h.M.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.M);
  if (solver.info() != Eigen::Success) throw std::runtime_error("build_M: eigensolver failed");
  h.min_eigenvalue = solver.eigenvalues().minCoeff();
  return h;
}

std::vector<WeightVector> descent_direction(const TeacherNetwork& t, const StudentNetwork& s,
                                            const NeuronPartition& partition, double eps,
                                            double C) {
  const int r = t.r();
  const int m = s.m();
  const double dmax = delta_max(eps, t, C);

  std::vector<double> mass(r, 0.0);  // sum of |w_j|^2 over T_i(dmax)
  for (int j = 0; j < m; ++j) {
    const double n = s.neurons[j].norm();
    if (n > 0.0 && partition.angles[j] <= dmax) mass[partition.assignment[j]] += n * n;
  }
  for (int i = 0; i < r; ++i) {
    if (mass[i] <= 0.0) throw CoverageError(i, dmax);
  }

  std::vector<WeightVector> g(m);
  for (int j = 0; j < m; ++j) {
    const WeightVector& w = s.neurons[j];
    const double n = w.norm();
    if (n == 0.0) {
      g[j] = WeightVector::Zero(t.dim());
      continue;
    }
    const int i = partition.assignment[j];
    WeightVector target = w;
    if (partition.angles[j] <= dmax) {
      const double q = n / mass[i];
      const double sgn = w.dot(t.neurons[i]) > 0.0 ? 1.0 : (w.dot(t.neurons[i]) < 0.0 ? -1.0 : 0.0);
      target -= q * sgn * t.neurons[i];
    }
    const WeightVector unit = w / n;
    g[j] = target - 0.5 * unit.dot(target) * unit;
  }
  return g;
}

PopulationEngine::PopulationEngine(const TeacherNetwork& t) : teacher_(t) {
  const int d = teacher_.dim();
  const int r = teacher_.r();
  teacher_units_.resize(d, r);
  teacher_norms_.resize(r);
  for (int i = 0; i < r; ++i) {
    const double n = teacher_.neurons[i].norm();
    if (n == 0.0) throw std::invalid_argument("PopulationEngine: zero teacher neuron");
    teacher_norms_[i] = n;
    teacher_units_.col(i) = teacher_.neurons[i] / n;
  }
  Accumulator acc;
  for (int i = 0; i < r; ++i) {
    for (int k = 0; k < r; ++k) {
      const double rho = clamp_unit(teacher_units_.col(i).dot(teacher_units_.col(k)));
      acc.add(teacher_norms_[i] * teacher_norms_[k] * abs_kernel_scalar(rho));
    }
  }
  teacher_self_term_ = acc.value();
}

double PopulationEngine::loss(const StudentNetwork& s) {
  Eigen::MatrixXd grad;
  return loss_and_gradient(s, grad);
}

double PopulationEngine::loss_and_gradient(const StudentNetwork& s, Eigen::MatrixXd& grad) {
  const int d = teacher_.dim();
  const int r = teacher_.r();
  const int m = s.m();
  if (s.dim() != d) throw std::invalid_argument("PopulationEngine: dimension mismatch");

  units_.resize(d, m);
  masses_.resize(m);
  norms_.resize(m);
  for (int j = 0; j < m; ++j) {
    const double n = s.neurons[j].norm();
    norms_[j] = n;
    masses_[j] = n * n;
    units_.col(j) = n > 0.0 ? (s.neurons[j] / n).eval() : WeightVector::Zero(d);
  }

  rho_ss_.noalias() = units_.transpose() * units_;
  rho_st_.noalias() = units_.transpose() * teacher_units_;

  // loss: 1/2 [ sum_jk m_j m_k k(rho) - 2 sum_ji m_j t_i k(rho) + teacher term ]
  Accumulator acc;
  acc.add(teacher_self_term_);
  for (int j = 0; j < m; ++j) {
    if (masses_[j] == 0.0) continue;
    acc.add(masses_[j] * masses_[j]);  // k(1) = 1 self term
    for (int k = j + 1; k < m; ++k) {
      if (masses_[k] == 0.0) continue;
      acc.add(2.0 * masses_[j] * masses_[k] * abs_kernel_scalar(rho_ss_(j, k)));
    }
    for (int i = 0; i < r; ++i) {
      acc.add(-2.0 * masses_[j] * teacher_norms_[i] * abs_kernel_scalar(rho_st_(j, i)));
    }
  }
  const double loss = std::max(0.0, 0.5 * acc.value());

  grad.resize(d, m);
  grad.setZero();
  for (int j = 0; j < m; ++j) {
    if (masses_[j] == 0.0) continue;
    // D_j = sum_k G(u_j; a_k) - sum_i G(u_j; w_i*), assembled from the shared
    // cosine tables: G(u; v) = (2/pi)(sqrt(1-rho^2) |v| u + asin(rho) v)
    double along_u = 0.0;
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(d);
    for (int k = 0; k < m; ++k) {
      if (masses_[k] == 0.0) continue;
      const double rho = clamp_unit(rho_ss_(j, k));
      along_u += masses_[k] * std::sqrt(std::max(0.0, 1.0 - rho * rho));
      dir += masses_[k] * std::asin(rho) * units_.col(k);
    }
    for (int i = 0; i < r; ++i) {
      const double rho = clamp_unit(rho_st_(j, i));
      along_u -= teacher_norms_[i] * std::sqrt(std::max(0.0, 1.0 - rho * rho));
      dir -= teacher_norms_[i] * std::asin(rho) * teacher_units_.col(i);
    }
    constexpr double kTwoOverPi = 2.0 / 3.14159265358979323846;
    Eigen::VectorXd D = kTwoOverPi * (along_u * units_.col(j) + dir);
    grad.col(j) = norms_[j] * (D + units_.col(j).dot(D) * units_.col(j));
  }
  return loss;
}

}  // namespace tslab
