#include "tslab/networks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tslab/rng.hpp"

namespace tslab {

namespace {
constexpr double kPi = 3.14159265358979323846;

double clamped_cos(const WeightVector& u, const WeightVector& v) {
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) {
    throw std::invalid_argument("angle of a zero vector is undefined");
  }
  return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}
}  // namespace

std::vector<std::vector<int>> NeuronPartition::groups(int r) const {
  std::vector<std::vector<int>> out(r);
  for (int j = 0; j < static_cast<int>(assignment.size()); ++j) {
    out.at(assignment[j]).push_back(j);
  }
  return out;
}

double angle_up_to_sign(const WeightVector& u, const WeightVector& v) {
  return std::acos(std::abs(clamped_cos(u, v)));
}

double angle_signed(const WeightVector& u, const WeightVector& v) {
  return std::acos(clamped_cos(u, v));
}

WeightVector effective_neuron(const WeightVector& w) { return w.norm() * w; }

SeparationStats separation(const TeacherNetwork& t) {
  if (t.r() < 1) throw std::invalid_argument("teacher network must have r >= 1");
  SeparationStats stats{kPi / 2.0, 0.0, 0.0};
  stats.w_min = stats.w_max = t.neurons.front().norm();
  for (const auto& w : t.neurons) {
    const double n = w.norm();
    if (n == 0.0) throw std::invalid_argument("teacher neuron must be nonzero");
    stats.w_min = std::min(stats.w_min, n);
    stats.w_max = std::max(stats.w_max, n);
  }
  for (int i = 0; i < t.r(); ++i) {
    for (int j = i + 1; j < t.r(); ++j) {
      stats.delta = std::min(stats.delta, angle_up_to_sign(t.neurons[i], t.neurons[j]));
    }
  }
  return stats;
}

NeuronPartition partition_students(const TeacherNetwork& t, const StudentNetwork& s) {
  NeuronPartition p;
  p.assignment.resize(s.m());
  p.angles.resize(s.m());
  p.sign_flips.resize(s.m());
  for (int j = 0; j < s.m(); ++j) {
    const WeightVector& w = s.neurons[j];
    if (w.norm() == 0.0) {
      p.assignment[j] = 0;
      p.angles[j] = 0.0;
      p.sign_flips[j] = 1;
      continue;
    }
    int best = 0;
    double best_angle = angle_up_to_sign(w, t.neurons[0]);
    for (int i = 1; i < t.r(); ++i) {
      const double a = angle_up_to_sign(w, t.neurons[i]);
      if (a < best_angle) {  // strict: ties keep the lowest teacher index
        best_angle = a;
        best = i;
      }
    }
    p.assignment[j] = best;
    p.angles[j] = best_angle;
    p.sign_flips[j] = w.dot(t.neurons[best]) >= 0.0 ? 1 : -1;
  }
  return p;
}

double delta_max(double eps, const TeacherNetwork& t, double C) {
  if (eps <= 0.0 || C <= 0.0) throw std::invalid_argument("delta_max needs eps > 0 and C > 0");
  const SeparationStats st = separation(t);
  const double value = C * t.r() * st.w_max * std::pow(st.w_min, -5.0 / 3.0) * std::cbrt(eps);
  return std::min(value, kPi / 2.0);
}

WeightVector optimal_linear_beta(const TeacherNetwork& t, const StudentNetwork& s) {
  WeightVector beta = WeightVector::Zero(t.dim());
  for (const auto& w : t.neurons) beta += 0.5 * w;
  for (const auto& w : s.neurons) beta -= 0.5 * effective_neuron(w);
  return beta;
}

TeacherNetwork random_teacher(int d, int r, double delta_min, double w_min,
                              double w_max, std::uint64_t seed) {
  if (d < 1 || r < 1) throw std::invalid_argument("random_teacher needs d >= 1 and r >= 1");
  if (!(w_min > 0.0) || w_max < w_min) {
    throw std::invalid_argument("random_teacher needs 0 < w_min <= w_max");
  }
  Rng rng(seed);
  TeacherNetwork t;
  t.neurons.reserve(r);
  constexpr int kMaxAttempts = 100000;
  for (int i = 0; i < r; ++i) {
    int attempts = 0;
    while (true) {
      if (++attempts > kMaxAttempts) {
        throw std::runtime_error("random_teacher: separation " + std::to_string(delta_min) +
                                 " infeasible after " + std::to_string(kMaxAttempts) +
                                 " attempts");
      }
      WeightVector dir(d);
      for (int k = 0; k < d; ++k) dir[k] = rng.gaussian();
      const double n = dir.norm();
      if (n < 1e-12) continue;
      dir /= n;
      bool ok = true;
      for (const auto& prev : t.neurons) {
        if (angle_up_to_sign(dir, prev) < delta_min) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      const double norm = w_min + (w_max - w_min) * rng.uniform();
      t.neurons.push_back(norm * dir);
      break;
    }
  }
  return t;
}

}  // namespace tslab
