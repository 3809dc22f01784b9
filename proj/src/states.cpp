#include "tslab/states.hpp"

#include <cmath>
#include <stdexcept>

#include "tslab/rng.hpp"

namespace tslab {

WarmupState make_warmup_state(double delta) {
  if (!(delta > 0.0) || delta >= 1.5) throw std::invalid_argument("warmup delta out of range");
  WarmupState state;
  WeightVector teacher(2);
  teacher << 1.0, 0.0;
  state.teacher.neurons.push_back(teacher);
  const double norm = 1.0 / std::sqrt(2.0 * std::cos(delta));
  WeightVector up(2), down(2);
  up << std::cos(delta), std::sin(delta);
  down << std::cos(delta), -std::sin(delta);
  state.student.neurons.push_back(norm * up);
  state.student.neurons.push_back(norm * down);
  state.delta = delta;
  return state;
}

StudentNetwork make_perturbed_state(const TeacherNetwork& t, int m, double angle_scale,
                                    double mass_scale, std::uint64_t seed) {
  if (m < t.r()) throw std::invalid_argument("perturbed state needs m >= r");
  const int d = t.dim();
  Rng rng(seed);
  std::vector<int> group_size(t.r(), 0);
  for (int j = 0; j < m; ++j) ++group_size[j % t.r()];

  StudentNetwork s;
  s.neurons.resize(m);
  for (int j = 0; j < m; ++j) {
    const int i = j % t.r();
    const double teacher_norm = t.neurons[i].norm();
    WeightVector dir = t.neurons[i] / teacher_norm;
    for (int k = 0; k < d; ++k) dir[k] += angle_scale * rng.gaussian();
    dir /= dir.norm();
    double mass = teacher_norm / static_cast<double>(group_size[i]);
    mass *= std::max(0.1, 1.0 + mass_scale * rng.gaussian());
    s.neurons[j] = std::sqrt(mass) * dir;
  }
  return s;
}

}  // namespace tslab
