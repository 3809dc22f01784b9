#pragma once

#include <cstdint>

#include "tslab/networks.hpp"

namespace tslab {

// One unit teacher e1 in the plane, two students at angles +/- delta with
// norms 1/sqrt(2 cos delta), so the average neuron matches the teacher
// exactly and the loss is pure activation mismatch.
struct WarmupState {
  TeacherNetwork teacher;
  StudentNetwork student;
  double delta = 0.0;
};

WarmupState make_warmup_state(double delta);

// Students spread round-robin over the teachers: directions tilted by
// ~angle_scale, effective masses split evenly within each group and jittered
// by ~mass_scale. Low-loss states for the landscape checks.
StudentNetwork make_perturbed_state(const TeacherNetwork& t, int m, double angle_scale,
                                    double mass_scale, std::uint64_t seed);

}  // namespace tslab
