#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tslab/networks.hpp"
#include "tslab/rng.hpp"

using namespace tslab;

namespace {
WeightVector vec2(double x, double y) {
  WeightVector v(2);
  v << x, y;
  return v;
}
constexpr double kPi = 3.14159265358979323846;
}  // namespace

TEST_CASE("angle_up_to_sign basics") {
  CHECK(angle_up_to_sign(vec2(1, 0), vec2(1, 0)) == doctest::Approx(0.0));
  CHECK(angle_up_to_sign(vec2(1, 0), vec2(-1, 0)) == doctest::Approx(0.0));
  CHECK(angle_up_to_sign(vec2(1, 0), vec2(0, 1)) == doctest::Approx(kPi / 2));
  CHECK_THROWS_AS(angle_up_to_sign(vec2(0, 0), vec2(1, 0)), std::invalid_argument);
}

TEST_CASE("angle_up_to_sign symmetry and scale invariance") {
  Rng rng(11);
  for (int k = 0; k < 200; ++k) {
    WeightVector u(3), v(3);
    for (int i = 0; i < 3; ++i) {
      u[i] = rng.gaussian();
      v[i] = rng.gaussian();
    }
    if (u.norm() < 1e-6 || v.norm() < 1e-6) continue;
    const double a = angle_up_to_sign(u, v);
    CHECK(a == doctest::Approx(angle_up_to_sign(v, u)));
    CHECK(a == doctest::Approx(angle_up_to_sign(3.7 * u, v)));
    CHECK(a == doctest::Approx(angle_up_to_sign(u, -v)));
    CHECK(a >= 0.0);
    CHECK(a <= kPi / 2 + 1e-15);
  }
}

TEST_CASE("effective_neuron") {
  CHECK(effective_neuron(vec2(0, 0)).norm() == 0.0);
  CHECK((effective_neuron(vec2(1, 0)) - vec2(1, 0)).norm() == doctest::Approx(0.0));
  CHECK((effective_neuron(vec2(2, 0)) - vec2(4, 0)).norm() == doctest::Approx(0.0));
  // not even in w, but norm is always |w|^2
  Rng rng(5);
  for (int k = 0; k < 50; ++k) {
    WeightVector w(4);
    for (int i = 0; i < 4; ++i) w[i] = rng.gaussian();
    CHECK(effective_neuron(w).norm() == doctest::Approx(w.squaredNorm()));
    CHECK((effective_neuron(-w) + effective_neuron(w)).norm() == doctest::Approx(0.0));
  }
}

TEST_CASE("separation") {
  TeacherNetwork t;
  t.neurons = {vec2(1, 0), vec2(0, 1)};
  SeparationStats st = separation(t);
  CHECK(st.delta == doctest::Approx(kPi / 2));
  CHECK(st.w_min == doctest::Approx(1.0));
  CHECK(st.w_max == doctest::Approx(1.0));

  TeacherNetwork single;
  single.neurons = {vec2(1, 0)};
  st = separation(single);
  CHECK(st.delta == doctest::Approx(kPi / 2));

  TeacherNetwork angled;
  angled.neurons = {vec2(2, 0), vec2(std::cos(0.3), std::sin(0.3))};
  st = separation(angled);
  CHECK(st.delta == doctest::Approx(0.3));
  CHECK(st.w_min == doctest::Approx(1.0));
  CHECK(st.w_max == doctest::Approx(2.0));

  TeacherNetwork bad;
  bad.neurons = {vec2(0, 0)};
  CHECK_THROWS_AS(separation(bad), std::invalid_argument);
}

TEST_CASE("partition_students") {
  TeacherNetwork t;
  t.neurons = {vec2(1, 0), vec2(0, 1)};

  StudentNetwork s;
  s.neurons = {vec2(0.9, 0)};
  NeuronPartition p = partition_students(t, s);
  CHECK(p.assignment[0] == 0);
  CHECK(p.angles[0] == doctest::Approx(0.0));

  // exact tie goes to the lowest teacher index
  s.neurons = {vec2(1 / std::sqrt(2.0), 1 / std::sqrt(2.0))};
  p = partition_students(t, s);
  CHECK(p.assignment[0] == 0);
  CHECK(p.angles[0] == doctest::Approx(kPi / 4));

  // sign symmetry: -e2 belongs to teacher 1 with a flip
  s.neurons = {vec2(0, -1)};
  p = partition_students(t, s);
  CHECK(p.assignment[0] == 1);
  CHECK(p.sign_flips[0] == -1);
  CHECK(p.angles[0] == doctest::Approx(0.0));

  // zero student: teacher 0, angle 0, flip +1
  s.neurons = {vec2(0, 0)};
  p = partition_students(t, s);
  CHECK(p.assignment[0] == 0);
  CHECK(p.angles[0] == 0.0);
  CHECK(p.sign_flips[0] == 1);
}

TEST_CASE("partition canonicalization property") {
  Rng rng(77);
  const TeacherNetwork t = random_teacher(3, 3, 0.3, 0.5, 2.0, 123);
  for (int rep = 0; rep < 50; ++rep) {
    StudentNetwork s;
    for (int j = 0; j < 6; ++j) {
      WeightVector w(3);
      for (int i = 0; i < 3; ++i) w[i] = rng.gaussian();
      s.neurons.push_back(w);
    }
    const NeuronPartition p = partition_students(t, s);
    for (int j = 0; j < s.m(); ++j) {
      if (s.neurons[j].norm() == 0.0) continue;
      CHECK(p.sign_flips[j] * s.neurons[j].dot(t.neurons[p.assignment[j]]) >= 0.0);
    }
  }
}

TEST_CASE("delta_max formula") {
  TeacherNetwork t;
  t.neurons = {vec2(1, 0)};
  CHECK(delta_max(1e-6, t, 1.0) == doctest::Approx(0.01));
  CHECK(delta_max(1.0, t, 10.0) == doctest::Approx(kPi / 2));  // cap

  TeacherNetwork t2;
  t2.neurons = {vec2(1, 0), vec2(0, 1)};
  CHECK(delta_max(8e-6, t2, 1.0) == doctest::Approx(0.04));
}

TEST_CASE("optimal_linear_beta") {
  TeacherNetwork t;
  t.neurons = {vec2(1, 0)};
  StudentNetwork s;
  s.neurons = {vec2(0, 0)};
  CHECK((optimal_linear_beta(t, s) - vec2(0.5, 0)).norm() == doctest::Approx(0.0));

  // students whose effective sum equals the teacher sum
  s.neurons = {vec2(1, 0)};
  CHECK(optimal_linear_beta(t, s).norm() == doctest::Approx(0.0));

  TeacherNetwork cancel;
  cancel.neurons = {vec2(1, 0), vec2(-1, 0)};
  StudentNetwork zero;
  zero.neurons = {vec2(0, 0)};
  CHECK(optimal_linear_beta(cancel, zero).norm() == doctest::Approx(0.0));
}

TEST_CASE("random_teacher respects the requested separation") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const double req = 0.2 + 0.05 * static_cast<double>(seed % 4);
    const TeacherNetwork t = random_teacher(3, 4, req, 0.5, 2.0, seed);
    const SeparationStats st = separation(t);
    CHECK(st.delta >= req - 1e-12);
    CHECK(st.w_min >= 0.5 - 1e-12);
    CHECK(st.w_max <= 2.0 + 1e-12);
  }
  CHECK_THROWS_AS(random_teacher(2, 40, 1.5, 1.0, 1.0, 0), std::runtime_error);
}
