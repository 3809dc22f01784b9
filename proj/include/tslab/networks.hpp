#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace tslab {

using WeightVector = Eigen::VectorXd;

// Ground-truth network f*(x) = sum_i |w_i*^T x|.
struct TeacherNetwork {
  std::vector<WeightVector> neurons;

  int r() const { return static_cast<int>(neurons.size()); }
  int dim() const { return neurons.empty() ? 0 : static_cast<int>(neurons.front().size()); }
};

// Trainable network f(x) = sum_j ||w_j|| |w_j^T x|.
struct StudentNetwork {
  std::vector<WeightVector> neurons;

  int m() const { return static_cast<int>(neurons.size()); }
  int dim() const { return neurons.empty() ? 0 : static_cast<int>(neurons.front().size()); }
};

// Assignment of students to their nearest teacher, with angles measured up
// to sign and the sign flips that make each student positively correlated
// with its teacher. Zero students go to teacher 0 with angle 0, flip +1.
struct NeuronPartition {
  std::vector<int> assignment;    // student j -> teacher index
  std::vector<double> angles;     // delta_j in [0, pi/2]
  std::vector<int> sign_flips;    // +1 or -1

  std::vector<std::vector<int>> groups(int r) const;
};

struct SeparationStats {
  double delta;   // min pairwise angle up to sign; pi/2 for r = 1
  double w_min;
  double w_max;
};

// arccos(|u.v| / (|u||v|)), clamped into [0, pi/2]. Throws on zero input.
double angle_up_to_sign(const WeightVector& u, const WeightVector& v);

// Sign-sensitive angle arccos(u.v / (|u||v|)) in [0, pi]. Throws on zero input.
double angle_signed(const WeightVector& u, const WeightVector& v);

// ||w|| w; zero maps to zero.
WeightVector effective_neuron(const WeightVector& w);

SeparationStats separation(const TeacherNetwork& t);

NeuronPartition partition_students(const TeacherNetwork& t, const StudentNetwork& s);

// delta_max(eps) = C r w_max w_min^{-5/3} eps^{1/3}, capped at pi/2.
double delta_max(double eps, const TeacherNetwork& t, double C);

// beta = 1/2 sum_i w_i* - 1/2 sum_j ||w_j|| w_j, the optimal linear fit that
// reduces a ReLU teacher to the absolute-value problem.
WeightVector optimal_linear_beta(const TeacherNetwork& t, const StudentNetwork& s);

// Random unit directions, rejection-sampled one at a time until every pair is
// at least delta_min apart (up to sign); norms uniform in [w_min, w_max].
TeacherNetwork random_teacher(int d, int r, double delta_min, double w_min,
                              double w_max, std::uint64_t seed);

}  // namespace tslab
