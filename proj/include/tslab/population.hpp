#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "tslab/networks.hpp"

namespace tslab {

// Exact (sampling-free) population loss, gradient, residual decomposition and
// the matrix M, assembled from the closed-form Gaussian kernels. Pairwise sums
// use compensated accumulation; near-optimal states cancel to ~1e-16 relative.

struct ResidualStats {
  double loss = 0.0;
  std::vector<WeightVector> avg_neurons;  // w_hat_i
  std::vector<WeightVector> gaps;         // v_i = w_hat_i - w_i*
  double r1_norm_sq = 0.0;                // E[R1^2] = v^T M v
  double r2_norm_sq = 0.0;                // E[R2^2]
  double cross_term = 0.0;                // E[R1 R2]
};

struct HessianSurrogate {
  Eigen::MatrixXd M;  // dr x dr, blocks M_ij = Scov(w_i*, w_j*)
  double min_eigenvalue = 0.0;
};

struct CoverageError : std::runtime_error {
  CoverageError(int teacher, double dmax)
      : std::runtime_error("teacher " + std::to_string(teacher) +
                           " has no student within delta_max = " + std::to_string(dmax)),
        teacher_index(teacher) {}
  int teacher_index;
};

double population_loss(const TeacherNetwork& t, const StudentNetwork& s);

std::vector<WeightVector> population_gradient(const TeacherNetwork& t, const StudentNetwork& s);

double gradient_frobenius_norm(const std::vector<WeightVector>& grad);

ResidualStats residual_stats(const TeacherNetwork& t, const StudentNetwork& s,
                             const NeuronPartition& partition);

HessianSurrogate build_M(const TeacherNetwork& t);

// Paper descent direction with q_ij = |w_j| / sum_{T_i(dmax)} |w_j|^2;
// (I + u u^T)^{-1} expanded as I - u u^T / 2. Throws CoverageError when a
// teacher has no positive-norm student within delta_max(eps, C).
std::vector<WeightVector> descent_direction(const TeacherNetwork& t, const StudentNetwork& s,
                                            const NeuronPartition& partition, double eps,
                                            double C);

// Fused loss + gradient evaluation sharing the pairwise cosine table; the hot
// path for the trainer. Buffers live in the engine, teacher-side constants are
// cached at construction.
class PopulationEngine {
 public:
  explicit PopulationEngine(const TeacherNetwork& t);

  double loss(const StudentNetwork& s);
  // returns loss; gradient written as columns of grad (d x m, resized)
  double loss_and_gradient(const StudentNetwork& s, Eigen::MatrixXd& grad);

  const TeacherNetwork& teacher() const { return teacher_; }

 private:
  TeacherNetwork teacher_;
  Eigen::MatrixXd teacher_units_;     // d x r
  Eigen::VectorXd teacher_norms_;     // r
  double teacher_self_term_ = 0.0;    // sum_{i,i'} K(w_i*, w_i'*)
  // per-call workspaces
  Eigen::MatrixXd units_;             // d x m
  Eigen::VectorXd masses_;            // m, |w_j|^2
  Eigen::VectorXd norms_;             // m
  Eigen::MatrixXd rho_ss_;            // m x m
  Eigen::MatrixXd rho_st_;            // m x r
};

}  // namespace tslab
