#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "tslab/empirical.hpp"
#include "tslab/networks.hpp"

namespace tslab {

// Algorithm 1 (random directions + nonnegative least squares on the norms) and
// Algorithm 2 (spectral subspace estimate, then the same NNLS rescale). The
// NNLS quadratic is 1/2 z^T G z - b^T z with the closed-form Gram
// G_ij = K(w_i, w_j), b_i = sum_j K(w_i, w_j*).

struct NNLSResult {
  Eigen::VectorXd z;
  double objective = 0.0;           // 1/2 z^T G z - b^T z
  std::vector<int> active_set;      // indices pinned at zero
};

// Lawson-Hanson active set on a PSD Gram matrix. Throws on a non-PSD G
// (diagonal negative beyond tolerance) or when the iteration cap 10*m is hit.
NNLSResult nnls(const Eigen::MatrixXd& G, const Eigen::VectorXd& b);

struct MomentMatrix {
  Eigen::MatrixXd M_hat;  // d x d, symmetrized
  std::int64_t N = 0;
};

// M_hat = (1/N) sum_k y_k (x_k x_k^T - I)
MomentMatrix moment_matrix(const Dataset& data);

// Population limit sqrt(2/pi) sum_i |w_i*| w_bar_i* w_bar_i*^T (exactly rank <= r).
Eigen::MatrixXd population_moment_matrix(const TeacherNetwork& t);

// Largest principal angle between the column spans of two orthonormal bases.
double largest_principal_angle(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

// Orthonormal top-r eigenvectors of the symmetrized matrix, ordered by
// descending |eigenvalue|, sign fixed so the first nonzero component is positive.
Eigen::MatrixXd top_eigenvectors(const Eigen::MatrixXd& sym, int r);

// Algorithm 1. sampled_gram_n = 0 solves the exact closed-form Gram (default);
// > 0 estimates Gram and b from that many fresh samples.
StudentNetwork random_init(const TeacherNetwork& t, int m, std::uint64_t seed,
                           std::int64_t sampled_gram_n = 0);

// Algorithm 2: subspace from N samples, Gaussian draw inside it, NNLS rescale.
StudentNetwork subspace_init(const TeacherNetwork& t, int m, int r, std::int64_t N,
                             std::uint64_t seed);

// Shared rescale: effective neuron of the output equals z_i * w_i exactly.
StudentNetwork rescale_by_nnls(const TeacherNetwork& t, const std::vector<WeightVector>& dirs,
                               std::int64_t sampled_gram_n, std::uint64_t seed);

}  // namespace tslab
