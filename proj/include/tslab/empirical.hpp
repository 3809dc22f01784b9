#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "tslab/networks.hpp"

namespace tslab {

// Finite-sample side: datasets labelled exactly by the teacher, empirical loss
// L_hat and its gradient.

struct Dataset {
  Eigen::MatrixXd inputs;  // N x d
  Eigen::VectorXd labels;  // N
  std::uint64_t seed = 0;

  std::int64_t size() const { return inputs.rows(); }
  int dim() const { return static_cast<int>(inputs.cols()); }
};

Dataset sample_dataset(const TeacherNetwork& t, std::int64_t N, std::uint64_t seed);

double empirical_loss(const StudentNetwork& s, const Dataset& data);

std::vector<WeightVector> empirical_gradient(const StudentNetwork& s, const Dataset& data);

// Datasets are materialized up to this size; above it callers regenerate the
// stream from the seed per pass (fresh mini-batches are the common case, so
// nothing large ever needs to be stored).
constexpr std::int64_t kMaterializeCap = 10000000;

// Single pass over the seeded stream; identical samples, labels and
// accumulation order as the materialized path, so results are bit-equal.
double empirical_loss_streamed(const TeacherNetwork& t, const StudentNetwork& s, std::int64_t N,
                               std::uint64_t seed);
std::vector<WeightVector> empirical_gradient_streamed(const TeacherNetwork& t,
                                                      const StudentNetwork& s, std::int64_t N,
                                                      std::uint64_t seed);

// CSV with header x_0,...,x_{d-1},y
void write_dataset_csv(const Dataset& data, const std::string& path);
Dataset read_dataset_csv(const std::string& path);

}  // namespace tslab
