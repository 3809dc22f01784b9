#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "tslab/networks.hpp"
#include "tslab/trainer.hpp"

namespace tslab {

// Network JSON: {"d": ..., "neurons": [[...], ...]} at full decimal precision.
void write_network_json(const StudentNetwork& s, const std::string& path);
std::string network_to_json(const StudentNetwork& s);
StudentNetwork read_network_json(const std::string& path);

// Plane plot of a d = 2 run: blue teacher rays, black per-neuron weight
// trajectories, red endpoint dots. Requires recorded weights.
void write_trajectory_svg(const TeacherNetwork& t, const Trajectory& traj,
                          const std::string& path);

struct TeacherSpec {
  bool random = true;
  // random
  double delta_min = 0.5;
  double w_min = 1.0;
  double w_max = 1.0;
  std::uint64_t seed = 1;
  // explicit
  std::vector<WeightVector> neurons;
};

struct InitSpec {
  enum class Kind { Random, Subspace, PerturbedTeacher, Explicit } kind = Kind::Random;
  std::uint64_t seed = 2;
  std::int64_t subspace_samples = 100000;
  std::int64_t sampled_gram = 0;  // 0: exact closed-form Gram
  double scale = 0.05;            // perturbed_teacher
  std::vector<WeightVector> neurons;
};

struct ExperimentConfig {
  int d = 2;
  int r = 1;
  int m = 1;
  TeacherSpec teacher;
  InitSpec init;
  TrainConfig train;
  std::string trajectory_csv;
  std::string final_network_json;
  std::string svg;
};

// Throws std::runtime_error with the offending field path on schema violations.
ExperimentConfig load_experiment_config(const std::string& path);

TeacherNetwork build_teacher(const ExperimentConfig& cfg);
StudentNetwork build_init(const ExperimentConfig& cfg, const TeacherNetwork& t);

}  // namespace tslab
