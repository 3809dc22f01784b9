#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "tslab/networks.hpp"
#include "tslab/population.hpp"

namespace tslab {

enum class TrainMode { GD, SGD };
enum class EtaRule { Fixed, Auto };  // auto: eta = c / (r * w_max)
enum class StopReason { TargetReached, StepCap, Divergence };

struct TrainConfig {
  double eta = 1e-3;
  EtaRule eta_rule = EtaRule::Fixed;
  double eta_auto_c = 0.01;
  std::int64_t max_steps = 100000;
  double target_loss = 0.0;
  TrainMode mode = TrainMode::GD;
  std::int64_t batch = 4096;     // SGD mini-batch, fresh samples per step
  std::uint64_t seed = 0;
  std::int64_t record_every = 1;  // 0 records only first and last
  bool record_weights = false;    // honored when record_every > 0 and d*m <= 1e4
};

struct Snapshot {
  std::int64_t step = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  std::vector<Eigen::MatrixXd> weights;  // aligned with snapshots when recorded
  StopReason reason = StopReason::StepCap;
  std::int64_t final_step = 0;
  double final_loss = 0.0;
};

struct TrainResult {
  Trajectory trajectory;
  StudentNetwork final_state;
};

double resolve_eta(const TrainConfig& cfg, const TeacherNetwork& t);

// One simultaneous gradient-descent update. Throws on a non-finite gradient.
StudentNetwork gd_step(const TeacherNetwork& t, const StudentNetwork& s, double eta);

// One step on a fresh seeded dataset of size N.
StudentNetwork sgd_step(const TeacherNetwork& t, const StudentNetwork& s, double eta,
                        std::int64_t N, std::uint64_t seed);

TrainResult train(const TeacherNetwork& t, const StudentNetwork& s0, const TrainConfig& cfg);

// step,loss,grad_norm[,neuron,w_0..w_{d-1}]
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

const char* stop_reason_name(StopReason reason);

}  // namespace tslab
