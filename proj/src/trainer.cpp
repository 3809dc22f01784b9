#include "tslab/trainer.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "tslab/empirical.hpp"
#include "tslab/rng.hpp"

namespace tslab {

double resolve_eta(const TrainConfig& cfg, const TeacherNetwork& t) {
  if (cfg.eta_rule == EtaRule::Fixed) {
    if (!(cfg.eta > 0.0)) throw std::invalid_argument("train: eta must be > 0");
    return cfg.eta;
  }
  const SeparationStats st = separation(t);
  return cfg.eta_auto_c / (static_cast<double>(t.r()) * st.w_max);
}

namespace {

StudentNetwork apply_update(const StudentNetwork& s, const Eigen::MatrixXd& grad, double eta) {
  if (!grad.allFinite()) throw std::runtime_error("gradient diverged (non-finite entries)");
  StudentNetwork next = s;
  for (int j = 0; j < s.m(); ++j) next.neurons[j] -= eta * grad.col(j);
  return next;
}

}  // namespace

StudentNetwork gd_step(const TeacherNetwork& t, const StudentNetwork& s, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("gd_step: eta must be > 0");
  PopulationEngine engine(t);
  Eigen::MatrixXd grad;
  engine.loss_and_gradient(s, grad);
  return apply_update(s, grad, eta);
}

StudentNetwork sgd_step(const TeacherNetwork& t, const StudentNetwork& s, double eta,
                        std::int64_t N, std::uint64_t seed) {
  if (!(eta > 0.0)) throw std::invalid_argument("sgd_step: eta must be > 0");
  const std::vector<WeightVector> grad_vec =
      N > kMaterializeCap ? empirical_gradient_streamed(t, s, N, seed)
                          : empirical_gradient(s, sample_dataset(t, N, seed));
  Eigen::MatrixXd grad(s.dim(), s.m());
  for (int j = 0; j < s.m(); ++j) grad.col(j) = grad_vec[j];
  return apply_update(s, grad, eta);
}

TrainResult train(const TeacherNetwork& t, const StudentNetwork& s0, const TrainConfig& cfg) {
  if (cfg.max_steps < 0) throw std::invalid_argument("train: max_steps must be >= 0");
  if (cfg.mode == TrainMode::SGD && cfg.batch < 1) {
    throw std::invalid_argument("train: SGD needs batch >= 1");
  }
  const double eta = resolve_eta(cfg, t);
  PopulationEngine engine(t);

  const bool keep_weights =
      cfg.record_weights && cfg.record_every > 0 &&
      static_cast<std::int64_t>(t.dim()) * s0.m() <= 10000;

  TrainResult result;
  result.final_state = s0;
  Trajectory& traj = result.trajectory;

  Eigen::MatrixXd grad(t.dim(), s0.m());
  Eigen::MatrixXd weights(t.dim(), s0.m());
  double initial_loss = 0.0;

  auto record = [&](std::int64_t step, double loss, double grad_norm) {
    traj.snapshots.push_back({step, loss, grad_norm});
    if (keep_weights) {
      for (int j = 0; j < result.final_state.m(); ++j) {
        weights.col(j) = result.final_state.neurons[j];
      }
      traj.weights.push_back(weights);
    }
  };

  for (std::int64_t step = 0;; ++step) {
    double loss;
    double grad_norm;
    if (cfg.mode == TrainMode::GD) {
      loss = engine.loss_and_gradient(result.final_state, grad);
      grad_norm = grad.norm();
    } else {
      loss = engine.loss(result.final_state);
      const Dataset batch =
          sample_dataset(t, cfg.batch, derive_seed(cfg.seed, static_cast<std::uint64_t>(step)));
      const std::vector<WeightVector> g = empirical_gradient(result.final_state, batch);
      for (int j = 0; j < result.final_state.m(); ++j) grad.col(j) = g[j];
      grad_norm = grad.norm();
    }
    if (step == 0) initial_loss = loss;

    const bool due = cfg.record_every > 0 && step % cfg.record_every == 0;
    const bool target = loss <= cfg.target_loss;
    const bool cap = step >= cfg.max_steps;
    const bool diverged =
        !std::isfinite(loss) || (step > 0 && loss > 10.0 * initial_loss && loss > 1e-300);
    if (due || step == 0 || target || cap || diverged) record(step, loss, grad_norm);

    if (target || cap || diverged) {
      traj.reason = target ? StopReason::TargetReached
                           : (diverged ? StopReason::Divergence : StopReason::StepCap);
      traj.final_step = step;
      traj.final_loss = loss;
      break;
    }
    result.final_state = apply_update(result.final_state, grad, eta);
  }
  return result;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.precision(17);
  const bool with_weights = !traj.weights.empty();
  out << "step,loss,grad_norm";
  if (with_weights) {
    out << ",neuron";
    for (int k = 0; k < traj.weights.front().rows(); ++k) out << ",w_" << k;
  }
  out << "\n";
  for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
    const Snapshot& snap = traj.snapshots[s];
    if (!with_weights) {
      out << snap.step << "," << snap.loss << "," << snap.grad_norm << "\n";
      continue;
    }
    const Eigen::MatrixXd& W = traj.weights[s];
    for (int j = 0; j < W.cols(); ++j) {
      out << snap.step << "," << snap.loss << "," << snap.grad_norm << "," << j;
      for (int k = 0; k < W.rows(); ++k) out << "," << W(k, j);
      out << "\n";
    }
  }
}

const char* stop_reason_name(StopReason reason) {
  switch (reason) {
    case StopReason::TargetReached: return "target_reached";
    case StopReason::StepCap: return "step_cap";
    case StopReason::Divergence: return "divergence";
  }
  return "unknown";
}

}  // namespace tslab
