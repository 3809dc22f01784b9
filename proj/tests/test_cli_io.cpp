#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "tslab/io.hpp"
#include "tslab/population.hpp"
#include "tslab/states.hpp"
#include "tslab/trainer.hpp"

using namespace tslab;

namespace {
void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  out << body;
}
}  // namespace

TEST_CASE("network json round trip preserves full precision") {
  StudentNetwork s;
  WeightVector w(3);
  w << 0.1234567890123456789, -2.718281828459045, 1e-17;
  s.neurons = {w, WeightVector::Zero(3)};
  const std::string path = "test_net.json";
  write_network_json(s, path);
  const StudentNetwork back = read_network_json(path);
  REQUIRE(back.m() == 2);
  CHECK(back.dim() == 3);
  for (int j = 0; j < 2; ++j) {
    CHECK((back.neurons[j] - s.neurons[j]).norm() == 0.0);
  }
  std::remove(path.c_str());
}

TEST_CASE("experiment config parses and builds") {
  const std::string path = "test_cfg.json";
  write_file(path, R"({
    "d": 2, "r": 2, "m": 4,
    "teacher": {"kind": "random", "delta_min": 0.5, "w_min": 1.0, "w_max": 1.0, "seed": 3},
    "init": {"kind": "perturbed_teacher", "scale": 0.05, "seed": 4},
    "train": {"mode": "gd", "eta_rule": "auto", "max_steps": 1000,
              "target_loss": 1e-6, "seed": 5, "record_every": 100}
  })");
  const ExperimentConfig cfg = load_experiment_config(path);
  CHECK(cfg.d == 2);
  CHECK(cfg.train.eta_rule == EtaRule::Auto);
  const TeacherNetwork t = build_teacher(cfg);
  CHECK(t.r() == 2);
  const StudentNetwork s = build_init(cfg, t);
  CHECK(s.m() == 4);
  CHECK(population_loss(t, s) < 0.5);
  std::remove(path.c_str());
}

TEST_CASE("config errors carry the field path") {
  const std::string path = "test_bad_cfg.json";
  write_file(path, R"({"d": 2, "r": 1, "m": 1,
    "teacher": {"kind": "random", "delta_min": 0.5, "w_min": 1.0, "w_max": 1.0, "seed": 1},
    "init": {"kind": "random", "seed": 1},
    "train": {"mode": "gd", "max_steps": 10, "target_loss": 0.0, "seed": 1}})");
  // fixed eta rule but no eta
  CHECK_THROWS_WITH_AS(load_experiment_config(path),
                       doctest::Contains("config.train.eta"), std::runtime_error);

  write_file(path, R"({"d": 2, "r": 1, "m": 1,
    "teacher": {"kind": "sideways"},
    "init": {"kind": "random", "seed": 1},
    "train": {"mode": "gd", "eta": 0.1, "max_steps": 10, "target_loss": 0.0, "seed": 1}})");
  CHECK_THROWS_WITH_AS(load_experiment_config(path),
                       doctest::Contains("config.teacher.kind"), std::runtime_error);

  write_file(path, "{ not json");
  CHECK_THROWS_AS(load_experiment_config(path), std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("explicit teacher and init vectors") {
  const std::string path = "test_explicit_cfg.json";
  write_file(path, R"({
    "d": 2, "r": 1, "m": 2,
    "teacher": {"kind": "explicit", "neurons": [[1.0, 0.0]]},
    "init": {"kind": "explicit", "neurons": [[0.5, 0.0], [0.0, 0.5]]},
    "train": {"mode": "gd", "eta": 0.01, "max_steps": 10, "target_loss": 0.0, "seed": 1}
  })");
  const ExperimentConfig cfg = load_experiment_config(path);
  const TeacherNetwork t = build_teacher(cfg);
  CHECK(t.neurons[0][0] == 1.0);
  const StudentNetwork s = build_init(cfg, t);
  CHECK(s.neurons[1][1] == 0.5);
  std::remove(path.c_str());
}

TEST_CASE("svg plot emits teacher rays and trajectories") {
  const TeacherNetwork t = random_teacher(2, 3, 0.5, 1.0, 1.0, 9);
  const StudentNetwork s0 = make_perturbed_state(t, 5, 0.1, 0.1, 10);
  TrainConfig cfg;
  cfg.eta_rule = EtaRule::Auto;
  cfg.max_steps = 500;
  cfg.target_loss = 0.0;
  cfg.record_every = 100;
  cfg.record_weights = true;
  const TrainResult result = train(t, s0, cfg);
  const std::string path = "test_plot.svg";
  write_trajectory_svg(t, result.trajectory, path);
  std::ifstream in(path);
  std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(body.find("<svg") != std::string::npos);
  CHECK(body.find("stroke=\"blue\"") != std::string::npos);   // teacher rays
  CHECK(body.find("<polyline") != std::string::npos);          // neuron paths
  CHECK(body.find("fill=\"red\"") != std::string::npos);       // endpoints
  in.close();
  std::remove(path.c_str());
}
