#include "tslab/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "tslab/init_solvers.hpp"
#include "tslab/states.hpp"

namespace tslab {

using nlohmann::json;

namespace {

std::string format_double(double x) {
  std::ostringstream ss;
  ss.precision(17);
  ss << x;
  return ss.str();
}

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
  throw std::runtime_error("config error at " + field + ": " + what);
}

const json& require_field(const json& obj, const std::string& field, const std::string& path) {
  if (!obj.contains(field)) config_error(path + "." + field, "missing field");
  return obj.at(field);
}

std::vector<WeightVector> parse_neurons(const json& arr, int d, const std::string& path) {
  if (!arr.is_array() || arr.empty()) config_error(path, "expected nonempty array of vectors");
  std::vector<WeightVector> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const json& row = arr[i];
    if (!row.is_array() || static_cast<int>(row.size()) != d) {
      config_error(path + "[" + std::to_string(i) + "]", "expected vector of length " +
                                                             std::to_string(d));
    }
    WeightVector v(d);
    for (int k = 0; k < d; ++k) {
      if (!row[k].is_number()) {
        config_error(path + "[" + std::to_string(i) + "][" + std::to_string(k) + "]",
                     "expected number");
      }
      v[k] = row[k].get<double>();
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

std::string network_to_json(const StudentNetwork& s) {
  std::ostringstream out;
  out << "{\"d\": " << s.dim() << ", \"neurons\": [";
  for (int j = 0; j < s.m(); ++j) {
    if (j) out << ", ";
    out << "[";
    for (int k = 0; k < s.dim(); ++k) {
      if (k) out << ", ";
      out << format_double(s.neurons[j][k]);
    }
    out << "]";
  }
  out << "]}";
  return out.str();
}

void write_network_json(const StudentNetwork& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << network_to_json(s) << "\n";
}

StudentNetwork read_network_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json doc = json::parse(in);
  const int d = require_field(doc, "d", "network").get<int>();
  StudentNetwork s;
  s.neurons = parse_neurons(require_field(doc, "neurons", "network"), d, "network.neurons");
  return s;
}

void write_trajectory_svg(const TeacherNetwork& t, const Trajectory& traj,
                          const std::string& path) {
  if (t.dim() != 2) throw std::runtime_error("svg plot requires d = 2");
  if (traj.weights.empty()) throw std::runtime_error("svg plot requires recorded weights");

  double radius = 0.0;
  for (const auto& w : t.neurons) radius = std::max(radius, w.norm());
  for (const auto& W : traj.weights) {
    for (int j = 0; j < W.cols(); ++j) radius = std::max(radius, W.col(j).norm());
  }
  radius *= 1.1;
  const double size = 640.0;
  auto px = [&](double x) { return size / 2.0 + x / radius * (size / 2.0 - 10.0); };
  auto py = [&](double y) { return size / 2.0 - y / radius * (size / 2.0 - 10.0); };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
      << "\" viewBox=\"0 0 " << size << " " << size << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // teacher rays through the origin (directions are defined up to sign)
  for (const auto& w : t.neurons) {
    const WeightVector u = w / w.norm() * radius;
    out << "<line x1=\"" << px(-u[0]) << "\" y1=\"" << py(-u[1]) << "\" x2=\"" << px(u[0])
        << "\" y2=\"" << py(u[1]) << "\" stroke=\"blue\" stroke-width=\"1.5\"/>\n";
  }
  const int m = static_cast<int>(traj.weights.front().cols());
  for (int j = 0; j < m; ++j) {
    out << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"0.8\" points=\"";
    for (const auto& W : traj.weights) {
      out << px(W(0, j)) << "," << py(W(1, j)) << " ";
    }
    out << "\"/>\n";
  }
  const Eigen::MatrixXd& last = traj.weights.back();
  for (int j = 0; j < m; ++j) {
    out << "<circle cx=\"" << px(last(0, j)) << "\" cy=\"" << py(last(1, j))
        << "\" r=\"3\" fill=\"red\"/>\n";
  }
  out << "</svg>\n";
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config error at <root>: invalid JSON (" + std::string(e.what()) +
                             ")");
  }

  ExperimentConfig cfg;
  cfg.d = require_field(doc, "d", "config").get<int>();
  cfg.r = require_field(doc, "r", "config").get<int>();
  cfg.m = require_field(doc, "m", "config").get<int>();
  if (cfg.d < 1) config_error("config.d", "must be >= 1");
  if (cfg.r < 1) config_error("config.r", "must be >= 1");
  if (cfg.m < 1) config_error("config.m", "must be >= 1");

  const json& teacher = require_field(doc, "teacher", "config");
  const std::string tkind = require_field(teacher, "kind", "config.teacher").get<std::string>();
  if (tkind == "random") {
    cfg.teacher.random = true;
    cfg.teacher.delta_min = require_field(teacher, "delta_min", "config.teacher").get<double>();
    cfg.teacher.w_min = require_field(teacher, "w_min", "config.teacher").get<double>();
    cfg.teacher.w_max = require_field(teacher, "w_max", "config.teacher").get<double>();
    cfg.teacher.seed = require_field(teacher, "seed", "config.teacher").get<std::uint64_t>();
    if (!(cfg.teacher.w_min > 0.0) || cfg.teacher.w_max < cfg.teacher.w_min) {
      config_error("config.teacher.w_min", "need 0 < w_min <= w_max");
    }
  } else if (tkind == "explicit") {
    cfg.teacher.random = false;
    cfg.teacher.neurons = parse_neurons(require_field(teacher, "neurons", "config.teacher"),
                                        cfg.d, "config.teacher.neurons");
    if (static_cast<int>(cfg.teacher.neurons.size()) != cfg.r) {
      config_error("config.teacher.neurons", "expected r = " + std::to_string(cfg.r) +
                                                 " vectors");
    }
  } else {
    config_error("config.teacher.kind", "expected random | explicit");
  }

  const json& init = require_field(doc, "init", "config");
  const std::string ikind = require_field(init, "kind", "config.init").get<std::string>();
  if (ikind == "random") {
    cfg.init.kind = InitSpec::Kind::Random;
    cfg.init.seed = require_field(init, "seed", "config.init").get<std::uint64_t>();
    if (init.contains("sampled_gram")) cfg.init.sampled_gram = init["sampled_gram"].get<std::int64_t>();
  } else if (ikind == "subspace") {
    cfg.init.kind = InitSpec::Kind::Subspace;
    cfg.init.seed = require_field(init, "seed", "config.init").get<std::uint64_t>();
    cfg.init.subspace_samples = require_field(init, "samples", "config.init").get<std::int64_t>();
  } else if (ikind == "perturbed_teacher") {
    cfg.init.kind = InitSpec::Kind::PerturbedTeacher;
    cfg.init.seed = require_field(init, "seed", "config.init").get<std::uint64_t>();
    cfg.init.scale = require_field(init, "scale", "config.init").get<double>();
  } else if (ikind == "explicit") {
    cfg.init.kind = InitSpec::Kind::Explicit;
    cfg.init.neurons = parse_neurons(require_field(init, "neurons", "config.init"), cfg.d,
                                     "config.init.neurons");
    if (static_cast<int>(cfg.init.neurons.size()) != cfg.m) {
      config_error("config.init.neurons", "expected m = " + std::to_string(cfg.m) + " vectors");
    }
  } else {
    config_error("config.init.kind", "expected random | subspace | perturbed_teacher | explicit");
  }

  const json& train = require_field(doc, "train", "config");
  const std::string mode = require_field(train, "mode", "config.train").get<std::string>();
  if (mode == "gd") {
    cfg.train.mode = TrainMode::GD;
  } else if (mode == "sgd") {
    cfg.train.mode = TrainMode::SGD;
  } else {
    config_error("config.train.mode", "expected gd | sgd");
  }
  if (train.contains("eta_rule")) {
    const std::string rule = train["eta_rule"].get<std::string>();
    if (rule == "auto") {
      cfg.train.eta_rule = EtaRule::Auto;
      if (train.contains("eta_auto_c")) cfg.train.eta_auto_c = train["eta_auto_c"].get<double>();
    } else if (rule == "fixed") {
      cfg.train.eta_rule = EtaRule::Fixed;
    } else {
      config_error("config.train.eta_rule", "expected fixed | auto");
    }
  }
  if (cfg.train.eta_rule == EtaRule::Fixed) {
    cfg.train.eta = require_field(train, "eta", "config.train").get<double>();
    if (!(cfg.train.eta > 0.0)) config_error("config.train.eta", "must be > 0");
  }
  cfg.train.max_steps = require_field(train, "max_steps", "config.train").get<std::int64_t>();
  cfg.train.target_loss = require_field(train, "target_loss", "config.train").get<double>();
  if (cfg.train.target_loss < 0.0) config_error("config.train.target_loss", "must be >= 0");
  if (cfg.train.mode == TrainMode::SGD) {
    cfg.train.batch = require_field(train, "batch", "config.train").get<std::int64_t>();
    if (cfg.train.batch < 1) config_error("config.train.batch", "must be >= 1");
  }
  cfg.train.seed = require_field(train, "seed", "config.train").get<std::uint64_t>();
  if (train.contains("record_every")) {
    cfg.train.record_every = train["record_every"].get<std::int64_t>();
  }
  if (train.contains("record_weights")) {
    cfg.train.record_weights = train["record_weights"].get<bool>();
  }

  if (doc.contains("outputs")) {
    const json& outputs = doc["outputs"];
    if (outputs.contains("trajectory_csv")) cfg.trajectory_csv = outputs["trajectory_csv"];
    if (outputs.contains("final_network_json")) {
      cfg.final_network_json = outputs["final_network_json"];
    }
    if (outputs.contains("svg")) cfg.svg = outputs["svg"];
  }
  return cfg;
}

TeacherNetwork build_teacher(const ExperimentConfig& cfg) {
  if (!cfg.teacher.random) {
    TeacherNetwork t;
    t.neurons = cfg.teacher.neurons;
    return t;
  }
  return random_teacher(cfg.d, cfg.r, cfg.teacher.delta_min, cfg.teacher.w_min, cfg.teacher.w_max,
                        cfg.teacher.seed);
}

StudentNetwork build_init(const ExperimentConfig& cfg, const TeacherNetwork& t) {
  switch (cfg.init.kind) {
    case InitSpec::Kind::Random:
      return random_init(t, cfg.m, cfg.init.seed, cfg.init.sampled_gram);
    case InitSpec::Kind::Subspace:
      return subspace_init(t, cfg.m, cfg.r, cfg.init.subspace_samples, cfg.init.seed);
    case InitSpec::Kind::PerturbedTeacher:
      return make_perturbed_state(t, cfg.m, cfg.init.scale, cfg.init.scale, cfg.init.seed);
    case InitSpec::Kind::Explicit: {
      StudentNetwork s;
      s.neurons = cfg.init.neurons;
      return s;
    }
  }
  throw std::logic_error("unreachable init kind");
}

}  // namespace tslab
