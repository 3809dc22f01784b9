#include "tslab/empirical.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tslab/rng.hpp"

namespace tslab {

Dataset sample_dataset(const TeacherNetwork& t, std::int64_t N, std::uint64_t seed) {
  if (N < 1) throw std::invalid_argument("sample_dataset: N must be >= 1");
  const int d = t.dim();
  Dataset data;
  data.seed = seed;
  data.inputs.resize(N, d);
  data.labels.resize(N);
  Rng rng(seed);
  Eigen::VectorXd x(d);
  for (std::int64_t k = 0; k < N; ++k) {
    for (int i = 0; i < d; ++i) x[i] = rng.gaussian();
    double y = 0.0;
    for (const auto& w : t.neurons) y += std::abs(w.dot(x));
    data.inputs.row(k) = x.transpose();
    data.labels[k] = y;
  }
  return data;
}

namespace {
void check_dims(const StudentNetwork& s, const Dataset& data) {
  if (s.dim() != data.dim()) {
    throw std::invalid_argument("student dimension " + std::to_string(s.dim()) +
                                " does not match dataset dimension " +
                                std::to_string(data.dim()));
  }
}
}  // namespace

double empirical_loss(const StudentNetwork& s, const Dataset& data) {
  check_dims(s, data);
  const std::int64_t N = data.size();
  const int m = s.m();
  std::vector<double> norms(m);
  for (int j = 0; j < m; ++j) norms[j] = s.neurons[j].norm();
  double total = 0.0;
  for (std::int64_t k = 0; k < N; ++k) {
    double f = 0.0;
    for (int j = 0; j < m; ++j) {
      if (norms[j] == 0.0) continue;
      f += norms[j] * std::abs(s.neurons[j].dot(data.inputs.row(k)));
    }
    const double res = f - data.labels[k];
    total += res * res;
  }
  return total / (2.0 * static_cast<double>(N));
}

std::vector<WeightVector> empirical_gradient(const StudentNetwork& s, const Dataset& data) {
  check_dims(s, data);
  const std::int64_t N = data.size();
  const int d = s.dim();
  const int m = s.m();
  std::vector<double> norms(m);
  Eigen::MatrixXd units(d, m);
  for (int j = 0; j < m; ++j) {
    norms[j] = s.neurons[j].norm();
    units.col(j) = norms[j] > 0.0 ? (s.neurons[j] / norms[j]).eval() : WeightVector::Zero(d);
  }
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(d, m);
  Eigen::VectorXd x(d);
  for (std::int64_t k = 0; k < N; ++k) {
    x = data.inputs.row(k).transpose();
    double f = 0.0;
    for (int j = 0; j < m; ++j) {
      if (norms[j] > 0.0) f += norms[j] * std::abs(s.neurons[j].dot(x));
    }
    const double res = f - data.labels[k];
    if (res == 0.0) continue;
    for (int j = 0; j < m; ++j) {
      if (norms[j] == 0.0) continue;
      const double proj = units.col(j).dot(x);
      const double sgn = proj > 0.0 ? 1.0 : (proj < 0.0 ? -1.0 : 0.0);
      if (sgn == 0.0) continue;
      // R(x) |w_j| (I + u u^T) x sgn(w_j.x)
      grad.col(j) += res * norms[j] * sgn * (x + proj * units.col(j));
    }
  }
  grad /= static_cast<double>(N);
  std::vector<WeightVector> out(m);
  for (int j = 0; j < m; ++j) out[j] = grad.col(j);
  return out;
}

double empirical_loss_streamed(const TeacherNetwork& t, const StudentNetwork& s, std::int64_t N,
                               std::uint64_t seed) {
  if (N < 1) throw std::invalid_argument("empirical_loss_streamed: N must be >= 1");
  if (s.dim() != t.dim()) throw std::invalid_argument("dimension mismatch");
  const int d = t.dim();
  const int m = s.m();
  std::vector<double> norms(m);
  for (int j = 0; j < m; ++j) norms[j] = s.neurons[j].norm();
  Rng rng(seed);
  Eigen::VectorXd x(d);
  double total = 0.0;
  for (std::int64_t k = 0; k < N; ++k) {
    for (int i = 0; i < d; ++i) x[i] = rng.gaussian();
    double y = 0.0;
    for (const auto& w : t.neurons) y += std::abs(w.dot(x));
    double f = 0.0;
    for (int j = 0; j < m; ++j) {
      if (norms[j] > 0.0) f += norms[j] * std::abs(s.neurons[j].dot(x));
    }
    const double res = f - y;
    total += res * res;
  }
  return total / (2.0 * static_cast<double>(N));
}

std::vector<WeightVector> empirical_gradient_streamed(const TeacherNetwork& t,
                                                      const StudentNetwork& s, std::int64_t N,
                                                      std::uint64_t seed) {
  if (N < 1) throw std::invalid_argument("empirical_gradient_streamed: N must be >= 1");
  if (s.dim() != t.dim()) throw std::invalid_argument("dimension mismatch");
  const int d = t.dim();
  const int m = s.m();
  std::vector<double> norms(m);
  Eigen::MatrixXd units(d, m);
  for (int j = 0; j < m; ++j) {
    norms[j] = s.neurons[j].norm();
    units.col(j) = norms[j] > 0.0 ? (s.neurons[j] / norms[j]).eval() : WeightVector::Zero(d);
  }
  Rng rng(seed);
  Eigen::VectorXd x(d);
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(d, m);
  for (std::int64_t k = 0; k < N; ++k) {
    for (int i = 0; i < d; ++i) x[i] = rng.gaussian();
    double y = 0.0;
    for (const auto& w : t.neurons) y += std::abs(w.dot(x));
    double f = 0.0;
    for (int j = 0; j < m; ++j) {
      if (norms[j] > 0.0) f += norms[j] * std::abs(s.neurons[j].dot(x));
    }
    const double res = f - y;
    if (res == 0.0) continue;
    for (int j = 0; j < m; ++j) {
      if (norms[j] == 0.0) continue;
      const double proj = units.col(j).dot(x);
      const double sgn = proj > 0.0 ? 1.0 : (proj < 0.0 ? -1.0 : 0.0);
      if (sgn == 0.0) continue;
      grad.col(j) += res * norms[j] * sgn * (x + proj * units.col(j));
    }
  }
  grad /= static_cast<double>(N);
  std::vector<WeightVector> out(m);
  for (int j = 0; j < m; ++j) out[j] = grad.col(j);
  return out;
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.precision(17);
  const int d = data.dim();
  for (int i = 0; i < d; ++i) out << "x_" << i << ",";
  out << "y\n";
  for (std::int64_t k = 0; k < data.size(); ++k) {
    for (int i = 0; i < d; ++i) out << data.inputs(k, i) << ",";
    out << data.labels[k] << "\n";
  }
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty dataset file " + path);
  int d = 0;
  {
    std::stringstream header(line);
    std::string field;
    while (std::getline(header, field, ',')) {
      if (field.rfind("x_", 0) == 0) ++d;
    }
  }
  if (d == 0) throw std::runtime_error("dataset header has no x_ columns: " + path);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<double> row;
    while (std::getline(ss, field, ',')) row.push_back(std::stod(field));
    if (static_cast<int>(row.size()) != d + 1) {
      throw std::runtime_error("dataset row has wrong arity in " + path);
    }
    rows.push_back(std::move(row));
  }
  Dataset data;
  data.inputs.resize(static_cast<std::int64_t>(rows.size()), d);
  data.labels.resize(static_cast<std::int64_t>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (int i = 0; i < d; ++i) data.inputs(k, i) = rows[k][i];
    data.labels[k] = rows[k][d];
  }
  return data;
}

}  // namespace tslab
