#include "tslab/init_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tslab/gauss_kernels.hpp"
#include "tslab/rng.hpp"

namespace tslab {

NNLSResult nnls(const Eigen::MatrixXd& G, const Eigen::VectorXd& b) {
  const int m = static_cast<int>(b.size());
  if (G.rows() != m || G.cols() != m) throw std::invalid_argument("nnls: shape mismatch");
  if ((G - G.transpose()).cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, G.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("nnls: G not symmetric");
  }
  if (G.diagonal().minCoeff() < -1e-8) throw std::invalid_argument("nnls: G not PSD");

  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  const double tol = 1e-10 * scale;

  Eigen::VectorXd z = Eigen::VectorXd::Zero(m);
  std::vector<bool> passive(m, false);

  auto solve_passive = [&](Eigen::VectorXd& out) {
    std::vector<int> idx;
    for (int i = 0; i < m; ++i) {
      if (passive[i]) idx.push_back(i);
    }
    const int p = static_cast<int>(idx.size());
    Eigen::MatrixXd Gp(p, p);
    Eigen::VectorXd bp(p);
    for (int a = 0; a < p; ++a) {
      bp[a] = b[idx[a]];
      for (int c = 0; c < p; ++c) Gp(a, c) = G(idx[a], idx[c]);
    }
    const Eigen::VectorXd zp = Gp.ldlt().solve(bp);
    out.setZero(m);
    for (int a = 0; a < p; ++a) out[idx[a]] = zp[a];
    return idx;
  };

  const int cap = 10 * m;
  int outer = 0;
  while (true) {
    if (++outer > cap) {
      const double residual = (G * z - b).cwiseAbs().maxCoeff();
      throw std::runtime_error("nnls: iteration cap " + std::to_string(cap) +
                               " exceeded, KKT residual " + std::to_string(residual));
    }
    // w = b - G z; most violated dual among the active set enters
    const Eigen::VectorXd w = b - G * z;
    int enter = -1;
    double best = tol;
    for (int i = 0; i < m; ++i) {
      if (!passive[i] && w[i] > best) {
        best = w[i];
        enter = i;
      }
    }
    if (enter < 0) break;
    passive[enter] = true;

    while (true) {
      Eigen::VectorXd trial;
      const std::vector<int> idx = solve_passive(trial);
      bool feasible = true;
      for (int i : idx) {
        if (trial[i] <= 0.0) {
          feasible = false;
          break;
        }
      }
      if (feasible) {
        z = trial;
        break;
      }
      // step toward trial until the first passive coordinate hits zero
      double alpha = 1.0;
      for (int i : idx) {
        if (trial[i] <= 0.0) {
          const double denom = z[i] - trial[i];
          if (denom > 0.0) alpha = std::min(alpha, z[i] / denom);
        }
      }
      z += alpha * (trial - z);
      for (int i : idx) {
        if (trial[i] <= 0.0 && z[i] <= tol) {
          z[i] = 0.0;
          passive[i] = false;
        }
      }
    }
  }

  NNLSResult result;
  result.z = z;
  result.objective = 0.5 * z.dot(G * z) - b.dot(z);
  for (int i = 0; i < m; ++i) {
    if (!passive[i] || z[i] == 0.0) result.active_set.push_back(i);
  }
  return result;
}

MomentMatrix moment_matrix(const Dataset& data) {
  const int d = data.dim();
  const std::int64_t N = data.size();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(d, d);
  double label_sum = 0.0;
  for (std::int64_t k = 0; k < N; ++k) {
    const Eigen::VectorXd x = data.inputs.row(k).transpose();
    M.selfadjointView<Eigen::Lower>().rankUpdate(x, data.labels[k]);
    label_sum += data.labels[k];
  }
  M = M.selfadjointView<Eigen::Lower>();
  M -= label_sum * Eigen::MatrixXd::Identity(d, d);
  M /= static_cast<double>(N);
  MomentMatrix out;
  out.M_hat = 0.5 * (M + M.transpose());
  out.N = N;
  return out;
}

Eigen::MatrixXd population_moment_matrix(const TeacherNetwork& t) {
  const int d = t.dim();
  const double c = std::sqrt(2.0 / 3.14159265358979323846);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(d, d);
  for (const auto& w : t.neurons) {
    const double n = w.norm();
    if (n == 0.0) continue;
    M += c / n * (w * w.transpose());
  }
  return M;
}

double largest_principal_angle(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A.transpose() * B);
  const double smin = svd.singularValues().minCoeff();
  return std::acos(std::clamp(smin, -1.0, 1.0));
}

Eigen::MatrixXd top_eigenvectors(const Eigen::MatrixXd& sym, int r) {
  const int d = static_cast<int>(sym.rows());
  if (r < 1 || r > d) throw std::invalid_argument("top_eigenvectors: bad r");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (sym + sym.transpose()));
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  const Eigen::VectorXd& evals = solver.eigenvalues();
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(evals[a]) > std::abs(evals[b]);
  });
  Eigen::MatrixXd Q(d, r);
  for (int c = 0; c < r; ++c) {
    Eigen::VectorXd v = solver.eigenvectors().col(order[c]);
    for (int k = 0; k < d; ++k) {
      if (std::abs(v[k]) > 1e-14) {
        if (v[k] < 0.0) v = -v;
        break;
      }
    }
    Q.col(c) = v;
  }
  return Q;
}

StudentNetwork rescale_by_nnls(const TeacherNetwork& t, const std::vector<WeightVector>& dirs,
                               std::int64_t sampled_gram_n, std::uint64_t seed) {
  const int m = static_cast<int>(dirs.size());
  Eigen::MatrixXd G(m, m);
  Eigen::VectorXd b(m);
  if (sampled_gram_n <= 0) {
    for (int i = 0; i < m; ++i) {
      for (int j = i; j < m; ++j) {
        G(i, j) = G(j, i) = abs_pair_expectation(dirs[i], dirs[j]);
      }
      double bi = 0.0;
      for (const auto& w : t.neurons) bi += abs_pair_expectation(dirs[i], w);
      b[i] = bi;
    }
  } else {
    const Dataset data = sample_dataset(t, sampled_gram_n, derive_seed(seed, 4));
    G.setZero();
    b.setZero();
    Eigen::VectorXd feats(m);
    for (std::int64_t k = 0; k < data.size(); ++k) {
      for (int i = 0; i < m; ++i) feats[i] = std::abs(dirs[i].dot(data.inputs.row(k)));
      G.selfadjointView<Eigen::Lower>().rankUpdate(feats, 1.0);
      b += data.labels[k] * feats;
    }
    G = G.selfadjointView<Eigen::Lower>();
    G /= static_cast<double>(data.size());
    b /= static_cast<double>(data.size());
  }

  const NNLSResult sol = nnls(G, b);
  StudentNetwork s;
  s.neurons.resize(m);
  for (int i = 0; i < m; ++i) {
    const double n = dirs[i].norm();
    if (sol.z[i] > 0.0 && n > 0.0) {
      s.neurons[i] = std::sqrt(sol.z[i] / n) * dirs[i];
    } else {
      s.neurons[i] = WeightVector::Zero(t.dim());
    }
  }
  return s;
}

StudentNetwork random_init(const TeacherNetwork& t, int m, std::uint64_t seed,
                           std::int64_t sampled_gram_n) {
  if (m < 1) throw std::invalid_argument("random_init: m must be >= 1");
  const int d = t.dim();
  Rng rng(derive_seed(seed, 1));
  std::vector<WeightVector> dirs(m);
  for (int i = 0; i < m; ++i) {
    dirs[i].resize(d);
    for (int k = 0; k < d; ++k) dirs[i][k] = rng.gaussian();
  }
  return rescale_by_nnls(t, dirs, sampled_gram_n, seed);
}

StudentNetwork subspace_init(const TeacherNetwork& t, int m, int r, std::int64_t N,
                             std::uint64_t seed) {
  if (m < 1 || r < 1 || N < 1) throw std::invalid_argument("subspace_init: bad arguments");
  Dataset data = sample_dataset(t, N, derive_seed(seed, 2));
  // control variate: E[(y - c)(xx^T - I)] equals the population moment matrix
  // for any constant c, and centering the labels cuts the estimator variance
  if (N > 1) data.labels.array() -= data.labels.mean();
  const MomentMatrix mm = moment_matrix(data);
  const Eigen::MatrixXd Q = top_eigenvectors(mm.M_hat, r);
  Rng rng(derive_seed(seed, 3));
  std::vector<WeightVector> dirs(m);
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd u(r);
    for (int k = 0; k < r; ++k) u[k] = rng.gaussian();
    dirs[i] = Q * u;
  }
  return rescale_by_nnls(t, dirs, 0, seed);
}

}  // namespace tslab
