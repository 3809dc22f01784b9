#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "tslab/rng.hpp"

namespace tslab {

// Seeded Monte Carlo estimate over x ~ N(0, I_d): the brute-force oracle every
// closed form is validated against. Accumulation is streamed (Welford) in
// fixed-size chunks with per-chunk derived seeds, so results are bit-identical
// for a given (seed, n, d, integrand) regardless of how chunks are scheduled.

struct MCEstimate {
  double mean = 0.0;
  double std_err = 0.0;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
};

struct EstimatorFailure : std::runtime_error {
  EstimatorFailure(std::int64_t index, double value)
      : std::runtime_error("non-finite integrand value " + std::to_string(value) +
                           " at sample " + std::to_string(index)),
        sample_index(index) {}
  std::int64_t sample_index;
};

// Worker cap for the chunked reductions. Chunk boundaries and per-chunk seeds
// are fixed and partial results are merged in chunk order, so estimates are
// bit-identical for any thread count.
inline int& mc_thread_cap() {
  static int cap = 1;
  return cap;
}

inline void set_mc_threads(int threads) { mc_thread_cap() = std::max(1, threads); }

namespace detail {

constexpr std::int64_t kChunk = 1 << 16;

struct WelfordState {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d1 = x - mean;
    mean += d1 / static_cast<double>(n);
    m2 += d1 * (x - mean);
  }

  void merge(const WelfordState& o) {
    if (o.n == 0) return;
    const double d = o.mean - mean;
    const std::int64_t total = n + o.n;
    mean += d * static_cast<double>(o.n) / static_cast<double>(total);
    m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) /
                     static_cast<double>(total);
    n = total;
  }
};

inline MCEstimate finish(const WelfordState& w, std::uint64_t seed) {
  MCEstimate est;
  est.mean = w.mean;
  est.n_samples = w.n;
  est.seed = seed;
  est.std_err = w.n > 1 ? std::sqrt(w.m2 / static_cast<double>(w.n - 1) /
                                    static_cast<double>(w.n))
                        : 0.0;
  return est;
}

template <class F>
WelfordState run_one_chunk(F&& body, int d, std::int64_t n, std::uint64_t seed, std::int64_t c) {
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
  Eigen::VectorXd x(d);
  const std::int64_t lo = c * kChunk;
  const std::int64_t hi = std::min(n, lo + kChunk);
  WelfordState w;
  for (std::int64_t k = lo; k < hi; ++k) {
    for (int i = 0; i < d; ++i) x[i] = rng.gaussian();
    const double value = body(x);
    if (!std::isfinite(value)) throw EstimatorFailure(k, value);
    w.add(value);
  }
  return w;
}

template <class F>
MCEstimate run_chunked(F&& body, int d, std::int64_t n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("mc_oracle: n must be >= 2");
  const std::int64_t chunks = (n + kChunk - 1) / kChunk;
  const int workers = std::min<std::int64_t>(mc_thread_cap(), chunks);
  WelfordState total;
  if (workers <= 1) {
    for (std::int64_t c = 0; c < chunks; ++c) total.merge(run_one_chunk(body, d, n, seed, c));
    return finish(total, seed);
  }
  std::vector<WelfordState> partial(chunks);
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    while (true) {
      const std::int64_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        partial[c] = run_one_chunk(body, d, n, seed, c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  for (const auto& w : partial) total.merge(w);  // fixed merge order
  return finish(total, seed);
}

}  // namespace detail

using Integrand = std::function<double(const Eigen::VectorXd&)>;

inline MCEstimate mc_estimate(const Integrand& f, int d, std::int64_t n, std::uint64_t seed) {
  return detail::run_chunked([&](const Eigen::VectorXd& x) { return f(x); }, d, n, seed);
}

// f and g evaluated on the same sample stream; estimates f - g with the
// variance reduction of common random numbers.
inline MCEstimate mc_estimate_paired(const Integrand& f, const Integrand& g, int d,
                                     std::int64_t n, std::uint64_t seed) {
  return detail::run_chunked([&](const Eigen::VectorXd& x) { return f(x) - g(x); }, d, n, seed);
}

// Vector-valued variant sharing one sample stream across all components;
// used for gradient and matrix expectations.
struct MCVectorEstimate {
  Eigen::VectorXd mean;
  Eigen::VectorXd std_err;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
};

using VectorIntegrand = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;

inline MCVectorEstimate mc_estimate_vector(const VectorIntegrand& f, int d, int out_dim,
                                           std::int64_t n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("mc_oracle: n must be >= 2");
  Eigen::VectorXd x(d);
  Eigen::VectorXd value(out_dim);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(out_dim);
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(out_dim);
  std::int64_t count = 0;
  const std::int64_t chunks = (n + detail::kChunk - 1) / detail::kChunk;
  for (std::int64_t c = 0; c < chunks; ++c) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
    const std::int64_t lo = c * detail::kChunk;
    const std::int64_t hi = std::min(n, lo + detail::kChunk);
    Eigen::VectorXd cmean = Eigen::VectorXd::Zero(out_dim);
    Eigen::VectorXd cm2 = Eigen::VectorXd::Zero(out_dim);
    std::int64_t cn = 0;
    for (std::int64_t k = lo; k < hi; ++k) {
      for (int i = 0; i < d; ++i) x[i] = rng.gaussian();
      f(x, value);
      if (!value.allFinite()) throw EstimatorFailure(k, value.minCoeff());
      ++cn;
      for (int e = 0; e < out_dim; ++e) {
        const double d1 = value[e] - cmean[e];
        cmean[e] += d1 / static_cast<double>(cn);
        cm2[e] += d1 * (value[e] - cmean[e]);
      }
    }
    const std::int64_t total = count + cn;
    for (int e = 0; e < out_dim; ++e) {
      const double delta = cmean[e] - mean[e];
      mean[e] += delta * static_cast<double>(cn) / static_cast<double>(total);
      m2[e] += cm2[e] + delta * delta * static_cast<double>(count) * static_cast<double>(cn) /
                            static_cast<double>(total);
    }
    count = total;
  }
  MCVectorEstimate est;
  est.mean = mean;
  est.std_err.resize(out_dim);
  for (int e = 0; e < out_dim; ++e) {
    est.std_err[e] = count > 1 ? std::sqrt(m2[e] / static_cast<double>(count - 1) /
                                           static_cast<double>(count))
                               : 0.0;
  }
  est.n_samples = count;
  est.seed = seed;
  return est;
}

}  // namespace tslab
