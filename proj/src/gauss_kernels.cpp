#include "tslab/gauss_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tslab {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoOverPi = 2.0 / kPi;
constexpr double kCollinearTol = 1e-12;

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }
}  // namespace

double abs_kernel_scalar(double rho) {
  const double r = clamp_unit(rho);
  return kTwoOverPi * (std::sqrt(std::max(0.0, 1.0 - r * r)) + r * std::asin(r));
}

double abs_pair_expectation(const WeightVector& u, const WeightVector& v) {
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) return 0.0;
  const double rho = clamp_unit(u.dot(v) / (nu * nv));
  return nu * nv * abs_kernel_scalar(rho);
}

WeightVector abs_pair_gradient(const WeightVector& u, const WeightVector& v) {
  const double nu = u.norm();
  if (nu == 0.0) throw std::invalid_argument("abs_pair_gradient: sgn direction undefined at u = 0");
  const double nv = v.norm();
  if (nv == 0.0) return WeightVector::Zero(u.size());
  const double rho = clamp_unit(u.dot(v) / (nu * nv));
  const double s = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  return kTwoOverPi * (s * nv / nu * u + std::asin(rho) * v);
}

Eigen::MatrixXd sign_cov_block(const WeightVector& a, const WeightVector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) {
    throw std::invalid_argument("sign_cov_block: zero direction");
  }
  const int d = static_cast<int>(a.size());
  const WeightVector ah = a / na;
  const double rho = clamp_unit(ah.dot(b) / nb);
  const double theta = std::acos(rho);

  // in-plane basis completion; any axis works in the collinear limit since
  // S12 = 0 and S22 = c_out there
  WeightVector p = b / nb - rho * ah;
  const double np = p.norm();
  if (np < kCollinearTol) {
    p = WeightVector::Zero(d);
    int axis = 0;
    for (int k = 1; k < d; ++k) {
      if (std::abs(ah[k]) < std::abs(ah[axis])) axis = k;
    }
    p[axis] = 1.0;
    p -= ah.dot(p) * ah;
    const double n2 = p.norm();
    if (n2 < kCollinearTol) return (rho >= 0.0 ? 1.0 : -1.0) * Eigen::MatrixXd::Identity(d, d);
    p /= n2;
  } else {
    p /= np;
  }

  const double sc = std::sin(theta) * std::cos(theta);
  const double c_out = 1.0 - 2.0 * theta / kPi;
  const double s11 = 1.0 - kTwoOverPi * (theta - sc);
  const double s22 = 1.0 - kTwoOverPi * (theta + sc);
  const double s12 = kTwoOverPi * (1.0 - rho * rho);

  Eigen::MatrixXd out = c_out * Eigen::MatrixXd::Identity(d, d);
  out += (s11 - c_out) * (ah * ah.transpose());
  out += (s22 - c_out) * (p * p.transpose());
  out += s12 * (ah * p.transpose() + p * ah.transpose());
  return out;
}

double mismatch_probability(const WeightVector& a, const WeightVector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) {
    throw std::invalid_argument("mismatch_probability: zero direction");
  }
  return std::acos(clamp_unit(a.dot(b) / (na * nb))) / kPi;
}

double mismatch_second_moment(const WeightVector& beta, const WeightVector& w) {
  const double nb = beta.norm();
  const double nw = w.norm();
  if (nb == 0.0 || nw == 0.0) {
    throw std::invalid_argument("mismatch_second_moment: zero direction");
  }
  const double phi = std::acos(clamp_unit(beta.dot(w) / (nb * nw)));
  return nb * nb / kPi * (phi - std::sin(phi) * std::cos(phi));
}

SlabProbability slab_probability(double delta) {
  if (delta < 0.0) throw std::invalid_argument("slab_probability: delta must be >= 0");
  const double root = std::sqrt(kTwoOverPi);
  return SlabProbability{std::erf(delta / std::sqrt(2.0)),
                         root * delta * std::exp(-0.5 * delta * delta), root * delta};
}

double hermite_value(int k, double x) {
  if (k < 0) throw std::invalid_argument("hermite_value: k must be >= 0");
  if (k == 0) return 1.0;
  double prev = 1.0;  // h_0
  double cur = x;     // h_1
  for (int n = 1; n < k; ++n) {
    const double next = (x * cur - std::sqrt(static_cast<double>(n)) * prev) /
                        std::sqrt(static_cast<double>(n + 1));
    prev = cur;
    cur = next;
  }
  return cur;
}

HermiteCoefficients hermite_abs_coeffs(int L) {
  if (L < 0) throw std::invalid_argument("hermite_abs_coeffs: L must be >= 0");
  HermiteCoefficients hc;
  hc.coeffs.assign(L + 1, 0.0);
  hc.coeffs[0] = std::sqrt(kTwoOverPi);
  if (L >= 2) hc.coeffs[2] = 1.0 / std::sqrt(kPi);
  if (L >= 4) hc.coeffs[4] = -std::sqrt(2.0 / (kPi * 24.0));
  // ratio recurrence sigma_{k+2}/sigma_k = -(k-1)/sqrt((k+1)(k+2)) avoids the
  // k! overflow of the closed form
  for (int k = 4; k + 2 <= L; k += 2) {
    hc.coeffs[k + 2] = hc.coeffs[k] * (-(k - 1.0)) /
                       std::sqrt(static_cast<double>(k + 1) * static_cast<double>(k + 2));
  }
  return hc;
}

namespace {

double owen_integrand(double x, double t) {
  return std::exp(-0.5 * x * x * (1.0 + t * t)) / (1.0 + t * t);
}

double simpson(double lo, double hi, double flo, double fmid, double fhi) {
  return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
}

double adaptive_simpson(double x, double lo, double hi, double flo, double fmid, double fhi,
                        double whole, double tol, int depth) {
  const double mid = 0.5 * (lo + hi);
  const double fl = owen_integrand(x, 0.5 * (lo + mid));
  const double fr = owen_integrand(x, 0.5 * (mid + hi));
  const double left = simpson(lo, mid, flo, fl, fmid);
  const double right = simpson(mid, hi, fmid, fr, fhi);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson(x, lo, mid, flo, fl, fmid, left, tol * 0.5, depth - 1) +
         adaptive_simpson(x, mid, hi, fmid, fr, fhi, right, tol * 0.5, depth - 1);
}

}  // namespace

double owen_t(double x, double a) {
  if (a == 0.0) return 0.0;
  if (a < 0.0) return -owen_t(x, -a);
  const double flo = owen_integrand(x, 0.0);
  const double fmid = owen_integrand(x, 0.5 * a);
  const double fhi = owen_integrand(x, a);
  const double whole = simpson(0.0, a, flo, fmid, fhi);
  return adaptive_simpson(x, 0.0, a, flo, fmid, fhi, whole, 1e-10, 60) / (2.0 * kPi);
}

}  // namespace tslab
