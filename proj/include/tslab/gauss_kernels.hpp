#pragma once

#include <Eigen/Dense>
#include <vector>

#include "tslab/networks.hpp"

namespace tslab {

// Closed-form expectations over x ~ N(0, I_d). Every formula here is gated on
// the Monte Carlo oracle in the test suite before anything downstream trusts it.

// Scalar kernel for unit vectors with cosine rho:
//   k(rho) = (2/pi) (sqrt(1 - rho^2) + rho asin(rho)),  k(1) = 1, k(0) = 2/pi.
double abs_kernel_scalar(double rho);

// K(u, v) = E|u.x| |v.x| = |u| |v| k(rho). Zero vectors allowed (K = 0).
double abs_pair_expectation(const WeightVector& u, const WeightVector& v);

// G(u; v) = E[sgn(u.x) |v.x| x] = grad_u K(u, v)
//         = (2/pi) (sqrt(1 - rho^2) |v| u_hat + asin(rho) v).
// Lies in span{u, v}; needs |u| > 0 (throws otherwise); v = 0 gives 0.
WeightVector abs_pair_gradient(const WeightVector& u, const WeightVector& v);

// Scov(a, b) = E[x x^T sgn(a.x) sgn(b.x)], depends only on directions.
// With theta = signed angle(a, b), in the plane basis {a_hat, p}:
//   S11 = 1 - (2/pi)(theta - sin cos),  S22 = 1 - (2/pi)(theta + sin cos),
//   S12 = (2/pi) sin^2 theta, and (1 - 2 theta/pi) I on the orthocomplement.
Eigen::MatrixXd sign_cov_block(const WeightVector& a, const WeightVector& b);

// P(sgn(a.x) != sgn(b.x)) = arccos(rho_signed) / pi.
double mismatch_probability(const WeightVector& a, const WeightVector& b);

// E[(beta.x)^2 1{sgn(beta.x) != sgn(w.x)}] = (|beta|^2/pi)(phi - sin phi cos phi).
double mismatch_second_moment(const WeightVector& beta, const WeightVector& w);

struct SlabProbability {
  double exact;  // erf(delta / sqrt(2))
  double lower;  // sqrt(2/pi) delta e^{-delta^2/2}
  double upper;  // sqrt(2/pi) delta
};

// P(|z| <= delta) for z ~ N(0,1) with the two-sided envelope used by the
// slab calculations. delta < 0 throws.
SlabProbability slab_probability(double delta);

// Normalized probabilists' Hermite polynomial h_k = H_k / sqrt(k!).
double hermite_value(int k, double x);

struct HermiteCoefficients {
  std::vector<double> coeffs;  // sigma_hat_0 .. sigma_hat_L, zero at odd k
};

// Hermite coefficients of |x|: sigma_0 = sqrt(2/pi), sigma_2 = 1/sqrt(pi),
// sigma_k = (-1)^{k/2-1} sqrt(2/(pi k!)) (k-3)!! for even k >= 4.
HermiteCoefficients hermite_abs_coeffs(int L);

// Owen's T: (1/2pi) int_0^a exp(-x^2 (1+t^2)/2) / (1+t^2) dt, adaptive
// Simpson quadrature to absolute tolerance 1e-10. Odd in a.
double owen_t(double x, double a);

}  // namespace tslab
