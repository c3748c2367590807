#pragma once

// Linear functionals on Z2-symmetric boundary functions, written in the
// cosine basis e_j(x) = cos(2 pi j x) of the Lazutkin coordinate.

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rigidity/billiards.hpp"
#include "rigidity/geometry.hpp"

namespace rigidity {

/// u(x) = sum_{j=0}^{J} u_j cos(2 pi j x).
struct CosineSeries {
  std::vector<double> coeffs;

  CosineSeries() = default;
  explicit CosineSeries(std::vector<double> c) : coeffs(std::move(c)) {}
  static CosineSeries basis(int j);
  static CosineSeries constant(double c) { return CosineSeries({c}); }

  int order() const { return coeffs.empty() ? 0 : static_cast<int>(coeffs.size()) - 1; }
  double operator()(double x) const;
  /// Value at the marked point x = 0, i.e. sum_j u_j.
  double at_marked() const;
  bool is_zero() const;

  CosineSeries& operator+=(const CosineSeries& o);
  CosineSeries& operator*=(double s);
};

CosineSeries operator+(CosineSeries a, const CosineSeries& b);
CosineSeries operator-(CosineSeries a, const CosineSeries& b);
CosineSeries operator*(double s, CosineSeries a);

/// Cosine coefficients j = 0..order of f by the frame's x-quadrature.
/// Throws Error{InvalidArgument} if order > N/4.
CosineSeries project_cosine(const BoundaryFrame& frame,
                            const std::function<double(const FrameSample&)>& f, int order);

/// sup over the frame grid of |u - v|.
double sup_distance(const BoundaryFrame& frame, const CosineSeries& u, const CosineSeries& v);

// --- DKW functionals ---------------------------------------------------------

/// sum_k u(x_k) sin(phi_k).
double ell_q_dkw(const CosineSeries& u, const PeriodicOrbit& orbit);
/// int u / rho dsigma (rho the radius of curvature).
double ell_0_dkw(const CosineSeries& u, const BoundaryFrame& frame);
/// mu(0) u(0).
double ell_1_dkw(const CosineSeries& u, const BoundaryFrame& frame);

// --- Robin functionals -------------------------------------------------------

/// sum_k u(x_k) mu(x_k) / (q^2 sin phi_k). Throws Error{SingularAngle}.
double script_L_q(const CosineSeries& u, const PeriodicOrbit& orbit, const BoundaryFrame& frame,
                  double angle_tol = 1e-12);
/// L_q(e_j) for j = 0..order in one pass over the orbit.
std::vector<double> script_L_q_row(const PeriodicOrbit& orbit, const BoundaryFrame& frame,
                                   int order, double angle_tol = 1e-12);
/// int_0^1 u dx (exact for a cosine series).
double script_L_0(const CosineSeries& u);
/// int_0^1 f dx by the frame quadrature.
double script_L_0(const BoundaryFrame& frame, const std::function<double(const FrameSample&)>& f);
double script_L_1(const CosineSeries& u);

// --- S_q and Fourier data ----------------------------------------------------

/// y / sin(y) - 1 at y = mu / q.
double S_q_of_mu(int q, double mu);
double S_q_eval(const LazutkinChart& chart, int q, double x);
/// (pi + eps)^3 / (12 q^2 cos eps).
double S_q_bound(int q, double epsilon);
/// sup over the frame grid of |S_q|.
double S_q_sup(const BoundaryFrame& frame, int q);

/// int_0^1 S_q(x) e^{2 pi i p x} dx. Throws Error{SymmetryViolation} if the
/// imaginary part exceeds imag_tol.
std::complex<double> sigma_p(const BoundaryFrame& frame, int q, int p, double imag_tol = 1e-10);
/// int_0^1 mu^2/6 e^{2 pi i j x} dx.
std::complex<double> tilde_sigma(const BoundaryFrame& frame, int j, double imag_tol = 1e-10);

struct RiemannLimitReport {
  std::vector<int> qs;
  std::vector<double> errors;  ///< |L_q(u) - L_0(u)|
  double slope = 0.0;          ///< log-log decay exponent (negated slope)
};

/// Throws Error{InsufficientLadder} with fewer than 3 orbits.
RiemannLimitReport riemann_limit_check(const CosineSeries& u, std::span<const PeriodicOrbit> orbits,
                                       const BoundaryFrame& frame);

// --- invariant data ----------------------------------------------------------

struct InvariantVector {
  std::vector<double> d;  ///< d[0] = int K/mu dx, d[1] = K(0), d[q] = sum K/sin phi
  double H0 = 0.0;
  double H1 = 0.0;
  std::string normalization = "C_gamma=1";
  int q_max = 0;
  std::string provenance;
};

/// Forward synthesis of the orbit data of K. Orbits must cover q = 2..q_max.
InvariantVector robin_data(const BoundaryFrame& frame, const CosineSeries& K,
                           std::span<const PeriodicOrbit> orbits, double H0, double H1,
                           double angle_tol = 1e-12);

std::string to_json(const InvariantVector& v);
InvariantVector invariant_vector_from_json(const std::string& text);

}  // namespace rigidity
