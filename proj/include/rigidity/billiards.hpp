#pragma once

#include <Eigen/Core>

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "rigidity/geometry.hpp"

namespace rigidity {

/// Marked symmetric maximal q-periodic orbit of rotation number 1/q.
/// Bounce k = 0 is the marked point; bounces run counter-clockwise.
struct PeriodicOrbit {
  int q = 0;
  std::vector<double> t;      ///< frame parameter of each bounce, t[0] = 0
  std::vector<double> theta;  ///< polar angle, theta = t + pi
  std::vector<double> sigma;
  std::vector<double> x;      ///< Lazutkin coordinate
  std::vector<double> phi;    ///< reflection angle from the tangent, in (0, pi/2]
  std::vector<double> chord;  ///< chord[k] joins bounce k and k+1 (mod q)
  double length = 0.0;
  double reflection_residual = 0.0;
  double max_hessian_eigenvalue = 0.0;  ///< of the reduced second variation
  bool maximal = false;
  bool ambiguous = false;  ///< converged far from the Lazutkin-polygon guess
  int iterations = 0;
};

struct OrbitSolverOptions {
  double gradient_tol = 1e-13;
  int max_iterations = 200;
  /// Hessian eigenvalues above -hessian_tol count as non-negative.
  double hessian_tol = 1e-12;
};

/// Sum of chord lengths of the closed polygon through P(theta_k).
/// Throws Error{DegenerateChord} if consecutive points coincide.
double orbit_length(const BoundaryFrame& frame, std::span<const double> thetas);

/// Newton ascent in the Z2-reduced coordinates. Throws Error{NoConvergence}
/// or Error{NotMaximal}.
PeriodicOrbit maximal_marked_orbit(const BoundaryFrame& frame, int q,
                                   const OrbitSolverOptions& options = {});

/// Orbits for each q, computed independently (parallel over q).
std::vector<PeriodicOrbit> marked_orbits(const BoundaryFrame& frame, std::span<const int> qs,
                                         Exec exec = Exec::parallel,
                                         const OrbitSolverOptions& options = {});
std::vector<PeriodicOrbit> marked_orbits_range(const BoundaryFrame& frame, int q_min, int q_max,
                                               Exec exec = Exec::parallel);

struct PoincareData {
  Eigen::Matrix2d matrix;  ///< in (arclength, angle) coordinates at the marked bounce
  std::complex<double> eigenvalues[2];
  double trace = 0.0;
  double determinant = 0.0;
  bool nondegenerate = false;
};

/// Product of per-bounce billiard-map derivatives along the orbit.
/// Throws Error{SingularTransfer} if some sin(phi) is below tol.
PoincareData linearized_poincare(const BoundaryFrame& frame, const PeriodicOrbit& orbit,
                                 double degeneracy_tol = 1e-9, double angle_tol = 1e-12);

struct GenericityReport {
  std::vector<int> qs;
  std::vector<double> lengths;
  std::vector<double> traces;
  std::vector<bool> nondegenerate;
  double min_length_gap = 0.0;  ///< min |Delta_q - Delta_q'| over q != q'
  int closest_pair[2] = {0, 0};
  bool all_lengths_distinct = false;
  bool all_nondegenerate = false;
  std::string note;
};

GenericityReport genericity_report(const BoundaryFrame& frame,
                                   std::span<const PeriodicOrbit> orbits,
                                   double length_tol = 1e-12, double degeneracy_tol = 1e-9);

/// Fit of the orbit asymptotics
///   x_q^k   = k/q + alpha(k/q)/q^2 + O(q^-4),
///   phi_q^k = mu(x_q^k)/q * (1 + beta(k/q)/q^2 + O(q^-4)),
/// by joint least squares over a q ladder with alpha a sine series and beta a
/// cosine series, plus q^-4 (and q^-6) correction series.
struct AlphaBetaFit {
  std::vector<int> qs;
  /// Raw estimates alpha_hat = q^2 (x - k/q), beta_hat = q^2 (q phi / mu(x) - 1), per q.
  std::vector<std::vector<double>> alpha_hat;
  std::vector<std::vector<double>> beta_hat;
  /// Two-level Richardson limits on the coarsest grid k/q_min.
  std::vector<double> alpha_richardson;
  std::vector<double> beta_richardson;
  /// alpha(x) = sum_{m>=1} alpha_sine[m] sin(2 pi m x) (index 0 unused).
  std::vector<double> alpha_sine;
  /// beta(x) = sum_{m>=0} beta_cosine[m] cos(2 pi m x).
  std::vector<double> beta_cosine;
  /// max_k |x - k/q - alpha(k/q)/q^2| per q, and the log-log slope against q.
  std::vector<double> alpha_residual;
  std::vector<double> beta_residual;
  double alpha_residual_slope = 0.0;
  double beta_residual_slope = 0.0;
  double alpha_parity_error = 0.0;  ///< max |alpha_hat(x) + alpha_hat(1 - x)|
  double beta_parity_error = 0.0;   ///< max |beta_hat(x) - beta_hat(1 - x)|

  double alpha(double x) const;
  double beta(double x) const;
  /// int_0^1 alpha(x) sin(2 pi j x) dx.
  double alpha_sine_coefficient(int j) const;
  /// int_0^1 beta(x) cos(2 pi j x) dx.
  double beta_cosine_coefficient(int j) const;
};

struct FitOptions {
  int modes = 6;
  int correction_orders = 2;  ///< number of q^-2k terms beyond the leading one
};

/// Throws Error{InsufficientLadder} with fewer than 3 distinct q.
AlphaBetaFit fit_alpha_beta(const BoundaryFrame& frame, std::span<const PeriodicOrbit> orbits,
                            const FitOptions& options = {});

/// Least-squares slope of log(values) against log(qs); NaN if any value is 0.
double loglog_slope(std::span<const int> qs, std::span<const double> values);

}  // namespace rigidity
