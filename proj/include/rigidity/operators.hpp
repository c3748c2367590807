#pragma once

// Truncated matrices of the invariant operator in the cosine basis, the
// weighted operator norm
//   ||T||_gamma = sup_{q>=1} sum_{j>=1} (q/j)^gamma |T_qj|,
// the contraction certificate and Neumann inversion.

#include <Eigen/Core>

#include <span>
#include <string>
#include <vector>

#include "rigidity/billiards.hpp"
#include "rigidity/functionals.hpp"
#include "rigidity/geometry.hpp"

namespace rigidity {

struct GammaSpaceParams {
  double gamma = 3.5;
  int J = 48;  ///< columns j = 1..J
  int Q = 16;  ///< rows q = 1..Q
  /// Throws Error{InvalidArgument} unless 3 < gamma < 4 and J, Q >= 2.
  void validate() const;
};

enum class OperatorKind { T, Delta, DeltaPrime, Remainder, TStarR, Identity, Generic };
const char* to_string(OperatorKind kind) noexcept;

/// Dense block of an operator; values(r, c) is the entry at row q = first_row + r,
/// column j = first_col + c.
struct OperatorMatrix {
  OperatorKind kind = OperatorKind::Generic;
  int first_row = 1;
  int first_col = 1;
  Eigen::MatrixXd values;

  int last_row() const { return first_row + static_cast<int>(values.rows()) - 1; }
  int last_col() const { return first_col + static_cast<int>(values.cols()) - 1; }
  double at(int q, int j) const { return values(q - first_row, j - first_col); }
};

/// M_qj = L_q(e_j), rows q = 0..Q, columns j = 0..J, rows 0 and 1 from L_0 and
/// L_1. Orbits must cover q = 2..Q. Rows are assembled in parallel.
OperatorMatrix assemble_T(const BoundaryFrame& frame, std::span<const PeriodicOrbit> orbits,
                          int Q, int J, Exec exec = Exec::parallel);
/// [delta_{q|j}], rows 1..Q, columns 1..J.
OperatorMatrix assemble_delta(const GammaSpaceParams& params);
OperatorMatrix assemble_identity(const GammaSpaceParams& params);

/// Hurwitz zeta sum_{k>=0} (k + a)^{-s}, s > 1, a > 0.
double hurwitz_zeta(double s, double a);

struct GammaNorm {
  double truncated = 0.0;
  double tail_completed = 0.0;  ///< truncated plus the analytic divisor-row tails
  int argmax_row = 0;
};

/// Rows q < 1 and columns j < 1 are ignored. divisor_tail[q - first_row], if
/// given, is the common value of the entries T_{q, mq} with mq > last_col; the
/// tail |c_q| zeta(gamma, floor(J/q) + 1) is added to that row.
GammaNorm gamma_norm(const OperatorMatrix& T, double gamma,
                     std::span<const double> divisor_tail = {}, Exec exec = Exec::parallel);

/// Everything built from one domain at one truncation.
struct OperatorSetup {
  GammaSpaceParams params;
  OperatorMatrix M;                  ///< rows 0..Q, columns 0..J
  std::vector<double> l_star_star;   ///< L**(e_j), j = 0..J
  std::vector<double> sigma0;        ///< sigma_0(q), q = 0..Q (entries 0, 1 unused)
  double beta0 = 0.0;
  std::vector<double> divisor_coeff; ///< c_q = 1 + sigma_0(q) - beta_0/q^2, rows 1..Q (c_1 = 1)
  OperatorMatrix t_star_r;           ///< M' - b_* L**^T, rows 1..Q, columns 1..J
  OperatorMatrix delta_prime;        ///< (c_q - 1) delta_{q|j}, row 1 zero
  OperatorMatrix remainder;          ///< t_star_r - c o Delta
};

/// L**(e_j) = sigma~_j - int beta cos(2 pi j x) - 2 pi j int alpha sin(2 pi j x).
double script_L_star_star(const BoundaryFrame& frame, const AlphaBetaFit& fit, int j);

OperatorSetup build_operator(const BoundaryFrame& frame, std::span<const PeriodicOrbit> orbits,
                             const AlphaBetaFit& fit, const GammaSpaceParams& params,
                             Exec exec = Exec::parallel);

/// T - Id on the common rows/columns >= 1.
OperatorMatrix minus_identity(const OperatorMatrix& T);

/// zeta(3) - 1 + ((pi + eps)^3 / (48 cos eps) + C eps / 4) zeta(3) + C eps.
double analytic_bound(double epsilon, double C);

/// Default remainder constant: calibrate_remainder_constant over
/// a_2 in {0.0025, 0.005, 0.01, 0.02} at gamma = 3.5, Q = 16, J = 48, N = 512
/// gives 16.21; rounded up.
inline constexpr double kDefaultRemainderConstant = 16.25;

struct Certificate {
  double gamma = 0.0;
  double epsilon = 0.0;
  double C = 0.0;
  double analytic_bound = 0.0;
  bool has_numeric = false;
  double numeric_truncated = 0.0;
  double numeric_norm = 0.0;  ///< tail-completed ||T_{*,R} - Id||_gamma
  double delta_minus_id = 0.0;
  double delta_prime = 0.0;
  double remainder = 0.0;
  bool analytic_pass = false;
  bool numeric_pass = false;
  bool pass = false;  ///< both bounds below 1 (analytic only when no matrix)
};

Certificate contraction_certificate(double gamma, double epsilon, double C);
Certificate contraction_certificate(const OperatorSetup& setup, double epsilon, double C);
std::string to_json(const Certificate& c);

/// max_q q^gamma |y_q| over q >= 1 (index 0 of y is q = first).
double gamma_weighted_sup(std::span<const double> y, int first, double gamma);

struct NeumannResult {
  Eigen::VectorXd solution;             ///< entries j = 1..J
  std::vector<double> update_norms;     ///< gamma-weighted sup norm per term
  int terms = 0;
  bool converged = false;
};

/// Solves T u = rhs by u = sum_n (Id - T)^n rhs on a square block with
/// rows and columns 1..J. Stops after `order` terms or once the update norm
/// falls below tol.
NeumannResult neumann_invert(const OperatorMatrix& T, const Eigen::VectorXd& rhs, int order,
                             double gamma, double tol = 1e-15);
/// Dense solve of the same square system (column-pivoted QR).
Eigen::VectorXd least_squares_solve(const OperatorMatrix& T, const Eigen::VectorXd& rhs);

struct DecompositionReport {
  std::vector<int> qs;
  std::vector<double> residual;  ///< |T(u)_q - c_q (Delta u)_q - L**(u)/q^2|, q >= 2
  double max_residual = 0.0;
  double slope = 0.0;            ///< log-log slope of residual(q), q >= 4
};

/// Splits T(u) = L**(u) b_* + T_{*,R}(u) with T_{*,R} = c o Delta + R and
/// reports |R(u)| per row. Uses the cosine coefficients u_1..u_J.
DecompositionReport decompose_T(const OperatorSetup& setup, const CosineSeries& u);

/// max over the domains of ||R||_gamma / epsilon.
double calibrate_remainder_constant(std::span<const double> remainder_norms,
                                    std::span<const double> epsilons);

std::string matrix_csv(const OperatorMatrix& T);

}  // namespace rigidity
