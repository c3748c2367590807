#pragma once

// Inverse pipelines: recover a Robin function from orbit data, replay the
// three-function disambiguation argument, pin the marked value on doubly
// symmetric domains, and a batch round-trip harness.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rigidity/billiards.hpp"
#include "rigidity/functionals.hpp"
#include "rigidity/geometry.hpp"
#include "rigidity/operators.hpp"
#include "rigidity/traces.hpp"

namespace rigidity {

/// Frame, orbits q = 2..q_max, the alpha/beta fit on a dyadic ladder and the
/// closeness epsilon of one domain.
struct DomainContext {
  BoundaryFrame frame;
  std::vector<PeriodicOrbit> orbits;  ///< orbits[i].q == i + 2
  std::vector<PeriodicOrbit> ladder;
  AlphaBetaFit fit;
  double epsilon = 0.0;  ///< ||mu - pi||_{C^0}
};

DomainContext prepare_domain(const DomainProfile& profile, std::size_t samples, int q_max,
                             std::span<const int> ladder, Exec exec = Exec::parallel);
DomainContext prepare_domain(const DomainProfile& profile, std::size_t samples, int q_max,
                             Exec exec = Exec::parallel);

struct RecoveryOptions {
  double gamma = 3.5;
  int J = 48;  ///< square system on rows and columns 1..J
  int neumann_order = 40;
  double neumann_tol = 1e-15;
  double C = kDefaultRemainderConstant;
  bool allow_uncertified = false;
  /// Replace d_0 by a q -> infinity extrapolation of d_q / q^2.
  bool extrapolate_l0 = false;
  double l0_tol = 1e-6;  ///< admissible |extrapolated - supplied| when both exist
  double residual_tol = 1e-8;
  bool strict = false;  ///< throw Error{ResidualTooLarge} instead of flagging
};

struct RecoveryResult {
  CosineSeries K;                 ///< recovered Robin function, modes 0..J
  CosineSeries v;                 ///< K / mu, modes 0..J
  Eigen::VectorXd v_least_squares;
  double lsq_agreement = 0.0;     ///< max_j |v_j(Neumann) - v_j(dense)|
  Certificate certificate;
  NeumannResult neumann;          ///< solve with the data right-hand side
  NeumannResult neumann_rank_one; ///< solve with b_*
  double l_star_star_of_v = 0.0;
  double l0_used = 0.0;
  double l0_extrapolation_error = 0.0;
  double system_residual = 0.0;      ///< rows 0..J, with the supplied K(0)
  double marked_residual = 0.0;      ///< |K(0) supplied - d_1|
  double consistency_residual = 0.0; ///< rows J < q <= q_max
  bool data_consistent = true;
};

/// Solves T(v) = (d_0, K0 / mu(0), d_q / q^2) for v = K / mu and returns K = mu v.
/// Throws Error{NotContractive} when the numeric certificate fails and
/// allow_uncertified is off; Error{ResidualTooLarge} in strict mode.
RecoveryResult recover_robin(const InvariantVector& data, const DomainContext& domain, double K0,
                             const RecoveryOptions& options = {});

/// L_0 extrapolated from d_q / q^2 over the largest q (fit a + b/q^2 + c/q^4);
/// returns {value, error estimate}.
std::pair<double, double> extrapolate_l0(const InvariantVector& data, int points = 4);

// --- triple audit --------------------------------------------------------------

enum class TripleVerdict { PairIdentical, DataInconsistent, Inconclusive };
const char* to_string(TripleVerdict v) noexcept;

struct TripleReport {
  double marked[3] = {0, 0, 0};
  TripleVerdict verdict = TripleVerdict::Inconclusive;
  int pair[2] = {0, 0};  ///< 1-based indices of the routed pair
  double pair_sup_difference = 0.0;
  // Distinct marked values.
  double T_K12 = 0.0;  ///< max |T(K12 / mu)| over rows 0..q_max
  double T_K13 = 0.0;
  double heat_identity_12 = 0.0;  ///< int (K1 - K2)(kappa + 2(K1 + K2))
  double heat_identity_13 = 0.0;
  double A12 = 0.0;  ///< int (kappa + 2(K1 + K2)) f
  double A13 = 0.0;
  double derived_cross = 0.0;   ///< int (K2 - K3) f from (A12 - A13) / 2
  double direct_cross = 0.0;    ///< int (K2 - K3) f by quadrature
  double f_norm_sq = 0.0;       ///< int f^2 dsigma
  double predicted_cross = 0.0; ///< (K2(0) - K3(0)) int f^2
  std::string explanation;
};

TripleReport triple_disambiguate(const CosineSeries& K1, const CosineSeries& K2,
                                 const CosineSeries& K3, const DomainContext& domain,
                                 double tol = 1e-12);

// --- two-symmetry pin -------------------------------------------------------------

struct TwoSymmetryReport {
  double phi_marked = 0.0;
  double phi_opposite = 0.0;
  double constraint_residual = 0.0;  ///< d_2(K1) - d_2(K2)
  double deduced_offset = 0.0;       ///< K1(0) - K2(0) implied by the 2-orbit
  bool pinned = false;               ///< constraint satisfied, hence K1(0) = K2(0)
  double data_difference = 0.0;      ///< max_q |d_q(K1) - d_q(K2)| over the context's orbits
  bool identical = false;            ///< pinned and all data agree
};

/// Throws Error{SymmetryViolation} unless the domain has only even harmonics and
/// K1, K2 only even cosine modes.
TwoSymmetryReport two_symmetry_pin(const DomainContext& domain, const CosineSeries& K1,
                                   const CosineSeries& K2, double tol = 1e-10);

// --- suite ------------------------------------------------------------------------

struct SuiteOptions {
  std::vector<double> a2_values = {0.0, 0.005, 0.01};
  int functions_per_domain = 20;
  int K_modes = 6;
  std::uint64_t seed = 20240601;
  std::size_t samples = 512;
  RecoveryOptions recovery;
};

struct SuiteCell {
  double a2 = 0.0;
  int index = 0;
  std::vector<double> K_coeffs;
  double recovery_error = 0.0;  ///< sup |K_hat - K| (Neumann)
  double lsq_error = 0.0;       ///< sup |K_lsq - K|
  double lsq_agreement = 0.0;
  int neumann_terms = 0;
};

struct SuiteDomain {
  double a2 = 0.0;
  double epsilon = 0.0;
  Certificate certificate;
  double injectivity = 0.0;  ///< sup |K_hat| for zero data
  double max_recovery_error = 0.0;
  double max_lsq_agreement = 0.0;
};

struct SuiteSummary {
  std::vector<SuiteDomain> domains;
  std::vector<SuiteCell> cells;
};

/// Deterministic: random coefficients come from a fixed 64-bit generator per
/// cell, and every cell is computed independently.
SuiteSummary rigidity_suite(const SuiteOptions& options, Exec exec = Exec::parallel);
std::string suite_json(const SuiteSummary& s);
std::string suite_csv(const SuiteSummary& s);

/// Uniform [-1, 1) coefficients u_1..u_modes shifted so that sum u_j = 0.
std::vector<double> random_marked_zero_coeffs(std::uint64_t seed, int modes);

}  // namespace rigidity
