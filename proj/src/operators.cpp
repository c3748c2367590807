#include "rigidity/operators.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "rigidity/errors.hpp"
#include "rigidity/kernels.hpp"

namespace rigidity {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<const PeriodicOrbit*> index_orbits(std::span<const PeriodicOrbit> orbits, int Q) {
  std::vector<const PeriodicOrbit*> by_q(static_cast<std::size_t>(std::max(Q, 1)) + 1, nullptr);
  for (const auto& o : orbits)
    if (o.q >= 2 && o.q <= Q) by_q[static_cast<std::size_t>(o.q)] = &o;
  for (int q = 2; q <= Q; ++q)
    if (!by_q[static_cast<std::size_t>(q)])
      throw Error(ErrorKind::InvalidArgument, "missing orbit for q = " + std::to_string(q));
  return by_q;
}

}  // namespace

void GammaSpaceParams::validate() const {
  if (!(gamma > 3.0 && gamma < 4.0))
    throw Error(ErrorKind::InvalidArgument, "gamma must lie in (3, 4)");
  if (J < 2 || Q < 2) throw Error(ErrorKind::InvalidArgument, "J and Q must be >= 2");
  if (Q > J) throw Error(ErrorKind::InvalidArgument, "row truncation Q must not exceed J");
}

const char* to_string(OperatorKind kind) noexcept {
  switch (kind) {
    case OperatorKind::T: return "T";
    case OperatorKind::Delta: return "Delta";
    case OperatorKind::DeltaPrime: return "DeltaPrime";
    case OperatorKind::Remainder: return "R";
    case OperatorKind::TStarR: return "T_star_R";
    case OperatorKind::Identity: return "Id";
    case OperatorKind::Generic: return "generic";
  }
  return "generic";
}

OperatorMatrix assemble_T(const BoundaryFrame& frame, std::span<const PeriodicOrbit> orbits,
                          int Q, int J, Exec exec) {
  if (Q < 1 || J < 0) throw Error(ErrorKind::InvalidArgument, "bad truncation");
  const auto by_q = index_orbits(orbits, Q);
  OperatorMatrix T;
  T.kind = OperatorKind::T;
  T.first_row = 0;
  T.first_col = 0;
  T.values = Eigen::MatrixXd::Zero(Q + 1, J + 1);
  T.values(0, 0) = 1.0;
  T.values.row(1).setOnes();

  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
  for (int q = 2; q <= Q; ++q) {
    try {
      const auto row = script_L_q_row(*by_q[static_cast<std::size_t>(q)], frame, J);
      for (int j = 0; j <= J; ++j) T.values(q, j) = row[static_cast<std::size_t>(j)];
    } catch (...) {
#pragma omp critical(rigidity_assemble)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return T;
}

OperatorMatrix assemble_delta(const GammaSpaceParams& params) {
  OperatorMatrix D;
  D.kind = OperatorKind::Delta;
  D.values = Eigen::MatrixXd::Zero(params.Q, params.J);
  for (int q = 1; q <= params.Q; ++q)
    for (int j = q; j <= params.J; j += q) D.values(q - 1, j - 1) = 1.0;
  return D;
}

OperatorMatrix assemble_identity(const GammaSpaceParams& params) {
  OperatorMatrix I;
  I.kind = OperatorKind::Identity;
  I.values = Eigen::MatrixXd::Zero(params.Q, params.J);
  for (int q = 1; q <= std::min(params.Q, params.J); ++q) I.values(q - 1, q - 1) = 1.0;
  return I;
}

double hurwitz_zeta(double s, double a) {
  if (!(s > 1.0) || !(a > 0.0))
    throw Error(ErrorKind::InvalidArgument, "hurwitz_zeta needs s > 1 and a > 0");
  // Euler-Maclaurin after N direct terms.
  constexpr int N = 12;
  static constexpr double kB2k[] = {1.0 / 6.0,     -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0,
                                    5.0 / 66.0,    -691.0 / 2730.0, 7.0 / 6.0};
  double acc = 0.0;
  for (int k = N - 1; k >= 0; --k) acc += std::pow(k + a, -s);
  const double x = N + a;
  acc += std::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(x, -s);
  double rising = s;             // s (s+1) ... (s + 2i - 2)
  double fact = 2.0;             // (2i)!
  double power = std::pow(x, -s - 1.0);
  for (int i = 1; i <= 7; ++i) {
    acc += kB2k[i - 1] / fact * rising * power;
    rising *= (s + 2.0 * i - 1.0) * (s + 2.0 * i);
    fact *= (2.0 * i + 1.0) * (2.0 * i + 2.0);
    power /= x * x;
  }
  return acc;
}

GammaNorm gamma_norm(const OperatorMatrix& T, double gamma, std::span<const double> divisor_tail,
                     Exec exec) {
  const long rows = T.values.rows();
  if (!divisor_tail.empty() && static_cast<long>(divisor_tail.size()) != rows)
    throw Error(ErrorKind::InvalidArgument, "divisor tail needs one entry per row");
  const int J = T.last_col();
  std::vector<double> trunc(static_cast<std::size_t>(rows), 0.0), full(trunc.size(), 0.0);
  kernels::tabulate(
      trunc.size(),
      [&](std::size_t r) {
        const int q = T.first_row + static_cast<int>(r);
        if (q < 1) return 0.0;
        double acc = 0.0;
        for (long c = 0; c < T.values.cols(); ++c) {
          const int j = T.first_col + static_cast<int>(c);
          if (j < 1) continue;
          acc += std::pow(static_cast<double>(q) / j, gamma) *
                 std::abs(T.values(static_cast<long>(r), c));
        }
        return acc;
      },
      trunc, exec);
  for (std::size_t r = 0; r < trunc.size(); ++r) {
    full[r] = trunc[r];
    const int q = T.first_row + static_cast<int>(r);
    if (q >= 1 && !divisor_tail.empty() && divisor_tail[r] != 0.0)
      full[r] += std::abs(divisor_tail[r]) * hurwitz_zeta(gamma, std::floor(double(J) / q) + 1.0);
  }
  GammaNorm n;
  for (std::size_t r = 0; r < trunc.size(); ++r) {
    n.truncated = std::max(n.truncated, trunc[r]);
    if (full[r] > n.tail_completed) {
      n.tail_completed = full[r];
      n.argmax_row = T.first_row + static_cast<int>(r);
    }
  }
  return n;
}

double script_L_star_star(const BoundaryFrame& frame, const AlphaBetaFit& fit, int j) {
  return tilde_sigma(frame, j).real() - fit.beta_cosine_coefficient(j) -
         kTwoPi * j * fit.alpha_sine_coefficient(j);
}

OperatorSetup build_operator(const BoundaryFrame& frame, std::span<const PeriodicOrbit> orbits,
                             const AlphaBetaFit& fit, const GammaSpaceParams& params, Exec exec) {
  params.validate();
  const int Q = params.Q, J = params.J;
  OperatorSetup s;
  s.params = params;
  s.M = assemble_T(frame, orbits, Q, J, exec);
  s.l_star_star.resize(static_cast<std::size_t>(J) + 1);
  for (int j = 0; j <= J; ++j)
    s.l_star_star[static_cast<std::size_t>(j)] = script_L_star_star(frame, fit, j);
  s.beta0 = fit.beta_cosine_coefficient(0);
  s.sigma0.assign(static_cast<std::size_t>(Q) + 1, 0.0);
  for (int q = 2; q <= Q; ++q) s.sigma0[static_cast<std::size_t>(q)] = sigma_p(frame, q, 0).real();

  s.divisor_coeff.assign(static_cast<std::size_t>(Q), 1.0);
  for (int q = 2; q <= Q; ++q)
    s.divisor_coeff[static_cast<std::size_t>(q - 1)] =
        1.0 + s.sigma0[static_cast<std::size_t>(q)] - s.beta0 / (double(q) * q);

  s.t_star_r.kind = OperatorKind::TStarR;
  s.t_star_r.values = s.M.values.block(1, 1, Q, J);
  for (int q = 2; q <= Q; ++q)
    for (int j = 1; j <= J; ++j)
      s.t_star_r.values(q - 1, j - 1) -= s.l_star_star[static_cast<std::size_t>(j)] / (double(q) * q);

  s.delta_prime.kind = OperatorKind::DeltaPrime;
  s.delta_prime.values = Eigen::MatrixXd::Zero(Q, J);
  s.remainder.kind = OperatorKind::Remainder;
  s.remainder.values = s.t_star_r.values;
  for (int q = 1; q <= Q; ++q) {
    const double c = s.divisor_coeff[static_cast<std::size_t>(q - 1)];
    for (int j = q; j <= J; j += q) {
      if (q >= 2) s.delta_prime.values(q - 1, j - 1) = c - 1.0;
      s.remainder.values(q - 1, j - 1) -= c;
    }
  }
  return s;
}

OperatorMatrix minus_identity(const OperatorMatrix& T) {
  OperatorMatrix out = T;
  out.kind = OperatorKind::Generic;
  for (int q = std::max(1, T.first_row); q <= T.last_row(); ++q)
    if (q >= T.first_col && q <= T.last_col()) out.values(q - T.first_row, q - T.first_col) -= 1.0;
  return out;
}

double analytic_bound(double epsilon, double C) {
  const double z3 = std::riemann_zeta(3.0);
  const double a = std::numbers::pi + epsilon;
  return z3 - 1.0 + (a * a * a / (48.0 * std::cos(epsilon)) + C * epsilon / 4.0) * z3 + C * epsilon;
}

Certificate contraction_certificate(double gamma, double epsilon, double C) {
  if (!(gamma > 3.0 && gamma < 4.0))
    throw Error(ErrorKind::InvalidArgument, "gamma must lie in (3, 4)");
  if (!(epsilon >= 0.0) || !(C >= 0.0))
    throw Error(ErrorKind::InvalidArgument, "epsilon and C must be non-negative");
  Certificate c;
  c.gamma = gamma;
  c.epsilon = epsilon;
  c.C = C;
  c.analytic_bound = analytic_bound(epsilon, C);
  c.analytic_pass = c.analytic_bound < 1.0;
  c.pass = c.analytic_pass;
  return c;
}

Certificate contraction_certificate(const OperatorSetup& setup, double epsilon, double C) {
  Certificate c = contraction_certificate(setup.params.gamma, epsilon, C);
  const double g = setup.params.gamma;
  const int Q = setup.params.Q;
  std::vector<double> ones(static_cast<std::size_t>(Q), 1.0), dp_tail(ones.size(), 0.0);
  for (std::size_t r = 1; r < dp_tail.size(); ++r) dp_tail[r] = setup.divisor_coeff[r] - 1.0;

  const auto full = gamma_norm(minus_identity(setup.t_star_r), g, setup.divisor_coeff);
  c.has_numeric = true;
  c.numeric_truncated = full.truncated;
  c.numeric_norm = full.tail_completed;
  c.delta_minus_id =
      gamma_norm(minus_identity(assemble_delta(setup.params)), g, ones).tail_completed;
  c.delta_prime = gamma_norm(setup.delta_prime, g, dp_tail).tail_completed;
  c.remainder = gamma_norm(setup.remainder, g).tail_completed;
  c.numeric_pass = c.numeric_norm < 1.0;
  c.pass = c.analytic_pass && c.numeric_pass;
  return c;
}

std::string to_json(const Certificate& c) {
  nlohmann::ordered_json j;
  j["gamma"] = c.gamma;
  j["epsilon"] = c.epsilon;
  j["C"] = c.C;
  j["analytic_bound"] = c.analytic_bound;
  if (c.has_numeric) {
    j["numeric_norm"] = c.numeric_norm;
    j["numeric_truncated"] = c.numeric_truncated;
    j["delta_minus_id"] = c.delta_minus_id;
    j["delta_prime"] = c.delta_prime;
    j["remainder"] = c.remainder;
  } else {
    j["numeric_norm"] = nullptr;
  }
  j["analytic_pass"] = c.analytic_pass;
  j["numeric_pass"] = c.numeric_pass;
  j["pass"] = c.pass;
  return j.dump(2);
}

double gamma_weighted_sup(std::span<const double> y, int first, double gamma) {
  double m = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const int q = first + static_cast<int>(i);
    if (q >= 1) m = std::max(m, std::pow(double(q), gamma) * std::abs(y[i]));
  }
  return m;
}

NeumannResult neumann_invert(const OperatorMatrix& T, const Eigen::VectorXd& rhs, int order,
                             double gamma, double tol) {
  if (T.first_row != 1 || T.first_col != 1 || T.values.rows() != T.values.cols())
    throw Error(ErrorKind::InvalidArgument, "Neumann inversion needs a square block from (1, 1)");
  if (rhs.size() != T.values.rows())
    throw Error(ErrorKind::InvalidArgument, "right-hand side size mismatch");
  if (order < 1) throw Error(ErrorKind::InvalidArgument, "Neumann order must be >= 1");
  const Eigen::MatrixXd E = Eigen::MatrixXd::Identity(T.values.rows(), T.values.cols()) - T.values;
  NeumannResult res;
  Eigen::VectorXd term = rhs;
  res.solution = rhs;
  res.update_norms.push_back(gamma_weighted_sup({term.data(), size_t(term.size())}, 1, gamma));
  res.terms = 1;
  if (res.update_norms.back() <= tol) res.converged = true;
  while (!res.converged && res.terms < order) {
    term = E * term;
    res.solution += term;
    ++res.terms;
    const double n = gamma_weighted_sup({term.data(), size_t(term.size())}, 1, gamma);
    res.update_norms.push_back(n);
    const double scale = gamma_weighted_sup({res.solution.data(), size_t(term.size())}, 1, gamma);
    if (n <= tol * std::max(1.0, scale)) res.converged = true;
  }
  return res;
}

Eigen::VectorXd least_squares_solve(const OperatorMatrix& T, const Eigen::VectorXd& rhs) {
  if (rhs.size() != T.values.rows())
    throw Error(ErrorKind::InvalidArgument, "right-hand side size mismatch");
  return T.values.colPivHouseholderQr().solve(rhs);
}

DecompositionReport decompose_T(const OperatorSetup& setup, const CosineSeries& u) {
  const int Q = setup.params.Q, J = setup.params.J;
  std::vector<double> c(static_cast<std::size_t>(J) + 1, 0.0);
  for (int j = 0; j <= std::min(J, u.order()); ++j)
    c[static_cast<std::size_t>(j)] = u.coeffs[static_cast<std::size_t>(j)];
  double lss = 0.0;
  for (int j = 1; j <= J; ++j) lss += setup.l_star_star[static_cast<std::size_t>(j)] * c[j];

  DecompositionReport rep;
  for (int q = 2; q <= Q; ++q) {
    double tu = 0.0, du = 0.0;
    for (int j = 0; j <= J; ++j) tu += setup.M.values(q, j) * c[static_cast<std::size_t>(j)];
    for (int j = q; j <= J; j += q) du += c[static_cast<std::size_t>(j)];
    const double pred = setup.M.values(q, 0) * c[0] +
                        setup.divisor_coeff[static_cast<std::size_t>(q - 1)] * du +
                        lss / (double(q) * q);
    rep.qs.push_back(q);
    rep.residual.push_back(std::abs(tu - pred));
    rep.max_residual = std::max(rep.max_residual, rep.residual.back());
  }
  std::vector<int> qs;
  std::vector<double> rs;
  for (std::size_t i = 0; i < rep.qs.size(); ++i)
    if (rep.qs[i] >= 4 && rep.residual[i] > 0.0) {
      qs.push_back(rep.qs[i]);
      rs.push_back(rep.residual[i]);
    }
  rep.slope = qs.size() >= 2 ? loglog_slope(qs, rs) : 0.0;
  return rep;
}

double calibrate_remainder_constant(std::span<const double> remainder_norms,
                                    std::span<const double> epsilons) {
  if (remainder_norms.size() != epsilons.size() || remainder_norms.empty())
    throw Error(ErrorKind::InvalidArgument, "calibration needs matching non-empty samples");
  double C = 0.0;
  for (std::size_t i = 0; i < epsilons.size(); ++i)
    if (epsilons[i] > 0.0) C = std::max(C, remainder_norms[i] / epsilons[i]);
  return C;
}

std::string matrix_csv(const OperatorMatrix& T) {
  std::ostringstream out;
  out << "q";
  for (int j = T.first_col; j <= T.last_col(); ++j) out << ",j" << j;
  out << '\n';
  char buf[40];
  for (int q = T.first_row; q <= T.last_row(); ++q) {
    out << q;
    for (int j = T.first_col; j <= T.last_col(); ++j) {
      std::snprintf(buf, sizeof buf, ",%.17g", T.at(q, j));
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace rigidity
