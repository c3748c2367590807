#include "rigidity/billiards.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <string>

#include "rigidity/errors.hpp"

namespace rigidity {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

int free_count(int q) { return (q - 1) / 2; }

std::vector<double> expand(int q, const Eigen::VectorXd& z) {
  std::vector<double> t(static_cast<std::size_t>(q), 0.0);
  for (int i = 1; i <= free_count(q); ++i) {
    t[static_cast<std::size_t>(i)] = z(i - 1);
    t[static_cast<std::size_t>(q - i)] = kTwoPi - z(i - 1);
  }
  if (q % 2 == 0) t[static_cast<std::size_t>(q / 2)] = std::numbers::pi;
  return t;
}

bool strictly_ordered(const std::vector<double>& t) {
  for (std::size_t k = 1; k < t.size(); ++k)
    if (!(t[k] > t[k - 1])) return false;
  return t.back() < kTwoPi;
}

// Full-coordinate gradient and Hessian of the closed-polygon length.
struct LengthModel {
  double length = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  std::vector<Vec2> p, dp;
  std::vector<Vec2> dir;
  std::vector<double> chord;
};

LengthModel evaluate(const BoundaryFrame& frame, const std::vector<double>& t) {
  const int q = static_cast<int>(t.size());
  LengthModel m;
  m.p.resize(t.size());
  m.dp.resize(t.size());
  std::vector<Vec2> ddp(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    m.p[k] = frame.position(t[k]);
    m.dp[k] = frame.d1(t[k]);
    ddp[k] = frame.d2(t[k]);
  }
  m.dir.resize(t.size());
  m.chord.resize(t.size());
  for (int k = 0; k < q; ++k) {
    const int k1 = (k + 1) % q;
    const Vec2 d = m.p[static_cast<std::size_t>(k1)] - m.p[static_cast<std::size_t>(k)];
    const double len = d.norm();
    if (!(len > 1e-14)) throw Error(ErrorKind::DegenerateChord, "coincident consecutive bounces");
    m.chord[static_cast<std::size_t>(k)] = len;
    m.dir[static_cast<std::size_t>(k)] = d / len;
    m.length += len;
  }
  m.grad = Eigen::VectorXd::Zero(q);
  m.hess = Eigen::MatrixXd::Zero(q, q);
  for (int k = 0; k < q; ++k) {
    const auto a = static_cast<std::size_t>(k);
    const auto b = static_cast<std::size_t>((k + 1) % q);
    const Vec2& n = m.dir[a];
    const double len = m.chord[a];
    const double pa = m.dp[a].dot(n);
    const double pb = m.dp[b].dot(n);
    m.grad(static_cast<long>(a)) -= pa;
    m.grad(static_cast<long>(b)) += pb;
    m.hess(static_cast<long>(a), static_cast<long>(a)) +=
        -ddp[a].dot(n) + (m.dp[a].squaredNorm() - pa * pa) / len;
    m.hess(static_cast<long>(b), static_cast<long>(b)) +=
        ddp[b].dot(n) + (m.dp[b].squaredNorm() - pb * pb) / len;
    const double off = -(m.dp[a].dot(m.dp[b]) - pa * pb) / len;
    m.hess(static_cast<long>(a), static_cast<long>(b)) += off;
    m.hess(static_cast<long>(b), static_cast<long>(a)) += off;
  }
  return m;
}

Eigen::MatrixXd reduction(int q) {
  const int nf = free_count(q);
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(q, nf);
  for (int i = 1; i <= nf; ++i) {
    e(i, i - 1) = 1.0;
    e(q - i, i - 1) = -1.0;
  }
  return e;
}

}  // namespace

double orbit_length(const BoundaryFrame& frame, std::span<const double> thetas) {
  if (thetas.size() < 2) throw Error(ErrorKind::InvalidArgument, "need at least two bounces");
  double total = 0.0;
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    const double ta = thetas[k] - std::numbers::pi;
    const double tb = thetas[(k + 1) % thetas.size()] - std::numbers::pi;
    const double len = (frame.position(tb) - frame.position(ta)).norm();
    if (!(len > 1e-14)) throw Error(ErrorKind::DegenerateChord, "coincident consecutive bounces");
    total += len;
  }
  return total;
}

PeriodicOrbit maximal_marked_orbit(const BoundaryFrame& frame, int q,
                                   const OrbitSolverOptions& options) {
  if (q < 2) throw Error(ErrorKind::InvalidArgument, "q must be >= 2");
  const int nf = free_count(q);
  const Eigen::MatrixXd e = reduction(q);

  // Regular polygon in the Lazutkin chart; for the circle this is exact.
  Eigen::VectorXd z(nf);
  for (int i = 1; i <= nf; ++i) z(i - 1) = frame.t_of_x(static_cast<double>(i) / q);
  const Eigen::VectorXd guess = z;

  PeriodicOrbit orbit;
  orbit.q = q;
  std::vector<double> t = expand(q, z);
  LengthModel model = evaluate(frame, t);
  int it = 0;
  bool converged = nf == 0;
  for (; it < options.max_iterations && !converged; ++it) {
    const Eigen::VectorXd g = e.transpose() * model.grad;
    if (g.lpNorm<Eigen::Infinity>() < options.gradient_tol) {
      converged = true;
      break;
    }
    const Eigen::MatrixXd h = e.transpose() * model.hess * e;
    Eigen::LLT<Eigen::MatrixXd> neg(-h);
    Eigen::VectorXd step;
    const bool newton = neg.info() == Eigen::Success;
    if (newton) {
      step = neg.solve(g);  // -H^{-1} g
    } else {
      // Damped ascent outside the concave region.
      const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
      step = g / scale;
    }
    double lambda = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Eigen::VectorXd trial = z + lambda * step;
      auto tt = expand(q, trial);
      if (strictly_ordered(tt)) {
        LengthModel tm = evaluate(frame, tt);
        const double tg = (e.transpose() * tm.grad).lpNorm<Eigen::Infinity>();
        if (tm.length >= model.length - 1e-15 * model.length ||
            (newton && tg < g.lpNorm<Eigen::Infinity>())) {
          z = trial;
          t = std::move(tt);
          model = std::move(tm);
          accepted = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!accepted) break;
    if (lambda * step.lpNorm<Eigen::Infinity>() < 1e-16) {
      converged = (e.transpose() * model.grad).lpNorm<Eigen::Infinity>() <
                  100.0 * options.gradient_tol;
      ++it;
      break;
    }
  }
  if (!converged) {
    const double gn = nf ? (e.transpose() * model.grad).lpNorm<Eigen::Infinity>() : 0.0;
    if (gn >= options.gradient_tol)
      throw Error(ErrorKind::NoConvergence,
                  "q = " + std::to_string(q) + ", gradient " + std::to_string(gn));
  }
  orbit.iterations = it;

  if (nf > 0) {
    const Eigen::MatrixXd h = e.transpose() * model.hess * e;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
    orbit.max_hessian_eigenvalue = es.eigenvalues().maxCoeff();
    if (orbit.max_hessian_eigenvalue > options.hessian_tol)
      throw Error(ErrorKind::NotMaximal, "indefinite second variation at q = " + std::to_string(q));
    orbit.ambiguous = (z - guess).lpNorm<Eigen::Infinity>() > std::numbers::pi / q;
  }
  orbit.maximal = true;

  const auto qs = static_cast<std::size_t>(q);
  orbit.t = t;
  orbit.theta.resize(qs);
  orbit.sigma.resize(qs);
  orbit.x.resize(qs);
  orbit.phi.resize(qs);
  orbit.chord = model.chord;
  orbit.length = model.length;
  for (std::size_t k = 0; k < qs; ++k) {
    orbit.theta[k] = t[k] + std::numbers::pi;
    orbit.sigma[k] = frame.sigma_at(t[k]);
    orbit.x[k] = frame.x_at(t[k]);
    const Vec2 tan = model.dp[k].normalized();
    const Vec2& out = model.dir[k];
    const Vec2& in = model.dir[(k + qs - 1) % qs];
    orbit.phi[k] = std::atan2(cross(tan, out), std::abs(tan.dot(out)));
    orbit.reflection_residual =
        std::max(orbit.reflection_residual, std::abs(tan.dot(in) - tan.dot(out)));
  }
  orbit.x[0] = 0.0;
  orbit.sigma[0] = 0.0;
  return orbit;
}

std::vector<PeriodicOrbit> marked_orbits(const BoundaryFrame& frame, std::span<const int> qs,
                                         Exec exec, const OrbitSolverOptions& options) {
  std::vector<PeriodicOrbit> out(qs.size());
  std::vector<std::exception_ptr> errors(qs.size());
  const auto n = static_cast<long>(qs.size());
#pragma omp parallel for schedule(dynamic, 1) if (exec == Exec::parallel)
  for (long i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    try {
      out[idx] = maximal_marked_orbit(frame, qs[idx], options);
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  }
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
  return out;
}

std::vector<PeriodicOrbit> marked_orbits_range(const BoundaryFrame& frame, int q_min, int q_max,
                                               Exec exec) {
  std::vector<int> qs;
  for (int q = q_min; q <= q_max; ++q) qs.push_back(q);
  return marked_orbits(frame, qs, exec);
}

PoincareData linearized_poincare(const BoundaryFrame& frame, const PeriodicOrbit& orbit,
                                 double degeneracy_tol, double angle_tol) {
  const auto q = static_cast<std::size_t>(orbit.q);
  Eigen::Matrix2d total = Eigen::Matrix2d::Identity();
  for (std::size_t k = 0; k < q; ++k) {
    const std::size_t k1 = (k + 1) % q;
    const double s0 = std::sin(orbit.phi[k]);
    const double s1 = std::sin(orbit.phi[k1]);
    if (s0 < angle_tol || s1 < angle_tol)
      throw Error(ErrorKind::SingularTransfer, "grazing bounce in orbit q = " + std::to_string(q));
    const double len = orbit.chord[k];
    const double k0 = frame.curvature(orbit.t[k]);
    const double kk1 = frame.curvature(orbit.t[k1]);
    // Second derivatives of the chord length in arclength variables.
    const double l00 = -k0 * s0 + s0 * s0 / len;
    const double l11 = -kk1 * s1 + s1 * s1 / len;
    const double l01 = s0 * s1 / len;
    // Map in (s, p = cos phi): p0 = -dl/ds0, p1 = dl/ds1.
    Eigen::Matrix2d sp;
    sp << -l00 / l01, -1.0 / l01, l01 - l11 * l00 / l01, -l11 / l01;
    // Change to (s, phi): dp = -sin(phi) dphi.
    Eigen::Matrix2d step = Eigen::Vector2d(1.0, -1.0 / s1).asDiagonal() * sp *
                           Eigen::Vector2d(1.0, -s0).asDiagonal();
    total = step * total;
  }
  PoincareData pd;
  pd.matrix = total;
  pd.trace = total.trace();
  pd.determinant = total.determinant();
  const std::complex<double> disc =
      std::sqrt(std::complex<double>(pd.trace * pd.trace - 4.0 * pd.determinant, 0.0));
  pd.eigenvalues[0] = 0.5 * (pd.trace + disc);
  pd.eigenvalues[1] = 0.5 * (pd.trace - disc);
  // det(P - I) = (1 - l0)(1 - l1); robust where the eigenvalues are a near-double root
  pd.nondegenerate = std::abs(1.0 - pd.trace + pd.determinant) > degeneracy_tol;
  return pd;
}

GenericityReport genericity_report(const BoundaryFrame& frame,
                                   std::span<const PeriodicOrbit> orbits, double length_tol,
                                   double degeneracy_tol) {
  GenericityReport rep;
  rep.note =
      "only marked symmetric maximal orbits of rotation number 1/q are enumerated; "
      "distinctness is checked among those orbits only";
  rep.min_length_gap = std::numeric_limits<double>::infinity();
  rep.all_nondegenerate = true;
  for (const auto& o : orbits) {
    const auto pd = linearized_poincare(frame, o, degeneracy_tol);
    rep.qs.push_back(o.q);
    rep.lengths.push_back(o.length);
    rep.traces.push_back(pd.trace);
    rep.nondegenerate.push_back(pd.nondegenerate);
    rep.all_nondegenerate = rep.all_nondegenerate && pd.nondegenerate;
  }
  for (std::size_t i = 0; i < rep.lengths.size(); ++i)
    for (std::size_t j = i + 1; j < rep.lengths.size(); ++j) {
      const double gap = std::abs(rep.lengths[i] - rep.lengths[j]);
      if (gap < rep.min_length_gap) {
        rep.min_length_gap = gap;
        rep.closest_pair[0] = rep.qs[i];
        rep.closest_pair[1] = rep.qs[j];
      }
    }
  rep.all_lengths_distinct = rep.min_length_gap > length_tol;
  return rep;
}

// --- alpha / beta asymptotics -----------------------------------------------------

double AlphaBetaFit::alpha(double x) const {
  double acc = 0.0;
  for (std::size_t m = 1; m < alpha_sine.size(); ++m)
    acc += alpha_sine[m] * std::sin(kTwoPi * static_cast<double>(m) * x);
  return acc;
}

double AlphaBetaFit::beta(double x) const {
  double acc = 0.0;
  for (std::size_t m = 0; m < beta_cosine.size(); ++m)
    acc += beta_cosine[m] * std::cos(kTwoPi * static_cast<double>(m) * x);
  return acc;
}

double AlphaBetaFit::alpha_sine_coefficient(int j) const {
  const auto jj = static_cast<std::size_t>(std::abs(j));
  if (jj == 0 || jj >= alpha_sine.size()) return 0.0;
  return (j > 0 ? 0.5 : -0.5) * alpha_sine[jj];
}

double AlphaBetaFit::beta_cosine_coefficient(int j) const {
  const auto jj = static_cast<std::size_t>(std::abs(j));
  if (jj >= beta_cosine.size()) return 0.0;
  return jj == 0 ? beta_cosine[0] : 0.5 * beta_cosine[jj];
}

double loglog_slope(std::span<const int> qs, std::span<const double> values) {
  const std::size_t n = qs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(values[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double lx = std::log(static_cast<double>(qs[i]));
    const double ly = std::log(values[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double nn = static_cast<double>(n);
  return (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
}

namespace {

// Joint least squares y(q, k) = sum_o sum_m c_{o,m} basis_m(k/q) / q^{2 + 2o};
// returns the leading-order coefficients c_{0,m}.
std::vector<double> ladder_fit(std::span<const PeriodicOrbit> orbits,
                               const std::vector<std::vector<double>>& data, int m_lo, int m_hi,
                               int orders, bool sine) {
  long rows = 0;
  for (const auto& o : orbits) rows += o.q;
  const int modes = m_hi - m_lo + 1;
  const long cols = static_cast<long>(modes) * (orders + 1);
  Eigen::MatrixXd a(rows, cols);
  Eigen::VectorXd y(rows);
  long r = 0;
  for (std::size_t i = 0; i < orbits.size(); ++i) {
    const int q = orbits[i].q;
    for (int k = 0; k < q; ++k, ++r) {
      const double x = static_cast<double>(k) / q;
      y(r) = data[i][static_cast<std::size_t>(k)];
      for (int o = 0; o <= orders; ++o) {
        const double w = std::pow(static_cast<double>(q), -2.0 - 2.0 * o);
        for (int m = m_lo; m <= m_hi; ++m) {
          const double arg = kTwoPi * m * x;
          a(r, static_cast<long>(o) * modes + (m - m_lo)) = w * (sine ? std::sin(arg) : std::cos(arg));
        }
      }
    }
  }
  Eigen::VectorXd scale = a.colwise().norm().transpose();
  for (long c = 0; c < cols; ++c) {
    if (scale(c) == 0.0) scale(c) = 1.0;
    a.col(c) /= scale(c);
  }
  // Modes invisible on some rung (sin(2 pi m k/q) = 0 up to roundoff) leave a
  // near-null space; the threshold keeps the minimum-norm solution there.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(1e-10);
  cod.compute(a);
  const Eigen::VectorXd sol = cod.solve(y).cwiseQuotient(scale);
  std::vector<double> lead(static_cast<std::size_t>(m_hi + 1), 0.0);
  for (int m = m_lo; m <= m_hi; ++m) lead[static_cast<std::size_t>(m)] = sol(m - m_lo);
  return lead;
}

}  // namespace

AlphaBetaFit fit_alpha_beta(const BoundaryFrame& frame, std::span<const PeriodicOrbit> orbits,
                            const FitOptions& options) {
  std::vector<PeriodicOrbit> ladder(orbits.begin(), orbits.end());
  std::sort(ladder.begin(), ladder.end(), [](const auto& a, const auto& b) { return a.q < b.q; });
  ladder.erase(std::unique(ladder.begin(), ladder.end(),
                           [](const auto& a, const auto& b) { return a.q == b.q; }),
               ladder.end());
  if (ladder.size() < 3)
    throw Error(ErrorKind::InsufficientLadder, "need at least three distinct q values");

  AlphaBetaFit fit;
  std::vector<std::vector<double>> xdev, phidev;
  for (const auto& o : ladder) {
    const double q = o.q;
    fit.qs.push_back(o.q);
    std::vector<double> ah(o.x.size()), bh(o.x.size()), xd(o.x.size()), pd(o.x.size());
    for (std::size_t k = 0; k < o.x.size(); ++k) {
      const double mu = frame.mu_at(o.t[k]);
      xd[k] = o.x[k] - static_cast<double>(k) / q;
      pd[k] = q * o.phi[k] / mu - 1.0;
      ah[k] = q * q * xd[k];
      bh[k] = q * q * pd[k];
    }
    for (std::size_t k = 1; k < o.x.size(); ++k) {
      const std::size_t mirror = o.x.size() - k;
      fit.alpha_parity_error = std::max(fit.alpha_parity_error, std::abs(ah[k] + ah[mirror]));
      fit.beta_parity_error = std::max(fit.beta_parity_error, std::abs(bh[k] - bh[mirror]));
    }
    fit.alpha_hat.push_back(std::move(ah));
    fit.beta_hat.push_back(std::move(bh));
    xdev.push_back(std::move(xd));
    phidev.push_back(std::move(pd));
  }

  // modes above half the largest q alias on every grid of the ladder
  const int modes = std::clamp(options.modes, 1, std::max(1, ladder.back().q / 2 - 1));
  fit.alpha_sine = ladder_fit(ladder, xdev, 1, modes, options.correction_orders, true);
  fit.beta_cosine = ladder_fit(ladder, phidev, 0, modes, options.correction_orders, false);

  for (std::size_t i = 0; i < ladder.size(); ++i) {
    const double q = ladder[i].q;
    double ra = 0.0, rb = 0.0;
    for (std::size_t k = 0; k < xdev[i].size(); ++k) {
      const double x = static_cast<double>(k) / q;
      ra = std::max(ra, std::abs(xdev[i][k] - fit.alpha(x) / (q * q)));
      rb = std::max(rb, std::abs(phidev[i][k] - fit.beta(x) / (q * q)));
    }
    fit.alpha_residual.push_back(ra);
    fit.beta_residual.push_back(rb);
  }
  fit.alpha_residual_slope = loglog_slope(fit.qs, fit.alpha_residual);
  fit.beta_residual_slope = loglog_slope(fit.qs, fit.beta_residual);

  // Richardson on the coarse grid using the two finest levels.
  const int q_min = fit.qs.front();
  const std::size_t hi = fit.qs.size() - 1;
  const std::size_t lo = hi - 1;
  const int q1 = fit.qs[lo], q2 = fit.qs[hi];
  if (q1 % q_min == 0 && q2 % q_min == 0) {
    const double w1 = static_cast<double>(q1) * q1, w2 = static_cast<double>(q2) * q2;
    for (int k = 0; k < q_min; ++k) {
      const auto i1 = static_cast<std::size_t>(k * (q1 / q_min));
      const auto i2 = static_cast<std::size_t>(k * (q2 / q_min));
      fit.alpha_richardson.push_back((w2 * fit.alpha_hat[hi][i2] - w1 * fit.alpha_hat[lo][i1]) /
                                     (w2 - w1));
      fit.beta_richardson.push_back((w2 * fit.beta_hat[hi][i2] - w1 * fit.beta_hat[lo][i1]) /
                                    (w2 - w1));
    }
  }
  return fit;
}

}  // namespace rigidity
