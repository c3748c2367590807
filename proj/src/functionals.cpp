#include "rigidity/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json.hpp"

#include "rigidity/errors.hpp"
#include "rigidity/kernels.hpp"

namespace rigidity {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// sum_j c_j cos(j theta) by the three-term recurrence.
double cosine_sum(std::span<const double> c, double theta) {
  if (c.empty()) return 0.0;
  const double c1 = std::cos(theta);
  double prev = 1.0, cur = c1;
  double acc = c[0];
  for (std::size_t j = 1; j < c.size(); ++j) {
    acc += c[j] * cur;
    const double next = 2.0 * c1 * cur - prev;
    prev = cur;
    cur = next;
  }
  return acc;
}

double sin_floor(double phi, double tol) {
  const double s = std::sin(phi);
  if (!(s > tol)) throw Error(ErrorKind::SingularAngle, "sin(phi) below tolerance");
  return s;
}

std::complex<double> x_fourier(const BoundaryFrame& frame,
                               const std::function<double(const FrameSample&)>& f, int p,
                               double imag_tol) {
  const auto w = frame.x_weights();
  const auto s = frame.samples();
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double v = f(s[i]) * w[i];
    const double arg = kTwoPi * static_cast<double>(p) * s[i].x;
    re += v * std::cos(arg);
    im += v * std::sin(arg);
  }
  if (std::abs(im) > imag_tol)
    throw Error(ErrorKind::SymmetryViolation,
                "Fourier coefficient has imaginary part " + std::to_string(im));
  return {re, im};
}

}  // namespace

// --- CosineSeries --------------------------------------------------------------

CosineSeries CosineSeries::basis(int j) {
  if (j < 0) throw Error(ErrorKind::InvalidArgument, "basis index must be >= 0");
  std::vector<double> c(static_cast<std::size_t>(j) + 1, 0.0);
  c.back() = 1.0;
  return CosineSeries(std::move(c));
}

double CosineSeries::operator()(double x) const { return cosine_sum(coeffs, kTwoPi * x); }

double CosineSeries::at_marked() const {
  double acc = 0.0;
  for (double c : coeffs) acc += c;
  return acc;
}

bool CosineSeries::is_zero() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](double c) { return c == 0.0; });
}

CosineSeries& CosineSeries::operator+=(const CosineSeries& o) {
  if (o.coeffs.size() > coeffs.size()) coeffs.resize(o.coeffs.size(), 0.0);
  for (std::size_t j = 0; j < o.coeffs.size(); ++j) coeffs[j] += o.coeffs[j];
  return *this;
}

CosineSeries& CosineSeries::operator*=(double s) {
  for (double& c : coeffs) c *= s;
  return *this;
}

CosineSeries operator+(CosineSeries a, const CosineSeries& b) { return a += b; }
CosineSeries operator-(CosineSeries a, const CosineSeries& b) { return a += (-1.0) * b; }
CosineSeries operator*(double s, CosineSeries a) { return a *= s; }

CosineSeries project_cosine(const BoundaryFrame& frame,
                            const std::function<double(const FrameSample&)>& f, int order) {
  if (order < 0 || static_cast<std::size_t>(order) > frame.size() / 4)
    throw Error(ErrorKind::InvalidArgument, "cosine order must lie in [0, N/4]");
  const auto s = frame.samples();
  const auto w = frame.x_weights();
  std::vector<double> fw(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) fw[i] = f(s[i]) * w[i];

  std::vector<double> c(static_cast<std::size_t>(order) + 1);
  kernels::tabulate(
      c.size(),
      [&](std::size_t j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i)
          acc += fw[i] * std::cos(kTwoPi * static_cast<double>(j) * s[i].x);
        return j == 0 ? acc : 2.0 * acc;
      },
      c, Exec::parallel);
  return CosineSeries(std::move(c));
}

double sup_distance(const BoundaryFrame& frame, const CosineSeries& u, const CosineSeries& v) {
  const auto diff = u - v;
  double m = 0.0;
  for (const auto& s : frame.samples()) m = std::max(m, std::abs(diff(s.x)));
  return m;
}

// --- DKW functionals -------------------------------------------------------------

double ell_q_dkw(const CosineSeries& u, const PeriodicOrbit& orbit) {
  double acc = 0.0;
  for (std::size_t k = 0; k < orbit.x.size(); ++k) acc += u(orbit.x[k]) * std::sin(orbit.phi[k]);
  return acc;
}

double ell_0_dkw(const CosineSeries& u, const BoundaryFrame& frame) {
  return frame.integrate_dsigma([&](const FrameSample& s) { return u(s.x) * s.kappa; });
}

double ell_1_dkw(const CosineSeries& u, const BoundaryFrame& frame) {
  return frame.mu_at(0.0) * u.at_marked();
}

// --- Robin functionals -----------------------------------------------------------

double script_L_q(const CosineSeries& u, const PeriodicOrbit& orbit, const BoundaryFrame& frame,
                  double angle_tol) {
  const double q2 = static_cast<double>(orbit.q) * orbit.q;
  double acc = 0.0;
  for (std::size_t k = 0; k < orbit.x.size(); ++k)
    acc += u(orbit.x[k]) * frame.mu_at(orbit.t[k]) / (q2 * sin_floor(orbit.phi[k], angle_tol));
  return acc;
}

std::vector<double> script_L_q_row(const PeriodicOrbit& orbit, const BoundaryFrame& frame,
                                   int order, double angle_tol) {
  const double q2 = static_cast<double>(orbit.q) * orbit.q;
  const std::size_t n = orbit.x.size();
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k)
    w[k] = frame.mu_at(orbit.t[k]) / (q2 * sin_floor(orbit.phi[k], angle_tol));
  std::vector<double> row(static_cast<std::size_t>(order) + 1, 0.0);
  for (std::size_t j = 0; j < row.size(); ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      acc += w[k] * std::cos(kTwoPi * static_cast<double>(j) * orbit.x[k]);
    row[j] = acc;
  }
  return row;
}

double script_L_0(const CosineSeries& u) { return u.coeffs.empty() ? 0.0 : u.coeffs[0]; }

double script_L_0(const BoundaryFrame& frame, const std::function<double(const FrameSample&)>& f) {
  return frame.integrate_dx(f);
}

double script_L_1(const CosineSeries& u) { return u.at_marked(); }

// --- S_q -------------------------------------------------------------------------

double S_q_of_mu(int q, double mu) {
  const double y = mu / static_cast<double>(q);
  if (std::abs(y) < 1e-4) {
    const double y2 = y * y;
    return y2 / 6.0 + 7.0 * y2 * y2 / 360.0;
  }
  return y / std::sin(y) - 1.0;
}

double S_q_eval(const LazutkinChart& chart, int q, double x) {
  if (q < 2) throw Error(ErrorKind::InvalidArgument, "S_q needs q >= 2");
  return S_q_of_mu(q, chart.mu(x));
}

double S_q_bound(int q, double epsilon) {
  const double a = std::numbers::pi + epsilon;
  return a * a * a / (12.0 * static_cast<double>(q) * q * std::cos(epsilon));
}

double S_q_sup(const BoundaryFrame& frame, int q) {
  if (q < 2) throw Error(ErrorKind::InvalidArgument, "S_q needs q >= 2");
  double m = 0.0;
  for (const auto& s : frame.samples()) m = std::max(m, std::abs(S_q_of_mu(q, s.mu)));
  return m;
}

std::complex<double> sigma_p(const BoundaryFrame& frame, int q, int p, double imag_tol) {
  if (q < 2) throw Error(ErrorKind::InvalidArgument, "sigma_p needs q >= 2");
  return x_fourier(frame, [q](const FrameSample& s) { return S_q_of_mu(q, s.mu); }, p, imag_tol);
}

std::complex<double> tilde_sigma(const BoundaryFrame& frame, int j, double imag_tol) {
  return x_fourier(frame, [](const FrameSample& s) { return s.mu * s.mu / 6.0; }, j, imag_tol);
}

RiemannLimitReport riemann_limit_check(const CosineSeries& u, std::span<const PeriodicOrbit> orbits,
                                       const BoundaryFrame& frame) {
  if (orbits.size() < 3)
    throw Error(ErrorKind::InsufficientLadder, "need at least three orbits");
  std::vector<const PeriodicOrbit*> sorted;
  for (const auto& o : orbits) sorted.push_back(&o);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->q < b->q; });
  RiemannLimitReport rep;
  const double l0 = script_L_0(u);
  for (const auto* o : sorted) {
    rep.qs.push_back(o->q);
    rep.errors.push_back(std::abs(script_L_q(u, *o, frame) - l0));
  }
  rep.slope = -loglog_slope(rep.qs, rep.errors);
  return rep;
}

// --- invariant data ----------------------------------------------------------------

InvariantVector robin_data(const BoundaryFrame& frame, const CosineSeries& K,
                           std::span<const PeriodicOrbit> orbits, double H0, double H1,
                           double angle_tol) {
  int q_max = 0;
  for (const auto& o : orbits) q_max = std::max(q_max, o.q);
  if (q_max < 2) throw Error(ErrorKind::InvalidArgument, "invariant vector needs q_max >= 2");
  std::vector<const PeriodicOrbit*> by_q(static_cast<std::size_t>(q_max) + 1, nullptr);
  for (const auto& o : orbits) by_q[static_cast<std::size_t>(o.q)] = &o;
  for (int q = 2; q <= q_max; ++q)
    if (!by_q[static_cast<std::size_t>(q)])
      throw Error(ErrorKind::InvalidArgument, "missing orbit for q = " + std::to_string(q));

  InvariantVector v;
  v.q_max = q_max;
  v.H0 = H0;
  v.H1 = H1;
  v.d.assign(static_cast<std::size_t>(q_max) + 1, 0.0);
  v.d[0] = frame.integrate_dx([&](const FrameSample& s) { return K(s.x) / s.mu; });
  v.d[1] = K.at_marked();
  for (int q = 2; q <= q_max; ++q) {
    const auto& o = *by_q[static_cast<std::size_t>(q)];
    double acc = 0.0;
    for (std::size_t k = 0; k < o.x.size(); ++k) acc += K(o.x[k]) / sin_floor(o.phi[k], angle_tol);
    v.d[static_cast<std::size_t>(q)] = acc;
  }
  v.provenance = "marked symmetric maximal orbits q=2.." + std::to_string(q_max) + ", N=" +
                 std::to_string(frame.size());
  return v;
}

std::string to_json(const InvariantVector& v) {
  nlohmann::ordered_json j;
  j["d"] = v.d;
  j["H0"] = v.H0;
  j["H1"] = v.H1;
  j["normalization"] = v.normalization;
  j["q_max"] = v.q_max;
  if (!v.provenance.empty()) j["provenance"] = v.provenance;
  return j.dump(2);
}

InvariantVector invariant_vector_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("invariant vector JSON: ") + e.what());
  }
  for (const auto& [key, _] : j.items())
    if (key != "d" && key != "H0" && key != "H1" && key != "normalization" && key != "q_max" &&
        key != "provenance")
      throw Error(ErrorKind::InvalidArgument, "invariant vector JSON: unknown key '" + key + "'");
  InvariantVector v;
  try {
    v.d = j.at("d").get<std::vector<double>>();
    v.H0 = j.value("H0", 0.0);
    v.H1 = j.value("H1", 0.0);
    v.normalization = j.value("normalization", std::string("C_gamma=1"));
    v.q_max = j.at("q_max").get<int>();
    v.provenance = j.value("provenance", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("invariant vector JSON: ") + e.what());
  }
  if (v.normalization != "C_gamma=1")
    throw Error(ErrorKind::InvalidArgument, "unsupported normalization " + v.normalization);
  if (v.q_max < 2 || v.d.size() != static_cast<std::size_t>(v.q_max) + 1)
    throw Error(ErrorKind::InvalidArgument, "d must hold entries q = 0..q_max with q_max >= 2");
  for (double x : v.d)
    if (!std::isfinite(x)) throw Error(ErrorKind::InvalidArgument, "non-finite entry in d");
  return v;
}

}  // namespace rigidity
