#include "rigidity/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rigidity/errors.hpp"

namespace rigidity {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_unit(double x) { return x - std::floor(x); }

}  // namespace

// --- DomainProfile -----------------------------------------------------------

double DomainProfile::radius(double theta) const {
  double r = 1.0;
  for (std::size_t n = 0; n < radial_coeffs.size(); ++n)
    r += radial_coeffs[n] * std::cos(static_cast<double>(n) * theta);
  return r;
}

double DomainProfile::radius_d1(double theta) const {
  double d = 0.0;
  for (std::size_t n = 1; n < radial_coeffs.size(); ++n) {
    const double nn = static_cast<double>(n);
    d -= radial_coeffs[n] * nn * std::sin(nn * theta);
  }
  return d;
}

double DomainProfile::radius_d2(double theta) const {
  double d = 0.0;
  for (std::size_t n = 1; n < radial_coeffs.size(); ++n) {
    const double nn = static_cast<double>(n);
    d -= radial_coeffs[n] * nn * nn * std::cos(nn * theta);
  }
  return d;
}

double DomainProfile::curvature(double theta) const {
  const double r = radius(theta);
  const double r1 = radius_d1(theta);
  const double r2 = radius_d2(theta);
  return (r * r + 2.0 * r1 * r1 - r * r2) / std::pow(r * r + r1 * r1, 1.5);
}

bool DomainProfile::even_harmonics_only(double tol) const {
  for (std::size_t n = 1; n < radial_coeffs.size(); n += 2)
    if (std::abs(radial_coeffs[n]) > tol) return false;
  return true;
}

DomainProfile build_profile(std::vector<double> radial_coeffs, int smoothness_order) {
  if (smoothness_order < 8)
    throw Error(ErrorKind::InvalidArgument, "smoothness order must be >= 8");
  for (double a : radial_coeffs)
    if (!std::isfinite(a)) throw Error(ErrorKind::InvalidArgument, "non-finite radial coefficient");

  DomainProfile p;
  p.radial_coeffs = std::move(radial_coeffs);
  p.smoothness_order = smoothness_order;

  const std::size_t n = std::max<std::size_t>(4096, 64 * (p.radial_coeffs.size() + 1));
  for (std::size_t i = 0; i < n; ++i) {
    const double theta = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
    if (!(p.radius(theta) > 0.0))
      throw Error(ErrorKind::NonPositiveRadius,
                  "r(theta) <= 0 at theta = " + std::to_string(theta));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double theta = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
    if (!(p.curvature(theta) > 0.0))
      throw Error(ErrorKind::NonConvex, "curvature <= 0 at theta = " + std::to_string(theta));
  }
  p.center_offset = p.radius(std::numbers::pi);
  return p;
}

// --- TrigSeries ----------------------------------------------------------------

TrigSeries TrigSeries::from_samples(std::span<const double> samples, Exec exec,
                                    double trim_relative) {
  auto spec = kernels::real_dft(samples, exec);
  double scale = std::abs(spec.a[0]);
  for (std::size_t k = 1; k < spec.a.size(); ++k)
    scale = std::max({scale, std::abs(spec.a[k]), std::abs(spec.b[k])});
  std::size_t keep = 1;
  for (std::size_t k = 1; k < spec.a.size(); ++k)
    if (std::max(std::abs(spec.a[k]), std::abs(spec.b[k])) > trim_relative * scale) keep = k + 1;
  TrigSeries s;
  s.a_.assign(spec.a.begin(), spec.a.begin() + static_cast<long>(keep));
  s.b_.assign(spec.b.begin(), spec.b.begin() + static_cast<long>(keep));
  return s;
}

double TrigSeries::value(double t) const {
  if (a_.empty()) return 0.0;
  double acc = a_[0];
  const double c1 = std::cos(t), s1 = std::sin(t);
  double ck = c1, sk = s1;
  for (std::size_t k = 1; k < a_.size(); ++k) {
    acc += a_[k] * ck + b_[k] * sk;
    const double cn = ck * c1 - sk * s1;
    sk = sk * c1 + ck * s1;
    ck = cn;
  }
  return acc;
}

double TrigSeries::derivative(double t) const {
  double acc = 0.0;
  const double c1 = std::cos(t), s1 = std::sin(t);
  double ck = c1, sk = s1;
  for (std::size_t k = 1; k < a_.size(); ++k) {
    const double kk = static_cast<double>(k);
    acc += kk * (b_[k] * ck - a_[k] * sk);
    const double cn = ck * c1 - sk * s1;
    sk = sk * c1 + ck * s1;
    ck = cn;
  }
  return acc;
}

double TrigSeries::antiderivative(double t) const {
  if (a_.empty()) return 0.0;
  double acc = a_[0] * t;
  const double c1 = std::cos(t), s1 = std::sin(t);
  double ck = c1, sk = s1;
  for (std::size_t k = 1; k < a_.size(); ++k) {
    const double kk = static_cast<double>(k);
    acc += (a_[k] * sk + b_[k] * (1.0 - ck)) / kk;
    const double cn = ck * c1 - sk * s1;
    sk = sk * c1 + ck * s1;
    ck = cn;
  }
  return acc;
}

// --- BoundaryFrame -------------------------------------------------------------

BoundaryFrame::BoundaryFrame(DomainProfile profile, std::size_t samples, Exec exec)
    : profile_(std::move(profile)) {
  const std::size_t n = samples;
  const double h = kTwoPi / static_cast<double>(n);

  std::vector<double> speed(n), density(n);
  kernels::tabulate(n, [&](std::size_t i) { return this->speed(h * static_cast<double>(i)); },
                    speed, exec);
  kernels::tabulate(
      n,
      [&](std::size_t i) {
        const double t = h * static_cast<double>(i);
        return std::pow(curvature(t), 2.0 / 3.0) * this->speed(t);
      },
      density, exec);

  speed_series_ = TrigSeries::from_samples(speed, exec);
  density_series_ = TrigSeries::from_samples(density, exec);
  perimeter_ = kTwoPi * speed_series_.mean();
  lazutkin_constant_ = 1.0 / (kTwoPi * density_series_.mean());

  samples_.resize(n);
  x_weights_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = h * static_cast<double>(i);
    FrameSample& s = samples_[i];
    s.t = t;
    s.theta = t + std::numbers::pi;
    s.position = position(t);
    s.tangent = unit_tangent(t);
    s.speed = speed[i];
    s.sigma = sigma_at(t);
    s.kappa = curvature(t);
    s.x = x_at(t);
    s.mu = mu_at(t);
    x_weights_[i] = lazutkin_constant_ * density[i] * h;
  }
}

double BoundaryFrame::step() const { return kTwoPi / static_cast<double>(samples_.size()); }

Vec2 BoundaryFrame::position(double t) const {
  const double theta = t + std::numbers::pi;
  const double r = profile_.radius(theta);
  return Vec2(r * std::cos(theta) + profile_.center_offset, r * std::sin(theta));
}

Vec2 BoundaryFrame::d1(double t) const {
  const double theta = t + std::numbers::pi;
  const double r = profile_.radius(theta);
  const double r1 = profile_.radius_d1(theta);
  const double c = std::cos(theta), s = std::sin(theta);
  return Vec2(r1 * c - r * s, r1 * s + r * c);
}

Vec2 BoundaryFrame::d2(double t) const {
  const double theta = t + std::numbers::pi;
  const double r = profile_.radius(theta);
  const double r1 = profile_.radius_d1(theta);
  const double r2 = profile_.radius_d2(theta);
  const double c = std::cos(theta), s = std::sin(theta);
  return Vec2(r2 * c - 2.0 * r1 * s - r * c, r2 * s + 2.0 * r1 * c - r * s);
}

Vec2 BoundaryFrame::unit_tangent(double t) const { return d1(t).normalized(); }

double BoundaryFrame::speed(double t) const {
  const double theta = t + std::numbers::pi;
  return std::hypot(profile_.radius(theta), profile_.radius_d1(theta));
}

double BoundaryFrame::curvature(double t) const {
  return profile_.curvature(t + std::numbers::pi);
}

double BoundaryFrame::mu_at(double t) const {
  return std::pow(curvature(t), 1.0 / 3.0) / (2.0 * lazutkin_constant_);
}

double BoundaryFrame::sigma_at(double t) const { return speed_series_.antiderivative(t); }

double BoundaryFrame::x_at(double t) const {
  return lazutkin_constant_ * density_series_.antiderivative(t);
}

double BoundaryFrame::t_of_x(double x) const {
  const double turns = std::floor(x);
  const double xr = x - turns;
  double t = kTwoPi * xr;
  for (int it = 0; it < 60; ++it) {
    const double f = x_at(t) - xr;
    const double df = lazutkin_constant_ * std::pow(curvature(t), 2.0 / 3.0) * speed(t);
    const double dt = f / df;
    t -= dt;
    if (std::abs(dt) < 1e-16) break;
  }
  return t + kTwoPi * turns;
}

double BoundaryFrame::t_of_sigma(double sigma) const {
  const double turns = std::floor(sigma / perimeter_);
  const double sr = sigma - turns * perimeter_;
  double t = kTwoPi * sr / perimeter_;
  for (int it = 0; it < 60; ++it) {
    const double dt = (sigma_at(t) - sr) / speed(t);
    t -= dt;
    if (std::abs(dt) < 1e-16) break;
  }
  return t + kTwoPi * turns;
}

BoundaryFrame build_frame(const DomainProfile& profile, std::size_t samples, Exec exec) {
  if (samples < 256 || samples % 2 != 0)
    throw Error(ErrorKind::InvalidArgument, "frame sample count must be even and >= 256");
  return BoundaryFrame(profile, samples, exec);
}

// --- LazutkinChart -------------------------------------------------------------

double LazutkinChart::x_of_sigma(double sigma) const {
  const double t = frame_->t_of_sigma(sigma);
  return frame_->x_at(t);
}

double LazutkinChart::sigma_of_x(double x) const { return frame_->sigma_at(frame_->t_of_x(x)); }

double LazutkinChart::theta_of_x(double x) const {
  return frame_->t_of_x(x) + std::numbers::pi;
}

double LazutkinChart::x_of_theta(double theta) const {
  return wrap_unit(frame_->x_at(theta - std::numbers::pi));
}

double LazutkinChart::mu(double x) const { return frame_->mu_at(frame_->t_of_x(wrap_unit(x))); }

double LazutkinChart::mu_chain_rule(double x) const {
  const double t = frame_->t_of_x(wrap_unit(x));
  const double cl = frame_->lazutkin_constant();
  const double dx_dt = cl * frame_->lazutkin_density_series().value(t);
  const double dsigma_dt = frame_->speed_series().value(t);
  const double dx_dsigma = dx_dt / dsigma_dt;
  // dx/dsigma = C_L rho^{-2/3}  =>  rho^{-1/3} = sqrt(dx/dsigma / C_L)
  return std::sqrt(dx_dsigma / cl) / (2.0 * cl);
}

// --- closeness -----------------------------------------------------------------

ClosenessReport closeness_report(const BoundaryFrame& frame, int order) {
  if (order < 0) throw Error(ErrorKind::InvalidArgument, "closeness order must be >= 0");
  const std::size_t n = frame.size();
  std::vector<double> mu(n);
  kernels::tabulate(
      n,
      [&](std::size_t m) {
        return frame.mu_at(frame.t_of_x(static_cast<double>(m) / static_cast<double>(n)));
      },
      mu, Exec::parallel);

  ClosenessReport rep;
  rep.order = order;
  for (double v : mu) rep.c0_deviation = std::max(rep.c0_deviation, std::abs(v - std::numbers::pi));
  rep.epsilon = rep.c0_deviation;
  if (order == 0) return rep;

  auto spec = kernels::real_dft(mu, Exec::parallel);
  const double floor_level = 1e-13 * std::abs(spec.a[0]);
  for (std::size_t k = 1; k < spec.a.size(); ++k) {
    if (std::abs(spec.a[k]) < floor_level) spec.a[k] = 0.0;
    if (std::abs(spec.b[k]) < floor_level) spec.b[k] = 0.0;
  }
  std::size_t top = 1;
  for (std::size_t k = 1; k < spec.a.size(); ++k)
    if (spec.a[k] != 0.0 || spec.b[k] != 0.0) top = k + 1;

  rep.derivative_norms.assign(static_cast<std::size_t>(order), 0.0);
  for (int m = 1; m <= order; ++m) {
    const double shift = 0.5 * std::numbers::pi * m;
    std::vector<double> vals(n);
    kernels::tabulate(
        n,
        [&](std::size_t i) {
          const double x = static_cast<double>(i) / static_cast<double>(n);
          double acc = 0.0;
          for (std::size_t k = 1; k < top; ++k) {
            const double w = kTwoPi * static_cast<double>(k);
            const double phase = w * x + shift;
            acc += std::pow(w, m) * (spec.a[k] * std::cos(phase) + spec.b[k] * std::sin(phase));
          }
          return acc;
        },
        vals, Exec::parallel);
    double norm = 0.0;
    for (double v : vals) norm = std::max(norm, std::abs(v));
    rep.derivative_norms[static_cast<std::size_t>(m - 1)] = norm;
    rep.epsilon = std::max(rep.epsilon, norm);
  }
  return rep;
}

}  // namespace rigidity
