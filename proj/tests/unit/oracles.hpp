#pragma once

// Test-side oracles, written independently of the library internals.

#include <cmath>
#include <functional>
#include <utility>

#include <Eigen/Core>

#include "rigidity/geometry.hpp"

namespace oracle {

inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm), right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15 * tol)
    return left + right + (left + right - whole) / 15;
  return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

/// Adaptive Simpson quadrature.
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return simpson_rec(f, a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), tol, 50);
}

/// Polar curve r(theta) = 1 + sum a_n cos(n theta), evaluated directly.
struct Polar {
  std::vector<double> a;
  double r(double th) const {
    double v = 1.0;
    for (std::size_t n = 0; n < a.size(); ++n) v += a[n] * std::cos(n * th);
    return v;
  }
  double dr(double th) const {
    double v = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) v -= a[n] * n * std::sin(n * th);
    return v;
  }
  double speed(double th) const { return std::hypot(r(th), dr(th)); }
};

/// One bounce of the billiard map by ray shooting on the frame's closed-form
/// boundary. State (t, phi): phi is the angle from the ccw unit tangent.
inline std::pair<double, double> bounce(const rigidity::BoundaryFrame& F, double t, double phi) {
  const Eigen::Vector2d p0 = F.position(t), T = F.unit_tangent(t);
  const Eigen::Vector2d dir(std::cos(phi) * T.x() - std::sin(phi) * T.y(),
                            std::sin(phi) * T.x() + std::cos(phi) * T.y());
  auto g = [&](double s) {
    const Eigen::Vector2d d = F.position(s) - p0;
    return dir.x() * d.y() - dir.y() * d.x();
  };
  // g < 0 just ahead of t, > 0 just behind t + 2 pi; one sign change.
  const int n = 400;
  double lo = t + 1e-9, hi = t + 2 * M_PI - 1e-9;
  for (int i = 1; i < n; ++i) {
    const double s = t + 2 * M_PI * i / n;
    if (g(s) > 0) {
      hi = s;
      lo = t + 2 * M_PI * (i - 1) / n;
      if (i == 1) lo = t + 1e-9;
      break;
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0 ? hi : lo) = mid;
  }
  const double t1 = 0.5 * (lo + hi);
  const double c = dir.dot(F.unit_tangent(t1));
  return {t1, std::acos(std::clamp(c, -1.0, 1.0))};
}

}  // namespace oracle
