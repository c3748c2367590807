#pragma once

// Near-circular Z2-symmetric convex domains, their boundary frame and the
// Lazutkin chart.
//
// Boundary parametrization: r(theta) = 1 + sum_n a_n cos(n theta) about a
// center on the symmetry (x-)axis, translated so that the point at
// theta = pi (the marked point) sits at the origin and the domain lies in
// {x >= 0}. Internally everything is parametrized by t = theta - pi, so the
// marked point is t = 0 and t increases counter-clockwise.
//
// Lazutkin chart: with rho = 1/kappa the radius of curvature,
//   x(sigma) = C_L int_0^sigma rho^{-2/3},   mu(x) = rho(x)^{-1/3} / (2 C_L).

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

#include "rigidity/kernels.hpp"

namespace rigidity {

using Vec2 = Eigen::Vector2d;

struct DomainProfile {
  std::vector<double> radial_coeffs;  ///< a_0, a_1, ..., a_M
  int smoothness_order = 8;
  double center_offset = 1.0;  ///< distance from the marked point to the center

  double radius(double theta) const;
  double radius_d1(double theta) const;
  double radius_d2(double theta) const;
  /// Curvature in the polar parametrization, (r^2 + 2r'^2 - r r'') / (r^2 + r'^2)^{3/2}.
  double curvature(double theta) const;
  /// True when every odd-index coefficient vanishes (extra symmetry about the
  /// axis perpendicular to the marked axis).
  bool even_harmonics_only(double tol = 0.0) const;
};

/// Validates a coefficient list by dense sampling of r and kappa.
/// Throws Error{NonPositiveRadius} or Error{NonConvex}.
DomainProfile build_profile(std::vector<double> radial_coeffs, int smoothness_order);

/// Real trigonometric series on [0, 2pi) with an exact antiderivative.
class TrigSeries {
 public:
  TrigSeries() = default;
  static TrigSeries from_samples(std::span<const double> samples, Exec exec = Exec::parallel,
                                 double trim_relative = 1e-16);

  double mean() const { return a_.empty() ? 0.0 : a_[0]; }
  double value(double t) const;
  double derivative(double t) const;
  /// Integral from 0 to t.
  double antiderivative(double t) const;
  std::size_t modes() const { return a_.size(); }

 private:
  std::vector<double> a_;
  std::vector<double> b_;
};

struct FrameSample {
  double t;      ///< frame parameter, theta - pi
  double theta;  ///< polar angle about the center
  Vec2 position;
  Vec2 tangent;  ///< unit, counter-clockwise
  double speed;  ///< d sigma / d t
  double sigma;  ///< arclength from the marked point
  double kappa;
  double x;      ///< Lazutkin coordinate
  double mu;     ///< Lazutkin weight
};

class BoundaryFrame {
 public:
  BoundaryFrame(DomainProfile profile, std::size_t samples, Exec exec = Exec::parallel);

  const DomainProfile& profile() const { return profile_; }
  std::size_t size() const { return samples_.size(); }
  std::span<const FrameSample> samples() const { return samples_; }
  double perimeter() const { return perimeter_; }
  double lazutkin_constant() const { return lazutkin_constant_; }
  double step() const;

  // Closed-form evaluators at frame parameter t.
  Vec2 position(double t) const;
  Vec2 d1(double t) const;
  Vec2 d2(double t) const;
  Vec2 unit_tangent(double t) const;
  double speed(double t) const;
  double curvature(double t) const;
  double mu_at(double t) const;

  // Spectral antiderivatives.
  double sigma_at(double t) const;
  double x_at(double t) const;
  double t_of_x(double x) const;
  double t_of_sigma(double sigma) const;

  const TrigSeries& speed_series() const { return speed_series_; }
  const TrigSeries& lazutkin_density_series() const { return density_series_; }

  /// Trapezoidal quadrature of g over arclength; g receives a FrameSample.
  template <class F>
  double integrate_dsigma(F&& g) const {
    double acc = 0.0;
    for (const auto& s : samples_) acc += g(s) * s.speed;
    return acc * step();
  }

  /// Trapezoidal quadrature of g over the Lazutkin coordinate, x in [0, 1).
  template <class F>
  double integrate_dx(F&& g) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < samples_.size(); ++i) acc += g(samples_[i]) * x_weights_[i];
    return acc;
  }

  /// dx weights of the Lazutkin quadrature (sum to 1).
  std::span<const double> x_weights() const { return x_weights_; }

 private:
  DomainProfile profile_;
  std::vector<FrameSample> samples_;
  std::vector<double> x_weights_;
  TrigSeries speed_series_;
  TrigSeries density_series_;  ///< rho^{-2/3} * speed
  double perimeter_ = 0.0;
  double lazutkin_constant_ = 0.0;
};

/// Throws Error{InvalidArgument} unless samples >= 256 and even.
BoundaryFrame build_frame(const DomainProfile& profile, std::size_t samples,
                          Exec exec = Exec::parallel);

/// Non-owning view providing the theta <-> sigma <-> x maps. The frame must
/// outlive the chart.
class LazutkinChart {
 public:
  explicit LazutkinChart(const BoundaryFrame& frame) : frame_(&frame) {}

  const BoundaryFrame& frame() const { return *frame_; }

  double x_of_sigma(double sigma) const;
  double sigma_of_x(double x) const;
  double theta_of_x(double x) const;
  double x_of_theta(double theta) const;

  /// rho(x)^{-1/3} / (2 C_L), rho the radius of curvature.
  double mu(double x) const;
  /// Same weight recovered from dx/dsigma of the interpolated chart.
  double mu_chain_rule(double x) const;

  /// The marked point always has x = 0 and sigma = 0.
  static constexpr double marked_x() { return 0.0; }

 private:
  const BoundaryFrame* frame_;
};

struct ClosenessReport {
  int order = 0;
  double c0_deviation = 0.0;              ///< ||mu - pi||_{C^0}
  std::vector<double> derivative_norms;   ///< ||mu^{(m)}||_{C^0}, m = 1..order
  double epsilon = 0.0;                   ///< max of all of the above
};

/// Closeness of the Lazutkin weight to the circle value pi. Derivatives are
/// taken spectrally on a uniform x-grid with the frame's resolution.
ClosenessReport closeness_report(const BoundaryFrame& frame, int order);

}  // namespace rigidity
