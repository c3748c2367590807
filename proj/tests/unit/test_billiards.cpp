#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <Eigen/LU>

#include "oracles.hpp"
#include "rigidity/billiards.hpp"
#include "rigidity/errors.hpp"

using namespace rigidity;
using std::numbers::pi;

TEST(Billiards, CircleOrbitsAreRegularPolygons) {
  const auto F = build_frame(build_profile({}, 8), 512);
  for (int q = 2; q <= 20; ++q) {
    const auto o = maximal_marked_orbit(F, q);
    EXPECT_NEAR(o.length, 2 * q * std::sin(pi / q), 1e-12) << q;
    EXPECT_TRUE(o.maximal);
    ASSERT_EQ(static_cast<int>(o.phi.size()), q);
    for (int k = 0; k < q; ++k) {
      EXPECT_NEAR(o.phi[k], pi / q, 1e-11);
      EXPECT_NEAR(o.x[k], static_cast<double>(k) / q, 1e-12);
    }
  }
}

TEST(Billiards, OrbitLengthMatchesChords) {
  const auto F = build_frame(build_profile({0.0, 0.0, 0.01}, 8), 512);
  const auto o = maximal_marked_orbit(F, 7);
  double L = 0.0;
  for (int k = 0; k < 7; ++k) L += (F.position(o.t[(k + 1) % 7]) - F.position(o.t[k])).norm();
  EXPECT_NEAR(o.length, L, 1e-13);
  EXPECT_NEAR(orbit_length(F, o.theta), L, 1e-13);
}

TEST(Billiards, ShootingReproducesOrbit) {
  const auto F = build_frame(build_profile({0.0, 0.0, 0.02, 0.0, 0.003}, 8), 512);
  for (int q : {2, 3, 5, 9}) {
    const auto o = maximal_marked_orbit(F, q);
    double t = 0.0, phi = o.phi[0];
    for (int k = 1; k <= q; ++k) {
      std::tie(t, phi) = oracle::bounce(F, t, phi);
      const double tk = k < q ? o.t[k] : 2 * pi;
      EXPECT_NEAR(std::remainder(t - tk, 2 * pi), 0.0, 1e-10) << q << " " << k;
      EXPECT_NEAR(phi, o.phi[k % q], 1e-10);
    }
  }
}

TEST(Billiards, MaximalOverPerturbations) {
  const auto F = build_frame(build_profile({0.0, 0.0, 0.02}, 8), 512);
  const auto o = maximal_marked_orbit(F, 5);
  for (int k = 1; k < 5; ++k) {
    auto th = o.theta;
    th[k] += 1e-4;
    EXPECT_LT(orbit_length(F, th), o.length);
  }
}

TEST(Billiards, PoincareTraceMatchesFiniteDifferences) {
  const auto F = build_frame(build_profile({0.0, 0.0, 0.03}, 8), 512);
  for (int q : {2, 3, 4}) {
    const auto o = maximal_marked_orbit(F, q);
    const auto pd = linearized_poincare(F, o);
    // Jacobian of the q-fold map in (sigma, phi), central differences.
    auto map = [&](double sigma, double phi) {
      double t = F.t_of_sigma(sigma);
      for (int k = 0; k < q; ++k) std::tie(t, phi) = oracle::bounce(F, t, phi);
      double s = F.sigma_at(t) - F.perimeter();
      return std::pair<double, double>{s, phi};
    };
    const double h = 1e-6;
    Eigen::Matrix2d J;
    auto [s1, p1] = map(h, o.phi[0]);
    auto [s2, p2] = map(-h, o.phi[0]);
    J(0, 0) = (s1 - s2) / (2 * h);
    J(1, 0) = (p1 - p2) / (2 * h);
    std::tie(s1, p1) = map(0.0, o.phi[0] + h);
    std::tie(s2, p2) = map(0.0, o.phi[0] - h);
    J(0, 1) = (s1 - s2) / (2 * h);
    J(1, 1) = (p1 - p2) / (2 * h);
    EXPECT_NEAR(pd.trace, J.trace(), 1e-5) << q;
    EXPECT_NEAR(pd.determinant, 1.0, 1e-10);
    EXPECT_NEAR(J.determinant(), 1.0, 1e-5);
    EXPECT_TRUE(pd.nondegenerate);
  }
}

TEST(Billiards, CircleIsDegenerate) {
  const auto F = build_frame(build_profile({}, 8), 512);
  const auto pd = linearized_poincare(F, maximal_marked_orbit(F, 3));
  EXPECT_NEAR(pd.trace, 2.0, 1e-12);
  EXPECT_FALSE(pd.nondegenerate);
}

TEST(Billiards, SerialParallelOrbitsBitwise) {
  const auto F = build_frame(build_profile({0.0, 0.0, 0.01}, 8), 512);
  const auto a = marked_orbits_range(F, 2, 12, Exec::serial);
  const auto b = marked_orbits_range(F, 2, 12, Exec::parallel);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].t, b[i].t);
    EXPECT_EQ(a[i].length, b[i].length);
  }
}

TEST(Billiards, GenericityReport) {
  const auto F = build_frame(build_profile({0.0, 0.0, 0.01}, 8), 512);
  const auto orbits = marked_orbits_range(F, 2, 16);
  const auto g = genericity_report(F, orbits);
  EXPECT_TRUE(g.all_lengths_distinct);
  EXPECT_GT(g.min_length_gap, 0.0);
  // odd-q orbits of a cos(2 theta) perturbation become parabolic to roundoff
  for (std::size_t i = 0; i < g.qs.size(); ++i) {
    EXPECT_EQ(g.nondegenerate[i], std::abs(2.0 - g.traces[i]) > 1e-9) << g.qs[i];
    if (g.qs[i] <= 10) EXPECT_TRUE(g.nondegenerate[i]) << g.qs[i];
  }
  EXPECT_FALSE(g.all_nondegenerate);
}

TEST(Billiards, AlphaBetaFit) {
  const auto F = build_frame(build_profile({0.0, 0.0, 0.01}, 8), 512);
  const std::vector<int> qs = {8, 16, 32, 64};
  const auto fit = fit_alpha_beta(F, marked_orbits(F, qs));
  EXPECT_LT(fit.alpha_parity_error, 1e-4);
  EXPECT_LT(fit.beta_parity_error, 1e-4);
  EXPECT_NEAR(fit.alpha_residual_slope, -4.0, 0.5);
  EXPECT_NEAR(fit.beta_residual_slope, -4.0, 0.5);
  // alpha odd about x = 1/2, beta even
  for (double x : {0.1, 0.27, 0.4}) {
    EXPECT_NEAR(fit.alpha(x), -fit.alpha(1 - x), 1e-12);
    EXPECT_NEAR(fit.beta(x), fit.beta(1 - x), 1e-12);
  }
  const std::vector<int> two = {8, 16};
  try {
    fit_alpha_beta(F, marked_orbits(F, two));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InsufficientLadder);
  }
}

TEST(Billiards, CircleFitIsZero) {
  const auto F = build_frame(build_profile({}, 8), 512);
  const std::vector<int> qs = {8, 16, 32};
  const auto fit = fit_alpha_beta(F, marked_orbits(F, qs));
  for (double x : {0.1, 0.3}) {
    EXPECT_NEAR(fit.alpha(x), 0.0, 1e-8);
    EXPECT_NEAR(fit.beta(x), 0.0, 1e-6);
  }
}

TEST(Billiards, LoglogSlope) {
  const std::vector<int> q = {2, 4, 8};
  const std::vector<double> v = {1.0 / 4, 1.0 / 16, 1.0 / 64};
  EXPECT_NEAR(loglog_slope(q, v), -2.0, 1e-14);
}
