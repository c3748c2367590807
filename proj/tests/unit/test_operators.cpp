#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rigidity/errors.hpp"
#include "rigidity/operators.hpp"
#include "rigidity/reconstruction.hpp"

using namespace rigidity;
using std::numbers::pi;

TEST(Operators, HurwitzZeta) {
  for (double s : {3.1, 3.5, 3.9}) {
    EXPECT_NEAR(hurwitz_zeta(s, 1.0), std::riemann_zeta(s), 1e-14);
    // zeta(s, a) - zeta(s, a + 1) = a^{-s}
    EXPECT_NEAR(hurwitz_zeta(s, 2.5) - hurwitz_zeta(s, 3.5), std::pow(2.5, -s), 1e-15);
    double direct = 0.0;
    for (int k = 400000; k >= 0; --k) direct += std::pow(k + 7.0, -s);
    EXPECT_NEAR(hurwitz_zeta(s, 7.0), direct, 1e-12);
  }
}

TEST(Operators, AnalyticBound) {
  const double z3 = std::riemann_zeta(3.0);
  EXPECT_NEAR(analytic_bound(0.0, 16.25), z3 - 1 + std::pow(pi, 3) / 48 * z3, 1e-14);
  EXPECT_LT(analytic_bound(0.0, 16.25), 0.979);
  EXPECT_GT(analytic_bound(0.01, 16.25), analytic_bound(0.001, 16.25));
  const auto c = contraction_certificate(3.5, 0.0, 16.25);
  EXPECT_TRUE(c.pass);
  EXPECT_FALSE(c.has_numeric);
  EXPECT_NE(to_json(c).find("\"numeric_norm\": null"), std::string::npos);
}

TEST(Operators, DeltaEntries) {
  const auto D = assemble_delta({3.5, 12, 6});
  for (int q = 1; q <= 6; ++q)
    for (int j = 1; j <= 12; ++j) EXPECT_EQ(D.at(q, j), j % q == 0 ? 1.0 : 0.0);
  EXPECT_EQ(D.at(2, 4), 1.0);
  EXPECT_EQ(D.at(3, 4), 0.0);
}

TEST(Operators, GammaNormDelta) {
  for (double g : {3.1, 3.5, 3.9}) {
    const GammaSpaceParams p{g, 48, 16};
    const std::vector<double> ones(16, 1.0);
    const auto n = gamma_norm(minus_identity(assemble_delta(p)), g, ones);
    EXPECT_NEAR(n.tail_completed, std::riemann_zeta(g) - 1, 1e-12);
    EXPECT_LT(n.truncated, n.tail_completed);
  }
  const auto I = assemble_identity({3.5, 8, 8});
  EXPECT_EQ(gamma_norm(minus_identity(I), 3.5).tail_completed, 0.0);
}

TEST(Operators, ParamValidation) {
  EXPECT_THROW((GammaSpaceParams{3.0, 48, 16}).validate(), Error);
  EXPECT_THROW((GammaSpaceParams{4.0, 48, 16}).validate(), Error);
  EXPECT_THROW((GammaSpaceParams{3.5, 8, 16}).validate(), Error);
  EXPECT_NO_THROW((GammaSpaceParams{3.5, 48, 16}).validate());
}

TEST(Operators, CircleSplitIsExact) {
  const auto ctx = prepare_domain(build_profile({}, 8), 512, 16);
  const auto setup = build_operator(ctx.frame, ctx.orbits, ctx.fit, {3.5, 48, 16});
  EXPECT_LT(gamma_norm(setup.remainder, 3.5).tail_completed, 1e-9);
  // c_q = 1 + sigma_0(q) on the circle, sigma_0(q) = (pi/q)/sin(pi/q) - 1
  for (int q = 2; q <= 16; ++q)
    EXPECT_NEAR(setup.divisor_coeff[static_cast<std::size_t>(q - 1)], (pi / q) / std::sin(pi / q), 1e-8);
  EXPECT_NEAR(setup.l_star_star[0], pi * pi / 6, 1e-9);
}

TEST(Operators, SerialParallelAssemblyBitwise) {
  const auto ctx = prepare_domain(build_profile({0.0, 0.0, 0.01}, 8), 512, 16);
  const auto a = assemble_T(ctx.frame, ctx.orbits, 16, 48, Exec::serial);
  const auto b = assemble_T(ctx.frame, ctx.orbits, 16, 48, Exec::parallel);
  EXPECT_TRUE(a.values == b.values);
  EXPECT_EQ(gamma_norm(a, 3.5, {}, Exec::serial).truncated, gamma_norm(a, 3.5, {}, Exec::parallel).truncated);
}

TEST(Operators, NumericCertificate) {
  const auto ctx = prepare_domain(build_profile({0.0, 0.0, 0.01}, 8), 512, 16);
  const auto setup = build_operator(ctx.frame, ctx.orbits, ctx.fit, {3.5, 48, 16});
  const auto c = contraction_certificate(setup, ctx.epsilon, kDefaultRemainderConstant);
  EXPECT_LT(c.numeric_norm, 1.0);
  EXPECT_TRUE(c.numeric_pass);
  // triangle inequality over the split
  EXPECT_LE(c.numeric_norm, c.delta_minus_id + c.delta_prime + c.remainder + 1e-12);
  EXPECT_NEAR(c.delta_minus_id, std::riemann_zeta(3.5) - 1, 1e-12);
}

TEST(Operators, RemainderDecay) {
  const auto ctx = prepare_domain(build_profile({0.0, 0.0, 0.01}, 8), 512, 32);
  const auto setup = build_operator(ctx.frame, ctx.orbits, ctx.fit, {3.5, 48, 32});
  const auto rep = decompose_T(setup, CosineSeries({0.0, 0.5, -0.3, 0.1}));
  EXPECT_LT(rep.slope, -3.5);
}

TEST(Operators, NeumannMatchesDenseSolve) {
  OperatorMatrix T;
  T.values = Eigen::MatrixXd::Identity(10, 10);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      if (i != j) T.values(i, j) = 0.05 * std::pow(static_cast<double>(i + 1) / (j + 1), -3.5) * ((i + j) % 2 ? 1 : -1);
  Eigen::VectorXd rhs = Eigen::VectorXd::LinSpaced(10, 1.0, 0.1);
  const auto n = neumann_invert(T, rhs, 80, 3.5, 1e-17);
  const auto d = least_squares_solve(T, rhs);
  EXPECT_LT((n.solution - d).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT((T.values * d - rhs).norm(), 1e-13);
  for (std::size_t k = 1; k < n.update_norms.size(); ++k) EXPECT_LE(n.update_norms[k], n.update_norms[k - 1]);
}

TEST(Operators, CalibrateConstant) {
  const std::vector<double> r = {0.1, 0.3}, e = {0.01, 0.02};
  EXPECT_NEAR(calibrate_remainder_constant(r, e), 15.0, 1e-12);
}
