#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rigidity/errors.hpp"
#include "rigidity/reconstruction.hpp"

using namespace rigidity;
using std::numbers::pi;

namespace {
const DomainContext& circle_ctx() {
  static const auto c = prepare_domain(build_profile({}, 8), 512, 48);
  return c;
}
const DomainContext& perturbed_ctx() {
  static const auto c = prepare_domain(build_profile({0.0, 0.0, 0.01}, 8), 512, 48);
  return c;
}
InvariantVector synthesize(const DomainContext& c, const CosineSeries& K) {
  const auto h = heat_defect(c.frame, K);
  return robin_data(c.frame, K, c.orbits, h.H0, h.H1);
}
ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no throw";
  return ErrorKind::InvalidArgument;
}
}  // namespace

TEST(Recover, ZeroDataGivesZero) {
  for (const auto* c : {&circle_ctx(), &perturbed_ctx()}) {
    InvariantVector d;
    d.d.assign(49, 0.0);
    d.q_max = 48;
    const auto r = recover_robin(d, *c, 0.0);
    EXPECT_LT(sup_distance(c->frame, r.K, CosineSeries({0.0})), 1e-8);
  }
}

TEST(Recover, CircleRoundTrip) {
  const auto& c = circle_ctx();
  const CosineSeries K({0.0, -1.0, 1.0});
  const auto r = recover_robin(synthesize(c, K), c, 0.0);
  for (int j = 0; j <= r.K.order(); ++j) {
    const double expect = j <= 2 ? K.coeffs[static_cast<std::size_t>(j)] : 0.0;
    EXPECT_NEAR(r.K.coeffs[static_cast<std::size_t>(j)], expect, 1e-6) << j;
  }
  EXPECT_NEAR(r.K.at_marked(), 0.0, 1e-8);
  EXPECT_TRUE(r.data_consistent);
  EXPECT_LT(r.system_residual, 1e-8);
}

TEST(Recover, WrongMarkedValueFlagged) {
  const auto& c = circle_ctx();
  const auto d = synthesize(c, CosineSeries({0.0, -1.0, 1.0}));
  const auto r = recover_robin(d, c, 1.0);
  EXPECT_FALSE(r.data_consistent);
  EXPECT_NEAR(r.marked_residual, 1.0, 1e-12);
  RecoveryOptions strict;
  strict.strict = true;
  EXPECT_EQ(kind_of([&] { recover_robin(d, c, 1.0, strict); }), ErrorKind::ResidualTooLarge);
}

TEST(Recover, PerturbedRoundTripAndLsq) {
  const auto& c = perturbed_ctx();
  const CosineSeries K(random_marked_zero_coeffs(5, 6));
  const auto r = recover_robin(synthesize(c, K), c, K.at_marked());
  EXPECT_LT(sup_distance(c.frame, r.K, K), 1e-5);
  EXPECT_LT(r.lsq_agreement, 1e-6);
  EXPECT_TRUE(r.certificate.numeric_pass);
}

TEST(Recover, Linearity) {
  const auto& c = perturbed_ctx();
  const CosineSeries K(random_marked_zero_coeffs(11, 5)), G({0.3, 0.1, -0.4});
  const auto r1 = recover_robin(synthesize(c, K), c, K.at_marked());
  auto d = synthesize(c, K + G);
  const auto r2 = recover_robin(d, c, (K + G).at_marked());
  EXPECT_LT(sup_distance(c.frame, r2.K - r1.K, G), 1e-5);
}

TEST(Recover, NeumannOrderConvergence) {
  const auto& c = perturbed_ctx();
  const CosineSeries K(random_marked_zero_coeffs(21, 6));
  const auto d = synthesize(c, K);
  double prev = INFINITY;
  for (int order : {2, 5, 10, 20, 40}) {
    RecoveryOptions o;
    o.neumann_order = order;
    o.neumann_tol = 0.0;
    const double err = sup_distance(c.frame, recover_robin(d, c, 0.0, o).K, K);
    EXPECT_LE(err, prev * 1.01 + 1e-12) << order;
    prev = err;
  }
  EXPECT_LT(prev, 1e-5);
}

TEST(Recover, ExtrapolatedL0) {
  const auto& c = perturbed_ctx();
  const CosineSeries K(random_marked_zero_coeffs(3, 4));
  const auto d = synthesize(c, K);
  const auto [v, err] = extrapolate_l0(d);
  EXPECT_NEAR(v, d.d[0], 1e-6);
  EXPECT_GE(err, 0.0);
  RecoveryOptions o;
  o.extrapolate_l0 = true;
  const auto r = recover_robin(d, c, 0.0, o);
  EXPECT_LT(sup_distance(c.frame, r.K, K), 1e-5);
}

TEST(Recover, InputValidation) {
  InvariantVector d;
  d.d.assign(10, 0.0);
  d.q_max = 9;
  EXPECT_THROW(recover_robin(d, perturbed_ctx(), 0.0), Error);
}

TEST(Triple, PairRouting) {
  const auto& c = perturbed_ctx();
  const CosineSeries A({0.0, 1.0, -1.0}), B({0.5, 0.2}), C({-0.2, 0.0, 0.7});
  auto r = triple_disambiguate(A, A, B, c);
  EXPECT_EQ(r.verdict, TripleVerdict::PairIdentical);
  EXPECT_EQ(r.pair[0], 1);
  EXPECT_EQ(r.pair[1], 2);
  EXPECT_EQ(r.pair_sup_difference, 0.0);
  // K2 = K3: degenerate f, routed to case (i)
  r = triple_disambiguate(B, C, C, c);
  EXPECT_EQ(r.verdict, TripleVerdict::PairIdentical);
  EXPECT_EQ(r.pair[0], 2);
  EXPECT_EQ(r.pair[1], 3);
}

TEST(Triple, ContradictionAlgebra) {
  const auto& c = perturbed_ctx();
  const CosineSeries f({0.25, 0.5, 0.25}), B({0.2, -0.2});
  const auto r = triple_disambiguate(B + 1.0 * f, B + 2.0 * f, B + 4.0 * f, c);
  EXPECT_EQ(r.verdict, TripleVerdict::DataInconsistent);
  EXPECT_GT(r.f_norm_sq, 0.0);
  EXPECT_NEAR(r.derived_cross, r.predicted_cross, 1e-12 * std::abs(r.predicted_cross));
  EXPECT_NEAR(r.direct_cross, r.predicted_cross, 1e-12 * std::abs(r.predicted_cross));
  // K12 = K13 = 0 on Eq.-consistent triples
  EXPECT_LT(r.T_K12, 1e-13);
  EXPECT_LT(r.T_K13, 1e-13);
  EXPECT_STREQ(to_string(r.verdict), "data_inconsistent");
}

TEST(TwoSymmetry, ConstantOffsetDetected) {
  const auto& c = circle_ctx();
  const CosineSeries K2({0.1, 0.0, 0.3});
  const double off = 0.25;
  const auto r = two_symmetry_pin(c, K2 + CosineSeries::constant(off), K2);
  EXPECT_FALSE(r.pinned);
  EXPECT_NEAR(r.constraint_residual, 2 * off / std::sin(pi / 2), 1e-12);
  EXPECT_NEAR(r.deduced_offset, off, 1e-12);
  const auto same = two_symmetry_pin(c, K2, K2);
  EXPECT_TRUE(same.pinned);
  EXPECT_TRUE(same.identical);
}

TEST(TwoSymmetry, Violations) {
  const auto odd = prepare_domain(build_profile({0.0, 0.01, 0.01}, 8), 512, 4);
  EXPECT_EQ(kind_of([&] { two_symmetry_pin(odd, CosineSeries({1.0}), CosineSeries({1.0})); }),
            ErrorKind::SymmetryViolation);
  EXPECT_EQ(kind_of([&] { two_symmetry_pin(circle_ctx(), CosineSeries({0.0, 1.0}), CosineSeries({1.0})); }),
            ErrorKind::SymmetryViolation);
}

TEST(Suite, EmptyGrid) {
  SuiteOptions o;
  o.a2_values.clear();
  const auto s = rigidity_suite(o);
  EXPECT_TRUE(s.domains.empty());
  EXPECT_TRUE(s.cells.empty());
}

TEST(Suite, DeterministicAndThreadIndependent) {
  SuiteOptions o;
  o.a2_values = {0.0, 0.01};
  o.functions_per_domain = 4;
  const auto a = suite_json(rigidity_suite(o, Exec::parallel));
  const auto b = suite_json(rigidity_suite(o, Exec::parallel));
  const auto s = suite_json(rigidity_suite(o, Exec::serial));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, s);
  const auto summary = rigidity_suite(o);
  for (const auto& cell : summary.cells) EXPECT_LT(cell.recovery_error, 1e-5);
  EXPECT_NE(suite_csv(summary).find("a2"), std::string::npos);
}

TEST(Suite, RandomCoefficients) {
  const auto c = random_marked_zero_coeffs(42, 6);
  ASSERT_EQ(c.size(), 7u);
  EXPECT_EQ(c[0], 0.0);
  double s = 0.0;
  for (double v : c) s += v;
  EXPECT_NEAR(s, 0.0, 1e-15);
  EXPECT_EQ(c, random_marked_zero_coeffs(42, 6));
  EXPECT_NE(c, random_marked_zero_coeffs(43, 6));
}
