#include "rigidity/reconstruction.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "rigidity/errors.hpp"

namespace rigidity {
namespace {

constexpr int kDefaultLadder[] = {8, 16, 32, 64};

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

const PeriodicOrbit& orbit_for(const DomainContext& d, int q) {
  if (q < 2 || q - 2 >= static_cast<int>(d.orbits.size()))
    throw Error(ErrorKind::InvalidArgument, "no orbit for q = " + std::to_string(q));
  return d.orbits[static_cast<std::size_t>(q - 2)];
}

// max over rows 0..q_max of |T(K / mu)|.
double operator_image_sup(const DomainContext& d, const CosineSeries& K) {
  double m = std::abs(d.frame.integrate_dx([&](const FrameSample& s) { return K(s.x) / s.mu; }));
  m = std::max(m, std::abs(K.at_marked() / d.frame.mu_at(0.0)));
  for (const auto& o : d.orbits) {
    const double q2 = static_cast<double>(o.q) * o.q;
    double acc = 0.0;
    for (std::size_t k = 0; k < o.x.size(); ++k) acc += K(o.x[k]) / std::sin(o.phi[k]);
    m = std::max(m, std::abs(acc / q2));
  }
  return m;
}

}  // namespace

DomainContext prepare_domain(const DomainProfile& profile, std::size_t samples, int q_max,
                             std::span<const int> ladder, Exec exec) {
  if (q_max < 2) throw Error(ErrorKind::InvalidArgument, "q_max must be >= 2");
  DomainContext d{build_frame(profile, samples, exec), {}, {}, {}, 0.0};
  d.orbits = marked_orbits_range(d.frame, 2, q_max, exec);
  std::vector<int> missing;
  for (int q : ladder) {
    if (q <= q_max && q >= 2)
      d.ladder.push_back(d.orbits[static_cast<std::size_t>(q - 2)]);
    else
      missing.push_back(q);
  }
  for (auto& o : marked_orbits(d.frame, missing, exec)) d.ladder.push_back(std::move(o));
  d.fit = fit_alpha_beta(d.frame, d.ladder);
  d.epsilon = closeness_report(d.frame, 0).epsilon;
  return d;
}

DomainContext prepare_domain(const DomainProfile& profile, std::size_t samples, int q_max,
                             Exec exec) {
  return prepare_domain(profile, samples, q_max, kDefaultLadder, exec);
}

std::pair<double, double> extrapolate_l0(const InvariantVector& data, int points) {
  if (points < 4 || data.q_max - points + 1 < 2)
    throw Error(ErrorKind::InsufficientLadder, "need at least four rows for L_0 extrapolation");
  auto fit = [&](int n, int terms) {
    Eigen::MatrixXd A(n, terms);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
      const int q = data.q_max - i;
      const double h = 1.0 / (double(q) * q);
      for (int t = 0; t < terms; ++t) A(i, t) = std::pow(h, t);
      b(i) = data.d[static_cast<std::size_t>(q)] * h;
    }
    return Eigen::VectorXd(A.colPivHouseholderQr().solve(b))(0);
  };
  const double v3 = fit(points, 3);
  const double v2 = fit(points - 1, 2);
  return {v3, std::abs(v3 - v2)};
}

RecoveryResult recover_robin(const InvariantVector& data, const DomainContext& domain, double K0,
                             const RecoveryOptions& options) {
  const int J = options.J;
  GammaSpaceParams params{options.gamma, J, J};
  params.validate();
  if (data.q_max < J)
    throw Error(ErrorKind::InvalidArgument, "data must cover q = 0..J");
  if (static_cast<int>(domain.orbits.size()) + 1 < data.q_max)
    throw Error(ErrorKind::InvalidArgument, "domain orbits do not cover the data rows");
  if (!std::isfinite(K0)) throw Error(ErrorKind::InvalidArgument, "non-finite K(0)");

  RecoveryResult res;
  const auto setup = build_operator(domain.frame, domain.orbits, domain.fit, params);
  res.certificate = contraction_certificate(setup, domain.epsilon, options.C);
  if (!res.certificate.numeric_pass && !options.allow_uncertified)
    throw Error(ErrorKind::NotContractive,
                "||T_{*,R} - Id||_gamma = " + std::to_string(res.certificate.numeric_norm) +
                    " >= 1");

  const double mu0 = domain.frame.mu_at(0.0);
  res.l0_used = data.d[0];
  if (options.extrapolate_l0) {
    const auto [v, err] = extrapolate_l0(data);
    res.l0_extrapolation_error = std::max(err, std::abs(v - data.d[0]));
    res.l0_used = v;
    if (res.l0_extrapolation_error > options.l0_tol) res.data_consistent = false;
  }

  // v_0 from the L_0 row; then rows and columns 1..J.
  const double v0 = res.l0_used;
  Eigen::VectorXd y(J), b = Eigen::VectorXd::Zero(J), lss(J);
  y(0) = K0 / mu0 - setup.M.at(1, 0) * v0;
  for (int q = 2; q <= J; ++q) {
    y(q - 1) = data.d[static_cast<std::size_t>(q)] / (double(q) * q) - setup.M.at(q, 0) * v0;
    b(q - 1) = 1.0 / (double(q) * q);
  }
  for (int j = 1; j <= J; ++j) lss(j - 1) = setup.l_star_star[static_cast<std::size_t>(j)];

  // M' = T_{*,R} + b_* L**^T, inverted by Sherman-Morrison around Neumann solves.
  res.neumann = neumann_invert(setup.t_star_r, y, options.neumann_order, options.gamma,
                               options.neumann_tol);
  res.neumann_rank_one = neumann_invert(setup.t_star_r, b, options.neumann_order, options.gamma,
                                        options.neumann_tol);
  const double denom = 1.0 + lss.dot(res.neumann_rank_one.solution);
  if (std::abs(denom) < 1e-12)
    throw Error(ErrorKind::NotContractive, "rank-one update is singular");
  res.l_star_star_of_v = lss.dot(res.neumann.solution) / denom;
  const Eigen::VectorXd v = res.neumann.solution - res.l_star_star_of_v * res.neumann_rank_one.solution;

  OperatorMatrix Mp;
  Mp.values = setup.M.values.block(1, 1, J, J);
  res.v_least_squares = least_squares_solve(Mp, y);
  res.lsq_agreement = (v - res.v_least_squares).cwiseAbs().maxCoeff();

  std::vector<double> vc(static_cast<std::size_t>(J) + 1);
  vc[0] = v0;
  for (int j = 1; j <= J; ++j) vc[static_cast<std::size_t>(j)] = v(j - 1);
  res.v = CosineSeries(vc);
  res.K = project_cosine(domain.frame, [&](const FrameSample& s) { return s.mu * res.v(s.x); }, J);

  // Residuals against the full matrix.
  const Eigen::VectorXd full_v = Eigen::Map<const Eigen::VectorXd>(vc.data(), J + 1);
  const Eigen::VectorXd image = setup.M.values * full_v;
  res.system_residual = std::abs(image(0) - res.l0_used);
  res.system_residual = std::max(res.system_residual, std::abs(image(1) - K0 / mu0));
  for (int q = 2; q <= J; ++q)
    res.system_residual = std::max(
        res.system_residual, std::abs(image(q) - data.d[static_cast<std::size_t>(q)] / (double(q) * q)));
  res.marked_residual = std::abs(K0 - data.d[1]);
  for (int q = J + 1; q <= data.q_max; ++q) {
    const auto row = script_L_q_row(orbit_for(domain, q), domain.frame, J);
    double acc = 0.0;
    for (int j = 0; j <= J; ++j) acc += row[static_cast<std::size_t>(j)] * vc[static_cast<std::size_t>(j)];
    res.consistency_residual = std::max(
        res.consistency_residual, std::abs(acc - data.d[static_cast<std::size_t>(q)] / (double(q) * q)));
  }
  const double scale = std::max(1.0, std::abs(K0));
  if (res.system_residual > options.residual_tol * scale ||
      res.marked_residual > options.residual_tol * scale ||
      res.consistency_residual > options.residual_tol * scale)
    res.data_consistent = false;
  if (options.strict && !res.data_consistent)
    throw Error(ErrorKind::ResidualTooLarge, "data inconsistent with any K at this truncation");
  return res;
}

// --- triple audit ---------------------------------------------------------------------

const char* to_string(TripleVerdict v) noexcept {
  switch (v) {
    case TripleVerdict::PairIdentical: return "pair_identical";
    case TripleVerdict::DataInconsistent: return "data_inconsistent";
    case TripleVerdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

TripleReport triple_disambiguate(const CosineSeries& K1, const CosineSeries& K2,
                                 const CosineSeries& K3, const DomainContext& domain, double tol) {
  const auto& frame = domain.frame;
  TripleReport r;
  const CosineSeries* K[3] = {&K1, &K2, &K3};
  for (int i = 0; i < 3; ++i) r.marked[i] = K[i]->at_marked();

  // Case (i): two marked values agree.
  static constexpr int kPairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (const auto& p : kPairs) {
    if (std::abs(r.marked[p[0]] - r.marked[p[1]]) <= tol * std::max(1.0, std::abs(r.marked[p[0]]))) {
      r.verdict = TripleVerdict::PairIdentical;
      r.pair[0] = p[0] + 1;
      r.pair[1] = p[1] + 1;
      r.pair_sup_difference = sup_distance(frame, *K[p[0]], *K[p[1]]);
      r.explanation = "K" + std::to_string(p[0] + 1) + "(0) = K" + std::to_string(p[1] + 1) +
                      "(0): equal data forces this pair to coincide";
      return r;
    }
  }

  // Case (ii): all marked values distinct.
  const double g = r.marked[1] - r.marked[2];
  const CosineSeries f = (1.0 / g) * (K2 - K3);
  const CosineSeries K12 = (K1 - K2) - (r.marked[0] - r.marked[1]) * f;
  const CosineSeries K13 = (K1 - K3) - (r.marked[0] - r.marked[2]) * f;
  r.T_K12 = operator_image_sup(domain, K12);
  r.T_K13 = operator_image_sup(domain, K13);
  r.heat_identity_12 = heat_difference_identity(frame, K1, K2);
  r.heat_identity_13 = heat_difference_identity(frame, K1, K3);
  r.A12 = frame.integrate_dsigma(
      [&](const FrameSample& s) { return (s.kappa + 2.0 * (K1(s.x) + K2(s.x))) * f(s.x); });
  r.A13 = frame.integrate_dsigma(
      [&](const FrameSample& s) { return (s.kappa + 2.0 * (K1(s.x) + K3(s.x))) * f(s.x); });
  r.derived_cross = 0.5 * (r.A12 - r.A13);
  r.direct_cross = frame.integrate_dsigma([&](const FrameSample& s) { return (K2(s.x) - K3(s.x)) * f(s.x); });
  r.f_norm_sq = frame.integrate_dsigma([&](const FrameSample& s) { return f(s.x) * f(s.x); });
  r.predicted_cross = g * r.f_norm_sq;

  if (r.f_norm_sq > tol) {
    r.verdict = TripleVerdict::DataInconsistent;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "equal heat data would force int f^2 = 0, but int f^2 = %.6g with f(0) = 1",
                  r.f_norm_sq);
    r.explanation = buf;
  } else {
    r.verdict = TripleVerdict::Inconclusive;
    r.explanation = "int f^2 below tolerance";
  }
  return r;
}

// --- two-symmetry pin ------------------------------------------------------------------

TwoSymmetryReport two_symmetry_pin(const DomainContext& domain, const CosineSeries& K1,
                                   const CosineSeries& K2, double tol) {
  if (!domain.frame.profile().even_harmonics_only(1e-14))
    throw Error(ErrorKind::SymmetryViolation, "domain has odd harmonics");
  for (const auto* K : {&K1, &K2})
    for (std::size_t j = 1; j < K->coeffs.size(); j += 2)
      if (std::abs(K->coeffs[j]) > 1e-14)
        throw Error(ErrorKind::SymmetryViolation, "Robin function has odd cosine modes");

  const auto& o = orbit_for(domain, 2);
  TwoSymmetryReport r;
  r.phi_marked = o.phi[0];
  r.phi_opposite = o.phi[1];
  r.constraint_residual = wave_c0(o, K1) - wave_c0(o, K2);
  // K(0) = K(0') turns the 2-orbit sum into K(0) (1/sin phi_0 + 1/sin phi_1).
  r.deduced_offset = r.constraint_residual / (1.0 / std::sin(o.phi[0]) + 1.0 / std::sin(o.phi[1]));
  r.pinned = std::abs(r.constraint_residual) <= tol;
  for (const auto& orb : domain.orbits)
    r.data_difference = std::max(r.data_difference, std::abs(wave_c0(orb, K1) - wave_c0(orb, K2)));
  r.identical = r.pinned && r.data_difference <= tol;
  return r;
}

// --- suite -------------------------------------------------------------------------------

std::vector<double> random_marked_zero_coeffs(std::uint64_t seed, int modes) {
  if (modes < 1) throw Error(ErrorKind::InvalidArgument, "modes must be >= 1");
  std::uint64_t state = seed;
  std::vector<double> c(static_cast<std::size_t>(modes) + 1, 0.0);
  double sum = 0.0;
  for (int j = 1; j <= modes; ++j) {
    const double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
    c[static_cast<std::size_t>(j)] = 2.0 * u - 1.0;
    sum += c[static_cast<std::size_t>(j)];
  }
  for (int j = 1; j <= modes; ++j) c[static_cast<std::size_t>(j)] -= sum / modes;
  return c;
}

SuiteSummary rigidity_suite(const SuiteOptions& options, Exec exec) {
  SuiteSummary s;
  const int n_dom = static_cast<int>(options.a2_values.size());
  const int per = options.functions_per_domain;
  s.domains.resize(static_cast<std::size_t>(n_dom));
  s.cells.resize(static_cast<std::size_t>(n_dom) * static_cast<std::size_t>(std::max(per, 0)));
  if (n_dom == 0) return s;

  RecoveryOptions ro = options.recovery;
  ro.allow_uncertified = true;  // reported per domain instead
  std::vector<std::optional<DomainContext>> ctx(static_cast<std::size_t>(n_dom));
  for (int d = 0; d < n_dom; ++d) {
    const double a2 = options.a2_values[static_cast<std::size_t>(d)];
    ctx[static_cast<std::size_t>(d)] =
        prepare_domain(build_profile({0.0, 0.0, a2}, 8), options.samples, ro.J, exec);
    auto& dom = s.domains[static_cast<std::size_t>(d)];
    const auto& c = *ctx[static_cast<std::size_t>(d)];
    dom.a2 = a2;
    dom.epsilon = c.epsilon;
    InvariantVector zero;
    zero.q_max = ro.J;
    zero.d.assign(static_cast<std::size_t>(ro.J) + 1, 0.0);
    const auto z = recover_robin(zero, c, 0.0, ro);
    dom.certificate = z.certificate;
    double inj = 0.0;
    for (const auto& smp : c.frame.samples()) inj = std::max(inj, std::abs(z.K(smp.x)));
    dom.injectivity = inj;
  }

  const int total = n_dom * per;
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
  for (int cell = 0; cell < total; ++cell) {
    try {
      const int d = cell / per, k = cell % per;
      const auto& c = *ctx[static_cast<std::size_t>(d)];
      SuiteCell out;
      out.a2 = options.a2_values[static_cast<std::size_t>(d)];
      out.index = k;
      out.K_coeffs = random_marked_zero_coeffs(
          options.seed ^ (0x100000001b3ULL * static_cast<std::uint64_t>(d * 100003 + k + 1)),
          options.K_modes);
      const CosineSeries K(out.K_coeffs);
      const auto heat = heat_defect(c.frame, K);
      const auto data = robin_data(c.frame, K, c.orbits, heat.H0, heat.H1);
      const auto rec = recover_robin(data, c, K.at_marked(), ro);
      out.recovery_error = sup_distance(c.frame, rec.K, K);
      std::vector<double> vl(static_cast<std::size_t>(ro.J) + 1);
      vl[0] = rec.v.coeffs[0];
      for (int j = 1; j <= ro.J; ++j) vl[static_cast<std::size_t>(j)] = rec.v_least_squares(j - 1);
      const CosineSeries vls(vl);
      const auto Kls =
          project_cosine(c.frame, [&](const FrameSample& smp) { return smp.mu * vls(smp.x); }, ro.J);
      out.lsq_error = sup_distance(c.frame, Kls, K);
      out.lsq_agreement = rec.lsq_agreement;
      out.neumann_terms = rec.neumann.terms;
      s.cells[static_cast<std::size_t>(cell)] = std::move(out);
    } catch (...) {
#pragma omp critical(rigidity_suite)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  for (const auto& cell : s.cells)
    for (auto& dom : s.domains)
      if (dom.a2 == cell.a2) {
        dom.max_recovery_error = std::max(dom.max_recovery_error, cell.recovery_error);
        dom.max_lsq_agreement = std::max(dom.max_lsq_agreement, cell.lsq_agreement);
      }
  return s;
}

std::string suite_json(const SuiteSummary& s) {
  nlohmann::ordered_json j;
  auto& doms = j["domains"] = nlohmann::ordered_json::array();
  for (const auto& d : s.domains) {
    doms.push_back({{"a2", d.a2},
                    {"epsilon", d.epsilon},
                    {"analytic_bound", d.certificate.analytic_bound},
                    {"numeric_norm", d.certificate.numeric_norm},
                    {"numeric_pass", d.certificate.numeric_pass},
                    {"analytic_pass", d.certificate.analytic_pass},
                    {"injectivity_sup", d.injectivity},
                    {"max_recovery_error", d.max_recovery_error},
                    {"max_lsq_agreement", d.max_lsq_agreement}});
  }
  auto& cells = j["cells"] = nlohmann::ordered_json::array();
  for (const auto& c : s.cells)
    cells.push_back({{"a2", c.a2},
                     {"index", c.index},
                     {"K", c.K_coeffs},
                     {"recovery_error", c.recovery_error},
                     {"lsq_error", c.lsq_error},
                     {"lsq_agreement", c.lsq_agreement},
                     {"neumann_terms", c.neumann_terms}});
  return j.dump(2);
}

std::string suite_csv(const SuiteSummary& s) {
  std::ostringstream out;
  out << "a2,index,recovery_error,lsq_error,lsq_agreement,neumann_terms,K\n";
  char buf[160];
  for (const auto& c : s.cells) {
    std::snprintf(buf, sizeof buf, "%.17g,%d,%.6e,%.6e,%.6e,%d,", c.a2, c.index, c.recovery_error,
                  c.lsq_error, c.lsq_agreement, c.neumann_terms);
    out << buf;
    for (std::size_t j = 0; j < c.K_coeffs.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%s%.17g", j ? " " : "", c.K_coeffs[j]);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace rigidity
