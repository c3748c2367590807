#include "rigidity/traces.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json.hpp"

#include "rigidity/errors.hpp"

namespace rigidity {

double wave_c0(const PeriodicOrbit& orbit, const CosineSeries& K, double C_gamma,
               double angle_tol) {
  double acc = 0.0;
  for (std::size_t k = 0; k < orbit.x.size(); ++k) {
    const double s = std::sin(orbit.phi[k]);
    if (!(s > angle_tol)) throw Error(ErrorKind::SingularAngle, "sin(phi) below tolerance");
    acc += K(orbit.x[k]) / s;
  }
  return C_gamma * acc;
}

HeatCoefficients heat_defect(const BoundaryFrame& frame, const CosineSeries& K) {
  HeatCoefficients h;
  h.H0 = frame.integrate_dsigma([&](const FrameSample& s) { return K(s.x); }) /
         (2.0 * std::numbers::pi);
  h.H1 = frame.integrate_dsigma([&](const FrameSample& s) {
           const double k = K(s.x);
           return k * s.kappa + 2.0 * k * k;
         }) /
         (8.0 * std::sqrt(std::numbers::pi));
  return h;
}

LengthSpectrum length_spectrum(const BoundaryFrame& frame, std::span<const PeriodicOrbit> orbits,
                               int m_max, double collision_tol) {
  if (m_max < 1) throw Error(ErrorKind::InvalidArgument, "m_max must be >= 1");
  LengthSpectrum ls;
  for (int m = 1; m <= m_max; ++m) {
    for (const auto& o : orbits) ls.entries.push_back({m * o.length, o.q, m});
    ls.entries.push_back({m * frame.perimeter(), 0, m});
  }
  std::stable_sort(ls.entries.begin(), ls.entries.end(),
                   [](const auto& a, const auto& b) { return a.length < b.length; });
  ls.min_gap = ls.entries.size() > 1 ? INFINITY : 0.0;
  for (std::size_t i = 1; i < ls.entries.size(); ++i) {
    const double gap = ls.entries[i].length - ls.entries[i - 1].length;
    ls.min_gap = std::min(ls.min_gap, gap);
    if (gap <= collision_tol * std::max(1.0, ls.entries[i].length))
      ls.collisions.emplace_back(i - 1, i);
  }
  return ls;
}

TraceData trace_data(const BoundaryFrame& frame, const CosineSeries& K,
                     std::span<const PeriodicOrbit> orbits, int m_max) {
  TraceData t;
  for (const auto& o : orbits) t.orbits.push_back({o.q, o.length, wave_c0(o, K), 1.0});
  t.heat = heat_defect(frame, K);
  t.spectrum = length_spectrum(frame, orbits, m_max);
  return t;
}

std::string to_json(const TraceData& t) {
  nlohmann::ordered_json j;
  j["normalization"] = t.normalization;
  j["H0"] = t.heat.H0;
  j["H1"] = t.heat.H1;
  auto& orbs = j["orbits"] = nlohmann::ordered_json::array();
  for (const auto& o : t.orbits)
    orbs.push_back({{"q", o.q}, {"length", o.length}, {"c0_normalized", o.c0_normalized},
                    {"C_gamma", o.C_gamma}});
  auto& ls = j["length_spectrum"] = nlohmann::ordered_json::array();
  for (const auto& e : t.spectrum.entries)
    ls.push_back({{"length", e.length}, {"q", e.q}, {"multiple", e.multiple}});
  j["min_gap"] = t.spectrum.min_gap;
  j["collisions"] = t.spectrum.collisions.size();
  return j.dump(2);
}

double heat_difference_identity(const BoundaryFrame& frame, const CosineSeries& K1,
                                const CosineSeries& K2) {
  return frame.integrate_dsigma([&](const FrameSample& s) {
    const double a = K1(s.x), b = K2(s.x);
    return (a - b) * (s.kappa + 2.0 * (a + b));
  });
}

CosineSeries equal_heat_partner(const BoundaryFrame& frame, const CosineSeries& K1,
                                const CosineSeries& g) {
  CosineSeries h = g;
  if (h.coeffs.empty()) h.coeffs.push_back(0.0);
  h.coeffs[0] -= frame.integrate_dsigma([&](const FrameSample& s) { return g(s.x); }) /
                 frame.perimeter();
  const double gg = frame.integrate_dsigma([&](const FrameSample& s) { return h(s.x) * h(s.x); });
  if (!(gg > 1e-300)) throw Error(ErrorKind::InvalidArgument, "perturbation is constant");
  const double lin = frame.integrate_dsigma(
      [&](const FrameSample& s) { return h(s.x) * (s.kappa + 4.0 * K1(s.x)); });
  return K1 + (-lin / (2.0 * gg)) * h;
}

}  // namespace rigidity
