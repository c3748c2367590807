#pragma once

// Forward synthesis of the trace invariants of a Robin function: the leading
// wave-trace coefficient at each orbit length, the first two heat-trace
// defect coefficients, and the length spectrum.

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rigidity/billiards.hpp"
#include "rigidity/functionals.hpp"
#include "rigidity/geometry.hpp"

namespace rigidity {

/// C_gamma sum_k K(x_k) / sin(phi_k). Throws Error{SingularAngle}.
double wave_c0(const PeriodicOrbit& orbit, const CosineSeries& K, double C_gamma = 1.0,
               double angle_tol = 1e-12);

struct HeatCoefficients {
  double H0 = 0.0;  ///< (1 / 2pi) int K dsigma
  double H1 = 0.0;  ///< (1 / (8 sqrt(pi))) int (K kappa + 2 K^2) dsigma
};

HeatCoefficients heat_defect(const BoundaryFrame& frame, const CosineSeries& K);

struct LengthEntry {
  double length = 0.0;
  int q = 0;  ///< 0 for a perimeter multiple
  int multiple = 1;
};

struct LengthSpectrum {
  std::vector<LengthEntry> entries;  ///< sorted by length
  double min_gap = 0.0;              ///< smallest gap between consecutive entries
  std::vector<std::pair<std::size_t, std::size_t>> collisions;  ///< index pairs closer than tol
};

LengthSpectrum length_spectrum(const BoundaryFrame& frame, std::span<const PeriodicOrbit> orbits,
                               int m_max, double collision_tol = 1e-12);

struct OrbitTrace {
  int q = 0;
  double length = 0.0;
  double c0_normalized = 0.0;  ///< sum K / sin phi
  double C_gamma = 1.0;
};

struct TraceData {
  std::vector<OrbitTrace> orbits;
  HeatCoefficients heat;
  LengthSpectrum spectrum;
  std::string normalization = "C_gamma=1";
};

TraceData trace_data(const BoundaryFrame& frame, const CosineSeries& K,
                     std::span<const PeriodicOrbit> orbits, int m_max = 1);
std::string to_json(const TraceData& t);

/// int (K1 - K2)(kappa + 2 (K1 + K2)) dsigma; vanishes when H1(K1) = H1(K2).
double heat_difference_identity(const BoundaryFrame& frame, const CosineSeries& K1,
                                const CosineSeries& K2);

/// K2 = K1 + t g with g shifted to zero arclength mean (so still a cosine
/// series) and t chosen so that K1 and K2 share H0 and H1.
/// Throws Error{InvalidArgument} if g is constant.
CosineSeries equal_heat_partner(const BoundaryFrame& frame, const CosineSeries& K1,
                                const CosineSeries& g);

}  // namespace rigidity
