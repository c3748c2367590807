#pragma once

// File formats: domain JSON, frame and orbit CSV dumps, atomic writes.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rigidity/billiards.hpp"
#include "rigidity/geometry.hpp"

namespace rigidity {

struct DomainSpec {
  std::vector<double> radial_cosine_coeffs;
  int smoothness_order = 8;
  std::size_t frame_samples = 512;
};

/// {"radial_cosine_coeffs": [...], "smoothness_order": r, "frame_samples": N}.
/// Unknown keys and ill-typed values throw Error{InvalidArgument}.
DomainSpec parse_domain_json(const std::string& text);
DomainSpec load_domain_file(const std::filesystem::path& path);
std::string to_json(const DomainSpec& spec);

/// Comma- or space-separated list of reals; empty string gives an empty list.
std::vector<double> parse_real_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

/// theta,sigma,kappa,x,mu per frame sample.
std::string frame_csv(const BoundaryFrame& frame);
/// q,k,theta_k,sigma_k,x_k,phi_k,length,poincare_trace,nondegenerate.
std::string orbit_csv(const BoundaryFrame& frame, std::span<const PeriodicOrbit> orbits);

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace rigidity
