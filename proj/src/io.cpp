#include "rigidity/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "rigidity/errors.hpp"

namespace rigidity {

DomainSpec parse_domain_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("domain JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::InvalidArgument, "domain JSON must be an object");
  DomainSpec spec;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "radial_cosine_coeffs")
        spec.radial_cosine_coeffs = value.get<std::vector<double>>();
      else if (key == "smoothness_order")
        spec.smoothness_order = value.get<int>();
      else if (key == "frame_samples")
        spec.frame_samples = value.get<std::size_t>();
      else
        throw Error(ErrorKind::InvalidArgument, "domain JSON: unknown key '" + key + "'");
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::InvalidArgument, "domain JSON: bad value for '" + key + "': " + e.what());
    }
  }
  if (!j.contains("radial_cosine_coeffs"))
    throw Error(ErrorKind::InvalidArgument, "domain JSON: missing 'radial_cosine_coeffs'");
  return spec;
}

DomainSpec load_domain_file(const std::filesystem::path& path) {
  return parse_domain_json(read_file(path));
}

std::string to_json(const DomainSpec& spec) {
  nlohmann::ordered_json j;
  j["radial_cosine_coeffs"] = spec.radial_cosine_coeffs;
  j["smoothness_order"] = spec.smoothness_order;
  j["frame_samples"] = spec.frame_samples;
  return j.dump(2);
}

namespace {

template <class T, class Conv>
std::vector<T> parse_list(const std::string& text, Conv conv) {
  std::string s = text;
  for (char& c : s)
    if (c == ',' || c == ';') c = ' ';
  std::istringstream in(s);
  std::vector<T> out;
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      const T v = conv(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "cannot parse '" + tok + "' as a number");
    }
  }
  return out;
}

}  // namespace

std::vector<double> parse_real_list(const std::string& text) {
  return parse_list<double>(text, [](const std::string& t, std::size_t* u) { return std::stod(t, u); });
}

std::vector<int> parse_int_list(const std::string& text) {
  return parse_list<int>(text, [](const std::string& t, std::size_t* u) { return std::stoi(t, u); });
}

std::string frame_csv(const BoundaryFrame& frame) {
  std::ostringstream out;
  out << "theta,sigma,kappa,x,mu\n";
  char buf[160];
  for (const auto& s : frame.samples()) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", s.theta, s.sigma, s.kappa,
                  s.x, s.mu);
    out << buf;
  }
  return out.str();
}

std::string orbit_csv(const BoundaryFrame& frame, std::span<const PeriodicOrbit> orbits) {
  std::ostringstream out;
  out << "q,k,theta_k,sigma_k,x_k,phi_k,length,poincare_trace,nondegenerate\n";
  char buf[240];
  for (const auto& o : orbits) {
    const auto pd = linearized_poincare(frame, o);
    for (std::size_t k = 0; k < o.t.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%d,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", o.q, k,
                    o.theta[k], o.sigma[k], o.x[k], o.phi[k], o.length, pd.trace,
                    pd.nondegenerate ? 1 : 0);
      out << buf;
    }
  }
  return out.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) throw Error(ErrorKind::InvalidArgument, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorKind::InvalidArgument, "cannot move output into " + path.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace rigidity
