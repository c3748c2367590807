// rigidity_lab: command-line front end.
//
//   rigidity_lab domain --coeffs "0,0,0.01" --frame 512 dump
//   rigidity_lab orbits --coeffs "0,0,0.01" --q-max 16
//   rigidity_lab invariants --coeffs "0,0,0.01" --K "0,-1,1" --q-max 48
//   rigidity_lab operator certify --gamma 3.5 --epsilon 0
//   rigidity_lab reconstruct --coeffs "0,0,0.01" --data inv.json --K0 0
//   rigidity_lab suite acceptance --grid default
//
// Exit codes: 0 success, 1 input error, 2 certificate failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rigidity/billiards.hpp"
#include "rigidity/errors.hpp"
#include "rigidity/functionals.hpp"
#include "rigidity/geometry.hpp"
#include "rigidity/io.hpp"
#include "rigidity/kernels.hpp"
#include "rigidity/operators.hpp"
#include "rigidity/reconstruction.hpp"
#include "rigidity/traces.hpp"

namespace fs = std::filesystem;
using namespace rigidity;
using ojson = nlohmann::ordered_json;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitCertificate = 2;

struct CertificateFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string domain_file;
  std::optional<std::string> coeffs;
  std::size_t frame = 0;  // 0: from domain file or 512
  int smoothness = 8;
  int q_max = 16;
  std::string q_ladder = "8,16,32,64";
  double gamma = 3.5;
  int jmax = 48;
  int neumann_order = 40;
  double tol = 1e-8;
  double C = kDefaultRemainderConstant;
  int threads = 0;
  std::string out;
  std::string format = "csv";
};

DomainSpec resolve_domain(const Common& c) {
  DomainSpec spec;
  if (!c.domain_file.empty()) {
    if (c.coeffs) throw Error(ErrorKind::InvalidArgument, "use either --domain or --coeffs, not both");
    spec = load_domain_file(c.domain_file);
  } else {
    spec.radial_cosine_coeffs = parse_real_list(c.coeffs.value_or(""));
    spec.smoothness_order = c.smoothness;
  }
  if (c.frame != 0) spec.frame_samples = c.frame;
  return spec;
}

DomainProfile profile_of(const DomainSpec& spec) {
  return build_profile(spec.radial_cosine_coeffs, spec.smoothness_order);
}

ojson meta(const Common& c, const DomainSpec* spec, const std::string& command) {
  ojson m;
  m["command"] = command;
  if (spec) {
    m["radial_cosine_coeffs"] = spec->radial_cosine_coeffs;
    m["smoothness_order"] = spec->smoothness_order;
    m["frame_samples"] = spec->frame_samples;
  }
  m["q_max"] = c.q_max;
  m["q_ladder"] = parse_int_list(c.q_ladder);
  m["gamma"] = c.gamma;
  m["jmax"] = c.jmax;
  m["neumann_order"] = c.neumann_order;
  m["tol"] = c.tol;
  m["C"] = c.C;
  return m;
}

// Collects outputs and writes them only after the command succeeded.
struct Outputs {
  std::string dir;
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
  std::string stdout_text;

  void add(const std::string& name, const std::string& contents) { files.emplace_back(name, contents); }
  void flush() const {
    if (dir.empty()) {
      std::cout << stdout_text;
      return;
    }
    fs::create_directories(dir);
    for (const auto& [name, contents] : files) write_file_atomic(fs::path(dir) / name, contents);
    std::cout << stdout_text;
  }
};

// --- commands -----------------------------------------------------------------

void cmd_domain(const Common& c, const std::string& action, Outputs& out) {
  const auto spec = resolve_domain(c);
  const auto frame = build_frame(profile_of(spec), spec.frame_samples);
  if (action == "dump") {
    const auto csv = frame_csv(frame);
    out.add("frame.csv", csv);
    out.add("domain.json", to_json(spec));
    if (out.dir.empty()) out.stdout_text = csv;
  } else if (action == "check") {
    const auto rep = closeness_report(frame, 0);
    ojson j;
    j["meta"] = meta(c, &spec, "domain check");
    j["perimeter"] = frame.perimeter();
    j["lazutkin_constant"] = frame.lazutkin_constant();
    j["mu_marked"] = frame.mu_at(0.0);
    j["epsilon"] = rep.epsilon;
    j["even_harmonics_only"] = frame.profile().even_harmonics_only(1e-14);
    out.add("domain_check.json", j.dump(2));
    out.stdout_text = j.dump(2) + "\n";
  } else {
    throw Error(ErrorKind::InvalidArgument, "domain action must be 'dump' or 'check'");
  }
}

void cmd_orbits(const Common& c, Outputs& out) {
  if (c.q_max < 2) throw Error(ErrorKind::InvalidArgument, "--q-max must be >= 2");
  const auto spec = resolve_domain(c);
  const auto frame = build_frame(profile_of(spec), spec.frame_samples);
  const auto orbits = marked_orbits_range(frame, 2, c.q_max);
  const auto gen = genericity_report(frame, orbits);
  const auto csv = orbit_csv(frame, orbits);
  ojson j;
  j["meta"] = meta(c, &spec, "orbits");
  j["min_length_gap"] = gen.min_length_gap;
  j["closest_pair"] = {gen.closest_pair[0], gen.closest_pair[1]};
  j["all_lengths_distinct"] = gen.all_lengths_distinct;
  j["all_nondegenerate"] = gen.all_nondegenerate;
  j["note"] = gen.note;
  const auto ladder = parse_int_list(c.q_ladder);
  if (ladder.size() >= 3) {
    const auto lad = marked_orbits(frame, ladder);
    const auto fit = fit_alpha_beta(frame, lad);
    j["alpha_residual_slope"] = fit.alpha_residual_slope;
    j["beta_residual_slope"] = fit.beta_residual_slope;
    j["alpha_parity_error"] = fit.alpha_parity_error;
    j["beta_parity_error"] = fit.beta_parity_error;
  }
  out.add("orbits.csv", csv);
  out.add("orbits_summary.json", j.dump(2));
  out.stdout_text = out.dir.empty() ? (c.format == "json" ? j.dump(2) + "\n" : csv) : j.dump(2) + "\n";
}

void cmd_invariants(const Common& c, const std::string& K_text, Outputs& out) {
  const auto spec = resolve_domain(c);
  const auto frame = build_frame(profile_of(spec), spec.frame_samples);
  const CosineSeries K(parse_real_list(K_text));
  if (static_cast<std::size_t>(K.order()) > frame.size() / 4)
    throw Error(ErrorKind::InvalidArgument, "K has more modes than N/4");
  if (c.q_max < 2) throw Error(ErrorKind::InvalidArgument, "--q-max must be >= 2");
  const auto orbits = marked_orbits_range(frame, 2, c.q_max);
  const auto heat = heat_defect(frame, K);
  const auto inv = robin_data(frame, K, orbits, heat.H0, heat.H1);
  const auto traces = trace_data(frame, K, orbits, 2);
  out.add("invariants.json", to_json(inv));
  out.add("traces.json", to_json(traces));
  out.add("run.json", meta(c, &spec, "invariants").dump(2));
  out.stdout_text = to_json(inv) + "\n";
}

void cmd_operator(const Common& c, const std::string& action, std::optional<double> epsilon,
                  Outputs& out) {
  GammaSpaceParams params{c.gamma, c.jmax, c.q_max};
  params.validate();
  const bool have_domain = !c.domain_file.empty() || c.coeffs.has_value();
  if (action == "certify" && !have_domain) {
    if (!epsilon) throw Error(ErrorKind::InvalidArgument, "certify without a domain needs --epsilon");
    const auto cert = contraction_certificate(c.gamma, *epsilon, c.C);
    out.add("certificate.json", to_json(cert));
    char buf[160];
    std::snprintf(buf, sizeof buf, "analytic bound %.6f %s\n", cert.analytic_bound,
                  cert.pass ? "PASS" : "FAIL");
    out.stdout_text = to_json(cert) + "\n" + buf;
    if (!cert.pass) throw CertificateFailure("analytic bound >= 1");
    return;
  }
  if (action != "certify" && action != "assemble")
    throw Error(ErrorKind::InvalidArgument, "operator action must be 'assemble' or 'certify'");
  if (!have_domain) throw Error(ErrorKind::InvalidArgument, "operator assemble needs a domain");
  const auto spec = resolve_domain(c);
  const auto ctx = prepare_domain(profile_of(spec), spec.frame_samples, c.q_max,
                                  parse_int_list(c.q_ladder));
  const auto setup = build_operator(ctx.frame, ctx.orbits, ctx.fit, params);
  const double eps = epsilon.value_or(ctx.epsilon);
  const auto cert = contraction_certificate(setup, eps, c.C);
  out.add("T.csv", matrix_csv(setup.M));
  out.add("T_star_R.csv", matrix_csv(setup.t_star_r));
  out.add("certificate.json", to_json(cert));
  out.add("run.json", meta(c, &spec, "operator " + action).dump(2));
  char buf[200];
  std::snprintf(buf, sizeof buf, "analytic bound %.6f  numeric ||T*R - Id|| %.6f  %s\n",
                cert.analytic_bound, cert.numeric_norm, cert.pass ? "PASS" : "FAIL");
  out.stdout_text = (out.dir.empty() && action == "assemble" ? matrix_csv(setup.M) : to_json(cert) + "\n") + buf;
  if (action == "certify" && !cert.pass) throw CertificateFailure("certificate failed");
}

void cmd_reconstruct(const Common& c, const std::string& data_file, const std::string& K_text,
                     std::optional<double> K0, bool extrapolate, bool allow_uncertified,
                     Outputs& out) {
  const auto spec = resolve_domain(c);
  InvariantVector data;
  std::optional<CosineSeries> truth;
  if (!data_file.empty()) data = invariant_vector_from_json(read_file(data_file));
  const int q_max = std::max(c.jmax, data_file.empty() ? c.q_max : data.q_max);
  const auto ctx = prepare_domain(profile_of(spec), spec.frame_samples, q_max,
                                  parse_int_list(c.q_ladder));
  if (data_file.empty()) {
    if (K_text.empty()) throw Error(ErrorKind::InvalidArgument, "reconstruct needs --data or --K");
    truth = CosineSeries(parse_real_list(K_text));
    const auto heat = heat_defect(ctx.frame, *truth);
    data = robin_data(ctx.frame, *truth, ctx.orbits, heat.H0, heat.H1);
  }
  RecoveryOptions ro;
  ro.gamma = c.gamma;
  ro.J = c.jmax;
  ro.neumann_order = c.neumann_order;
  ro.C = c.C;
  ro.residual_tol = c.tol;
  ro.extrapolate_l0 = extrapolate;
  ro.allow_uncertified = allow_uncertified;
  const double k0 = K0.value_or(data.d[1]);
  RecoveryResult rec;
  try {
    rec = recover_robin(data, ctx, k0, ro);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NotContractive) throw CertificateFailure(e.what());
    throw;
  }
  ojson j;
  j["meta"] = meta(c, &spec, "reconstruct");
  j["K0"] = k0;
  j["K_hat"] = rec.K.coeffs;
  j["neumann_terms"] = rec.neumann.terms;
  j["neumann_update_norms"] = rec.neumann.update_norms;
  j["lsq_agreement"] = rec.lsq_agreement;
  j["system_residual"] = rec.system_residual;
  j["marked_residual"] = rec.marked_residual;
  j["consistency_residual"] = rec.consistency_residual;
  j["l0_used"] = rec.l0_used;
  j["l0_extrapolation_error"] = rec.l0_extrapolation_error;
  j["data_consistent"] = rec.data_consistent;
  j["certificate"] = ojson::parse(to_json(rec.certificate));
  if (truth) j["sup_error"] = sup_distance(ctx.frame, rec.K, *truth);
  out.add("reconstruction.json", j.dump(2));
  out.stdout_text = j.dump(2) + "\n";
}

void cmd_suite(const Common& c, const std::string& grid, int functions, std::uint64_t seed,
               Outputs& out) {
  SuiteOptions so;
  if (grid == "default") {
  } else if (grid == "empty") {
    so.a2_values.clear();
  } else {
    so.a2_values = parse_real_list(grid);
  }
  so.functions_per_domain = functions;
  so.seed = seed;
  so.samples = c.frame ? c.frame : 512;
  so.recovery.gamma = c.gamma;
  so.recovery.J = c.jmax;
  so.recovery.neumann_order = c.neumann_order;
  so.recovery.C = c.C;
  const auto s = rigidity_suite(so);
  std::string table =
      "a2        epsilon     analytic   numeric    injectivity  max_err      max_lsq_agree\n";
  char buf[200];
  bool certified = true;
  for (const auto& d : s.domains) {
    std::snprintf(buf, sizeof buf, "%-9.4g %-11.4e %-10.6f %-10.6f %-12.3e %-12.3e %-12.3e\n", d.a2,
                  d.epsilon, d.certificate.analytic_bound, d.certificate.numeric_norm, d.injectivity,
                  d.max_recovery_error, d.max_lsq_agreement);
    table += buf;
    certified = certified && d.certificate.numeric_pass;
  }
  out.add("suite.json", suite_json(s));
  out.add("suite.csv", suite_csv(s));
  out.add("run.json", meta(c, nullptr, "suite").dump(2));
  out.stdout_text = table;
  if (!certified) throw CertificateFailure("a grid domain failed the numeric certificate");
}

int apply_threads(int flag) {
  int t = flag;
  if (t == 0) {
    if (const char* env = std::getenv("RIGIDITY_LAB_THREADS")) {
      try {
        t = std::stoi(env);
      } catch (const std::exception&) {
        throw Error(ErrorKind::InvalidArgument, "RIGIDITY_LAB_THREADS must be an integer");
      }
    }
  }
  if (t < 0) throw Error(ErrorKind::InvalidArgument, "thread count must be >= 0");
  set_thread_count(t);
  return t;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--domain", c.domain_file, "domain JSON file")->check(CLI::ExistingFile);
  app->add_option("--coeffs", c.coeffs, "radial cosine coefficients a_0,a_1,... (r = 1 + sum a_n cos n theta)");
  app->add_option("--frame", c.frame, "frame samples N (even, >= 256)");
  app->add_option("--smoothness", c.smoothness, "smoothness order r (>= 8)");
  app->add_option("--q-max", c.q_max, "largest orbit period");
  app->add_option("--q-ladder", c.q_ladder, "q values for the asymptotic fit");
  app->add_option("--gamma", c.gamma, "weight exponent in (3, 4)");
  app->add_option("--jmax", c.jmax, "cosine truncation J");
  app->add_option("--neumann-order", c.neumann_order, "Neumann series terms");
  app->add_option("--tol", c.tol, "residual tolerance");
  app->add_option("--C", c.C, "remainder constant in the analytic bound");
  app->add_option("--threads", c.threads, "worker threads (0: RIGIDITY_LAB_THREADS or runtime default)");
  app->add_option("--out", c.out, "output directory");
  app->add_option("--format", c.format, "stdout format")->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robin spectral rigidity numerical laboratory"};
  app.require_subcommand(1);
  Common c;

  std::string domain_action = "dump";
  auto* dom = app.add_subcommand("domain", "boundary frame and Lazutkin chart");
  add_common(dom, c);
  dom->add_option("action", domain_action, "dump | check");

  auto* orb = app.add_subcommand("orbits", "marked symmetric maximal orbits");
  add_common(orb, c);

  std::string K_text;
  auto* inv = app.add_subcommand("invariants", "forward synthesis of orbit and heat data");
  add_common(inv, c);
  inv->add_option("--K", K_text, "Robin cosine coefficients K_0,K_1,...")->required();

  std::string op_action = "certify";
  std::optional<double> epsilon;
  auto* op = app.add_subcommand("operator", "matrices and contraction certificate");
  add_common(op, c);
  op->add_option("action", op_action, "assemble | certify");
  op->add_option("--epsilon", epsilon, "closeness epsilon (default: measured)");

  std::string data_file;
  std::optional<double> K0;
  bool extrapolate = false, allow_uncertified = false;
  auto* rec = app.add_subcommand("reconstruct", "recover K from orbit data");
  add_common(rec, c);
  rec->add_option("--data", data_file, "invariant vector JSON")->check(CLI::ExistingFile);
  rec->add_option("--K", K_text, "synthesize data from these coefficients instead");
  rec->add_option("--K0", K0, "marked-point value K(0) (default: d_1 of the data)");
  rec->add_flag("--extrapolate-l0", extrapolate, "estimate d_0 from the large-q rows");
  rec->add_flag("--allow-uncertified", allow_uncertified, "invert without a passing certificate");

  std::string suite_action = "acceptance", grid = "default";
  int functions = 20;
  std::uint64_t seed = 20240601;
  auto* suite = app.add_subcommand("suite", "round-trip harness");
  add_common(suite, c);
  suite->add_option("action", suite_action, "acceptance");
  suite->add_option("--grid", grid, "'default', 'empty' or a list of a_2 values");
  suite->add_option("--functions", functions, "random K per domain");
  suite->add_option("--seed", seed, "generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitInput;
  }

  Outputs out;
  out.dir = c.out;
  try {
    apply_threads(c.threads);
    if (*dom) cmd_domain(c, domain_action, out);
    else if (*orb) cmd_orbits(c, out);
    else if (*inv) cmd_invariants(c, K_text, out);
    else if (*op) cmd_operator(c, op_action, epsilon, out);
    else if (*rec) cmd_reconstruct(c, data_file, K_text, K0, extrapolate, allow_uncertified, out);
    else if (*suite) {
      if (suite_action != "acceptance")
        throw Error(ErrorKind::InvalidArgument, "suite action must be 'acceptance'");
      cmd_suite(c, grid, functions, seed, out);
    }
    out.flush();
  } catch (const CertificateFailure& e) {
    out.flush();
    std::cerr << "certificate failure: " << e.what() << '\n';
    return kExitCertificate;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return 0;
}
