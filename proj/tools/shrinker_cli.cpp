#include "shrinker/functional.hpp"
#include "shrinker/geometry.hpp"
#include "shrinker/io.hpp"
#include "shrinker/profiles.hpp"
#include "shrinker/spectra.hpp"
#include "shrinker/variation.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

namespace {

using namespace shrinker;

// Exit-code contract (also shown in --help):
//   0 success, 2 validation / missing input, 3 shooting non-convergence,
//   4 solver or optimizer failure, 5 certificate verdict below 3.
constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kShooting = 3;
constexpr int kSolver = 4;
constexpr int kVerdict = 5;

struct RunConfig {
  std::string kind;
  bool shoot = false;
  std::string bracket = "0.3:2.5";
  int n = 2;
  double h = 1e-3;
  double half_length = 10.0;
  std::vector<double> schedule = default_schedule();
  std::vector<int> k_list = {0, 1};
  double margin = 1e-3;
  std::uint64_t seed = 20240816;
  int theta_points = 128;
  std::string out_dir = ".";
  std::string input;
  std::string witness;
  std::vector<double> s_values = {-0.02, -0.01, 0.01, 0.02};
  int threads = 0;
};

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SHRINKER_INDEX_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Static-partition parallel loop used for the independent per-s entropy
/// optimizations.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  const int workers = std::min<int>(threads, static_cast<int>(count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = static_cast<std::size_t>(w); i < count;
           i += static_cast<std::size_t>(workers))
        body(i);
    });
  for (std::thread& t : pool) t.join();
}

std::string out_path(const RunConfig& config, const std::string& name) {
  std::filesystem::create_directories(config.out_dir);
  return (std::filesystem::path(config.out_dir) / name).string();
}

ProfileCurve load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidProfile("cannot open profile file: " + path);
  Json j = Json::parse(in);
  return profile_from_json(j);
}

int cmd_profile(const RunConfig& config) {
  ProfileCurve curve;
  if (config.shoot) {
    ShootingProblem problem;
    problem.n = config.n;
    problem.output_h = config.h;
    const auto colon = config.bracket.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("--bracket expects lo:hi");
    problem.r_lo = std::stod(config.bracket.substr(0, colon));
    problem.r_hi = std::stod(config.bracket.substr(colon + 1));
    ShootingReport report = shoot_closed_orbit(problem);
    curve = report.curve;
    write_file(out_path(config, "shooting.json"), shooting_report_to_json(report).dump(2) + "\n");
    std::cout << "closed orbit at r* = " << report.r_star << "\n";
  } else {
    ProfileKind kind;
    if (config.kind == "sphere")
      kind = ProfileKind::Sphere;
    else if (config.kind == "cylinder")
      kind = ProfileKind::Cylinder;
    else if (config.kind == "plane")
      kind = ProfileKind::Plane;
    else
      throw std::invalid_argument("--kind must be sphere, cylinder, or plane (or use --shoot)");
    curve = analytic_profile(kind, config.n, config.h, config.half_length);
  }
  write_file(out_path(config, "profile.json"), profile_to_json(curve).dump() + "\n");
  write_file(out_path(config, "profile.csv"), profile_csv(curve));
  write_file(out_path(config, "profile.svg"), profile_svg(curve, config.schedule));
  std::cout << "samples: " << curve.size() << ", residual: " << shrinker_residual(curve) << "\n";
  return kOk;
}

int cmd_spectrum(const RunConfig& config) {
  if (config.k_list.empty()) throw std::invalid_argument("--k list must not be empty");
  ProfileCurve curve = load_profile(config.input);
  std::vector<SpectralSweep> sweeps;
  Json summary = Json::array();
  for (int k : config.k_list) {
    sweeps.push_back(sweep_bottom_spectrum(curve, k, config.schedule));
    summary.push_back(sweep_to_json(sweeps.back()));
    std::cout << "k = " << k << ": mu1 = " << sweeps.back().mu1_limit
              << (k == 0 && sweeps.back().mu1_limit < -1.0 ? "  (< -1)" : "")
              << (k == 1 && sweeps.back().mu1_limit < -0.5 ? "  (< -1/2)" : "") << "\n";
  }
  write_file(out_path(config, "spectrum.json"),
             Json{{"schema", kSchemaVersion}, {"sweeps", summary}}.dump(2) + "\n");
  write_file(out_path(config, "spectrum.csv"), sweep_csv(sweeps));
  ProfileCurve domain = curve.closed ? curve : truncate(curve, config.schedule.back());
  ModeOperator op = assemble_mode_operator(domain, config.k_list.front());
  Spectrum spectrum = lowest_eigenpairs(op, 1);
  write_file(out_path(config, "eigenfunction.svg"),
             eigenfunction_svg(domain, spectrum.eigenfunctions[0]));
  return kOk;
}

int cmd_certify(const RunConfig& config) {
  ProfileCurve curve = load_profile(config.input);
  CertifyOptions options;
  options.schedule = config.schedule;
  options.margin_tol = config.margin;
  options.seed = config.seed;
  options.curve_id = std::filesystem::path(config.input).stem().string();
  IndexCertificate cert = certify_index(curve, options);
  write_file(out_path(config, "certificate.json"), certificate_to_json(cert).dump(2) + "\n");
  write_file(out_path(config, "witness_f0.json"), mode_function_to_json(cert.f0).dump() + "\n");
  write_file(out_path(config, "witness_f1.json"), mode_function_to_json(cert.f1).dump() + "\n");
  write_file(out_path(config, "witness_g1.json"), mode_function_to_json(cert.g1).dump() + "\n");
  std::cout << "verdict: " << cert.verdict << "\n"
            << "residual: " << cert.residual << "\n"
            << "mu1(0) = " << cert.sweep_k0.mu1_limit << "  margin " << cert.margin_k0 << "\n"
            << "mu1(1) = " << cert.sweep_k1.mu1_limit << "  margin " << cert.margin_k1 << "\n";
  if (cert.verdict != 3) {
    std::cout << "failing hypothesis: " << cert.failure << "\n";
    return kVerdict;
  }
  std::cout << "trials passed: " << cert.trials.size() << " (seed " << cert.seed << ")\n";
  return kOk;
}

int cmd_entropy(const RunConfig& config) {
  ProfileCurve curve = load_profile(config.input);
  EntropyReport report = entropy(curve, config.theta_points);
  write_file(out_path(config, "entropy.json"), entropy_report_to_json(report).dump(2) + "\n");
  std::cout << "lambda = " << report.lambda << " at (a, rho, t0) = (" << report.argmax.a << ", "
            << report.argmax.rho << ", " << report.argmax.t0 << ")";
  if (report.tail_bound > 0.0) std::cout << " +- " << report.tail_bound;
  std::cout << "\n";
  if (!config.witness.empty()) {
    std::ifstream in(config.witness);
    if (!in) throw InvalidProfile("cannot open witness file: " + config.witness);
    ModeFunction witness = mode_function_from_json(Json::parse(in));
    std::vector<double> lambdas(config.s_values.size());
    parallel_for(config.s_values.size(), resolve_threads(config.threads), [&](std::size_t i) {
      lambdas[i] =
          entropy_along_variation(curve, {witness}, {config.s_values[i]}, config.theta_points)[0];
    });
    write_file(out_path(config, "entropy_variation.csv"),
               entropy_variation_csv(config.s_values, lambdas));
    // compare against the variation path's own s = 0 value when available:
    // it is evaluated through the same quadrature as the other samples,
    // unlike the optimizer's lambda
    double base = report.lambda;
    for (std::size_t i = 0; i < lambdas.size(); ++i)
      if (config.s_values[i] == 0.0) base = lambdas[i];
    for (std::size_t i = 0; i < lambdas.size(); ++i)
      std::cout << "s = " << config.s_values[i] << ": lambda = " << lambdas[i]
                << (lambdas[i] < base ? "  (decrease)" : "") << "\n";
  }
  if (!report.converged) {
    std::cout << "warning: optimizer did not converge; value is best-found\n";
    return kSolver;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Rotationally symmetric self-shrinkers: profiles, stability spectra, index "
      "certificates, and entropy.\n"
      "Exit codes: 0 success, 2 validation/missing input, 3 shooting non-convergence, "
      "4 solver/optimizer failure, 5 certificate verdict below 3."};
  app.require_subcommand(1);
  // long-form help only: --h is the arc-length step flag
  app.set_help_flag("--help", "print help");
  RunConfig config;

  CLI::App* profile = app.add_subcommand("profile", "construct a profile curve");
  profile->set_help_flag("--help", "print help");
  profile->add_option("--kind", config.kind, "sphere | cylinder | plane");
  profile->add_flag("--shoot", config.shoot, "shoot a closed (torus) orbit");
  profile->add_option("--bracket", config.bracket, "shooting bracket lo:hi");
  profile->add_option("--n", config.n, "hypersurface dimension");
  profile->add_option("--h", config.h, "arc-length step");
  profile->add_option("--half-length", config.half_length, "arc half-length of open profiles");

  CLI::App* spectrum = app.add_subcommand("spectrum", "restricted-spectrum sweep");
  spectrum->add_option("--in", config.input, "profile JSON")->required();
  spectrum->add_option("--k", config.k_list, "Fourier mode list")->delimiter(',');
  spectrum->add_option("--schedule", config.schedule, "truncation radii")->delimiter(',');

  CLI::App* certify = app.add_subcommand("certify", "F-index certificate");
  certify->add_option("--in", config.input, "profile JSON")->required();
  certify->add_option("--schedule", config.schedule, "truncation radii")->delimiter(',');
  certify->add_option("--margin", config.margin, "required spectral margin");
  certify->add_option("--seed", config.seed, "trial RNG seed");

  CLI::App* entropy_cmd = app.add_subcommand("entropy", "entropy and decrease along a witness");
  entropy_cmd->add_option("--in", config.input, "profile JSON")->required();
  entropy_cmd->add_option("--witness", config.witness, "witness mode JSON");
  entropy_cmd->add_option("--s-values", config.s_values, "deformation parameters")
      ->delimiter(',');
  entropy_cmd->add_option("--theta-points", config.theta_points, "orbit quadrature points");

  for (CLI::App* sub : {profile, spectrum, certify, entropy_cmd}) {
    sub->set_help_flag("--help", "print help");
    sub->add_option("--out", config.out_dir, "output directory");
    sub->add_option("--threads", config.threads, "worker threads (0 = auto)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kValidation;
  }

  try {
    if (profile->parsed()) return cmd_profile(config);
    if (spectrum->parsed()) return cmd_spectrum(config);
    if (certify->parsed()) return cmd_certify(config);
    return cmd_entropy(config);
  } catch (const NoOrbitFound& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kShooting;
  } catch (const SolverFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolver;
  } catch (const InvalidProfile& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const EmptyDomain& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolver;
  }
}
