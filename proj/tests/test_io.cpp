#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "shrinker/io.hpp"
#include "shrinker/profiles.hpp"

#include <fstream>
#include <sstream>
#include <string>

using namespace shrinker;

namespace {

const ProfileCurve& torus_curve() {
  static const ProfileCurve curve = [] {
    ShootingProblem problem;
    problem.n = 2;
    problem.output_h = 5e-3;
    return shoot_closed_orbit(problem).curve;
  }();
  return curve;
}

}  // namespace

TEST_CASE("profile json round-trips bitwise") {
  const ProfileCurve& torus = torus_curve();
  const std::string text = profile_to_json(torus).dump();
  ProfileCurve back = profile_from_json(Json::parse(text));
  REQUIRE(back.size() == torus.size());
  CHECK(back.n == torus.n);
  CHECK(back.m == torus.m);
  CHECK(back.closed == torus.closed);
  CHECK(back.h == torus.h);  // bitwise
  for (std::size_t i = 0; i < torus.size(); ++i) {
    CHECK(back.points[i].x == torus.points[i].x);
    CHECK(back.points[i].r == torus.points[i].r);
    CHECK(back.points[i].phi == torus.points[i].phi);
  }
  // determinism of the serialized artifact itself
  CHECK(profile_to_json(back).dump() == text);
  CHECK_THROWS(profile_from_json(Json{{"schema", 999}}));
}

TEST_CASE("golden profile json") {
  ProfileCurve sph = analytic_profile(ProfileKind::Sphere, 2, 0.5);
  const std::string text = profile_to_json(sph).dump(2) + "\n";
  std::ifstream golden_file(std::string(GOLDEN_DIR) + "/sphere_coarse_profile.json");
  REQUIRE(golden_file.good());
  std::stringstream golden;
  golden << golden_file.rdbuf();
  CHECK(text == golden.str());
}

TEST_CASE("csv exports") {
  ProfileCurve sph = analytic_profile(ProfileKind::Sphere, 2, 1e-2);
  const std::string csv = profile_csv(sph);
  CHECK(csv.rfind("s,x,r,phi,H,A2\n", 0) == 0);
  std::size_t lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == sph.size() + 1);

  SpectralSweep sweep;
  sweep.k = 1;
  sweep.schedule = {4.0, 6.0};
  sweep.mu1_values = {-0.4, -0.5};
  const std::string table = sweep_csv({sweep});
  CHECK(table == "k,R,mu1\n1,4,-0.40000000000000002\n1,6,-0.5\n");

  ModeOperator op = assemble_mode_operator(sph, 0);
  const std::string debug = operator_debug_csv(op);
  CHECK(debug.rfind("s,r,w,V\n", 0) == 0);

  CHECK(entropy_variation_csv({0.1}, {1.5}) == "s,lambda\n0.10000000000000001,1.5\n");
  CHECK_THROWS(entropy_variation_csv({0.1}, {1.5, 2.0}));
}

TEST_CASE("mode function round-trip") {
  ModeFunction mode{1, Parity::Sin, Vector::LinSpaced(5, -0.3, 0.7)};
  ModeFunction back = mode_function_from_json(Json::parse(mode_function_to_json(mode).dump()));
  CHECK(back.k == 1);
  CHECK(back.parity == Parity::Sin);
  REQUIRE(back.u.size() == mode.u.size());
  for (long i = 0; i < mode.u.size(); ++i) CHECK(back.u[i] == mode.u[i]);
}

TEST_CASE("certificate json carries the audit fields") {
  static const IndexCertificate cert = certify_index(torus_curve());
  REQUIRE(cert.verdict == 3);
  Json j = certificate_to_json(cert);
  CHECK(j["schema"] == kSchemaVersion);
  CHECK(j["verdict"] == 3);
  CHECK(j["seed"] == cert.seed);
  CHECK(j["curve_hash"] == cert.curve_hash);
  CHECK(j["trials"].size() == 67);
  CHECK(j["witnesses"].size() == 3);
  for (const Json& w : j["witnesses"]) CHECK(w["u"].size() <= 512);
  CHECK(j["margin_k0"].get<double>() > 1e-3);
  CHECK(j["margin_k1"].get<double>() > 1e-3);
  CHECK(j["sweep_k0"]["mu1_limit"].get<double>() < -1.0);
  // deterministic re-serialization
  CHECK(certificate_to_json(cert).dump() == j.dump());
}

TEST_CASE("svg plots are well-formed") {
  ProfileCurve sph = analytic_profile(ProfileKind::Sphere, 2, 1e-2);
  const std::string svg = profile_svg(sph, {4.0});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("<path") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);

  ModeOperator op = assemble_mode_operator(sph, 0);
  Spectrum spec = lowest_eigenpairs(op, 1);
  const std::string overlay = eigenfunction_svg(sph, spec.eigenfunctions[0]);
  CHECK(overlay.find("#c03a2b") != std::string::npos);
  CHECK_THROWS(eigenfunction_svg(sph, Vector::Zero(3)));
}

TEST_CASE("entropy report json") {
  EntropyReport report;
  report.lambda = 1.25;
  report.argmax = {0.1, 0.0, 1.05};
  report.tail_bound = 1e-9;
  report.converged = true;
  Json j = entropy_report_to_json(report);
  CHECK(j["lambda"] == 1.25);
  CHECK(j["argmax"]["t0"] == 1.05);
  CHECK(j["converged"] == true);
}
