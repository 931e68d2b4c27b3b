#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "shrinker/geometry.hpp"
#include "shrinker/operator.hpp"
#include "shrinker/profiles.hpp"
#include "shrinker/spectra.hpp"
#include "shrinker/variation.hpp"

#include <cmath>
#include <random>

using namespace shrinker;

namespace {

const ProfileCurve& torus_curve() {
  static const ProfileCurve c = [] {
    ShootingProblem prob;
    const ShootingReport rep = shoot_closed_orbit(prob);
    REQUIRE(rep.converged);
    return rep.curve;
  }();
  return c;
}

// finer resampling for the neutrality identities (their error is O(h^2))
const ProfileCurve& fine_torus() {
  static const ProfileCurve c = resample(torus_curve(), 2.5e-4);
  return c;
}

ModeFunction sample_mode(const ProfileCurve& curve, int k, Parity parity,
                         double (*fn)(const ProfilePoint&)) {
  ModeFunction out;
  out.k = k;
  out.parity = parity;
  out.u.resize(static_cast<long>(curve.size()));
  for (std::size_t i = 0; i < curve.size(); ++i) out.u[static_cast<long>(i)] = fn(curve.points[i]);
  return out;
}

ModeFunction h_mode(const ProfileCurve& curve) {
  ModeFunction out;
  out.k = 0;
  out.parity = Parity::Cos;
  out.u.resize(static_cast<long>(curve.size()));
  for (std::size_t i = 0; i < curve.size(); ++i)
    out.u[static_cast<long>(i)] = mean_curvature(curve, i);
  return out;
}

}  // namespace

TEST_CASE("zero variation and pure penalties") {
  const ProfileCurve& torus = torus_curve();
  ModeFunction zero{0, Parity::Cos, Vector::Zero(static_cast<long>(torus.size()))};
  CHECK(second_variation(torus, {zero}, 0.0, {}) == 0.0);
  // with f = 0 the form is a negative quadratic in (h, y)
  CHECK(second_variation(torus, {zero}, 0.7, {0.3, -0.2, 0.1}) < 0.0);
  auto [h, y] = optimize_spacetime(torus, {zero});
  CHECK(h == 0.0);
  CHECK(y.axial == 0.0);
  CHECK(y.rot_cos == 0.0);
  CHECK(y.rot_sin == 0.0);
  CHECK_THROWS_AS(is_unstable(torus, {zero}), std::invalid_argument);
}

TEST_CASE("dilations are neutral after spacetime reparametrization") {
  const ProfileCurve& c = fine_torus();
  const ModeFunction f = h_mode(c);
  auto [h, y] = optimize_spacetime(c, {f});
  CHECK(h == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(y.axial) < 1e-6);
  CHECK(std::abs(y.rot_cos) < 1e-6);
  CHECK(std::abs(y.rot_sin) < 1e-6);
  CHECK(std::abs(second_variation(c, {f}, h, y)) < 1e-6);
}

TEST_CASE("translations are neutral after spacetime reparametrization") {
  const ProfileCurve& c = fine_torus();
  const ModeFunction f =
      sample_mode(c, 1, Parity::Cos, [](const ProfilePoint& p) { return std::cos(p.phi); });
  auto [h, y] = optimize_spacetime(c, {f});
  CHECK(std::abs(h) < 1e-6);
  CHECK(std::abs(y.axial) < 1e-6);
  CHECK(y.rot_cos == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(std::abs(y.rot_sin) < 1e-10);
  CHECK(std::abs(second_variation(c, {f}, h, y)) < 1e-6);
}

TEST_CASE("eigenfunction variations reproduce their eigenvalues") {
  const ProfileCurve& torus = torus_curve();
  ModeOperator op1 = assemble_mode_operator(torus, 1);
  Spectrum s1 = lowest_eigenpairs(op1, 1);
  ModeFunction f{1, Parity::Cos, Vector()};
  // nearest-node transfer of the eigenfunction back onto the samples; the
  // comparison below goes through the same to_nodes path, so it is exact
  f.u.resize(static_cast<long>(torus.size()));
  const long N = static_cast<long>(op1.size());
  for (long i = 0; i < f.u.size(); ++i)
    f.u[i] = s1.eigenfunctions[0][((i - 1) % N + N) % N];
  const double val = second_variation(torus, {f}, 0.0, {});
  ModeOperator opc = assemble_mode_operator(torus, 1);
  const Vector un = opc.to_nodes(f.u);
  const double expected = angular_factor(1, torus.n) * opc.quad(un);
  CHECK(val == doctest::Approx(expected).epsilon(1e-10));
  CHECK(val < -0.5 * angular_factor(1, torus.n) * opc.mass_dot(un, un));
}

TEST_CASE("stability classifications") {
  const ProfileCurve& torus = torus_curve();
  ModeOperator op0 = assemble_mode_operator(torus, 0);
  Spectrum s0 = lowest_eigenpairs(op0, 1);
  CHECK(s0.eigenvalues[0] < -1.0);

  ProfileCurve sph = analytic_profile(ProfileKind::Sphere, 2, 1e-3);
  VariationAssessment dil = is_unstable(sph, {h_mode(sph)});
  CHECK_FALSE(dil.unstable);
  CHECK(std::abs(dil.value) < 1e-7);
  CHECK(dil.h_star == doctest::Approx(1.0).epsilon(1e-8));

  // k = 2 on the sphere is strictly stable
  ModeOperator op2 = assemble_mode_operator(sph, 2);
  Spectrum s2 = lowest_eigenpairs(op2, 1);
  CHECK(s2.eigenvalues[0] == doctest::Approx(0.5).epsilon(1e-3));
  ModeFunction f2{2, Parity::Cos, Vector()};
  f2.u.resize(static_cast<long>(sph.size()));
  for (long i = 0; i < f2.u.size(); ++i) {
    const ProfilePoint& p = sph.points[static_cast<std::size_t>(i)];
    f2.u[i] = p.r * p.r;  // vanishes at both axis endpoints, k=2-admissible
  }
  VariationAssessment a2 = is_unstable(sph, {f2});
  CHECK_FALSE(a2.unstable);
  CHECK(a2.value > 0.0);
}

TEST_CASE("sign change detection") {
  const ProfileCurve& torus = torus_curve();
  Vector er(static_cast<long>(torus.size())), Hs(static_cast<long>(torus.size()));
  for (std::size_t i = 0; i < torus.size(); ++i) {
    er[static_cast<long>(i)] = std::cos(torus.points[i].phi);
    Hs[static_cast<long>(i)] = mean_curvature(torus, i);
  }
  CHECK(sign_change(torus, er));
  CHECK(sign_change(torus, Hs));

  ProfileCurve sph = analytic_profile(ProfileKind::Sphere, 2, 1e-3);
  Vector ones = Vector::Ones(static_cast<long>(sph.size()));
  CHECK_FALSE(sign_change(sph, ones));
  CHECK_FALSE(sign_change(sph, Vector::Zero(static_cast<long>(sph.size()))));
}

TEST_CASE("concavity and scaling equivariance") {
  const ProfileCurve& torus = torus_curve();
  ModeOperator op0 = assemble_mode_operator(torus, 0);
  Spectrum s0 = lowest_eigenpairs(op0, 1);
  ModeFunction f{0, Parity::Cos, Vector()};
  f.u.resize(static_cast<long>(torus.size()));
  const long N = static_cast<long>(op0.size());
  for (long i = 0; i < f.u.size(); ++i) f.u[i] = s0.eigenfunctions[0][((i - 1) % N + N) % N];

  VariationAssessment best = is_unstable(torus, {f});
  CHECK(best.unstable);
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double h = best.h_star + dist(gen);
    const SpacetimeVector y{best.y_star.axial + dist(gen), best.y_star.rot_cos + dist(gen),
                            best.y_star.rot_sin + dist(gen)};
    CHECK(second_variation(torus, {f}, h, y) <= best.value + 1e-12);
  }

  ModeFunction scaled = f;
  scaled.u *= -3.0;
  VariationAssessment vs = is_unstable(torus, {scaled});
  CHECK(vs.unstable);
  CHECK(vs.value == doctest::Approx(9.0 * best.value).epsilon(1e-8));
}

TEST_CASE("pointwise spacetime bound") {
  // [-1/2 f^2 + f y.n - 1/2 (y.n)^2]' <= 0 for every f and y
  const ProfileCurve& torus = torus_curve();
  ModeOperator op0 = assemble_mode_operator(torus, 0);
  ModeOperator op1 = assemble_mode_operator(torus, 1);
  const long N = static_cast<long>(op0.size());
  Vector nu_ax(N), nu_rad(N);
  for (long j = 0; j < N; ++j) {
    nu_ax[j] = -std::sin(op0.phi[j]);
    nu_rad[j] = std::cos(op0.phi[j]);
  }
  const double c1 = angular_factor(1, torus.n);
  std::mt19937 gen(99);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Vector u0(N), u1c(N), u1s(N);
    for (long j = 0; j < N; ++j) {
      u0[j] = dist(gen);
      u1c[j] = dist(gen);
      u1s[j] = dist(gen);
    }
    const SpacetimeVector y{dist(gen), dist(gen), dist(gen)};
    double val = 0.0;
    const Vector d0 = u0 - y.axial * nu_ax;
    const Vector dc = u1c - y.rot_cos * nu_rad;
    const Vector ds = u1s - y.rot_sin * nu_rad;
    val -= 0.5 * op0.mass_dot(d0, d0);
    val -= 0.5 * c1 * op1.mass_dot(dc, dc);
    val -= 0.5 * c1 * op1.mass_dot(ds, ds);
    CHECK(val <= 1e-10);
  }
}

TEST_CASE("index certificate: closed orbit n=2 has F-index at least 3") {
  CertifyOptions options;
  options.curve_id = "closed-orbit-n2";
  IndexCertificate cert = certify_index(torus_curve(), options);
  CHECK(cert.verdict == 3);
  CHECK(cert.failure.empty());
  CHECK(cert.compact_path);
  CHECK(cert.er_sign_change);
  CHECK(cert.h_sign_change);
  CHECK(cert.margin_k0 > options.margin_tol);
  CHECK(cert.margin_k1 > options.margin_tol);
  CHECK(cert.sweep_k0.mu1_limit < -1.0);
  CHECK(cert.sweep_k1.mu1_limit < -0.5);
  CHECK(cert.trials.size() == 67);  // 3 basis + 64 random
  for (const TrialResult& trial : cert.trials) {
    CHECK(trial.unstable);
    CHECK(trial.blocks_nonpositive);
    CHECK(trial.value ==
          doctest::Approx(trial.block_a + trial.block_b + trial.block_c).epsilon(1e-8));
  }
  CHECK(cert.curve_hash == curve_hash(torus_curve()));

  // cross-check one random trial against the public is_unstable pipeline
  const TrialResult& trial = cert.trials[10];
  ModeFunction fa = cert.f0, fb = cert.f1, fc = cert.g1;
  fa.u *= trial.alpha;
  fb.u *= trial.beta;
  fc.u *= trial.gamma;
  VariationAssessment assess = is_unstable(torus_curve(), {fa, fb, fc});
  CHECK(assess.unstable);
  CHECK(assess.value == doctest::Approx(trial.value).epsilon(1e-6));
}

TEST_CASE("index certificate: closed orbit n=3") {
  ShootingProblem prob;
  prob.n = 3;
  const ShootingReport rep = shoot_closed_orbit(prob);
  REQUIRE(rep.converged);
  CertifyOptions options;
  options.curve_id = "closed-orbit-n3";
  IndexCertificate cert = certify_index(rep.curve, options);
  CHECK(cert.verdict == 3);
}

TEST_CASE("index certificate rejects stable profiles") {
  ProfileCurve sph = analytic_profile(ProfileKind::Sphere, 2, 1e-3);
  IndexCertificate cert = certify_index(sph);
  CHECK(cert.verdict == 0);
  CHECK((cert.failure == "er-sign-change" || cert.failure == "h-sign-change"));

  ProfileCurve bad = sph;
  for (ProfilePoint& p : bad.points) p.r *= 1.1;
  CHECK_THROWS_AS(certify_index(bad), InvalidProfile);
}

TEST_CASE("orthogonality report") {
  std::vector<OrthogonalityRow> torus_rows = orthogonality_report(torus_curve(), {});
  REQUIRE(torus_rows.size() == 1);
  for (double v : torus_rows[0].pairings) CHECK(std::abs(v) < 1e-8);

  ProfileCurve sph = analytic_profile(ProfileKind::Sphere, 2, 1e-3);
  std::vector<OrthogonalityRow> sph_rows = orthogonality_report(sph, {});
  REQUIRE(sph_rows.size() == 1);  // both ends on the axis: compact, no truncation
  for (double v : sph_rows[0].pairings) CHECK(std::abs(v) < 1e-8);

  ProfileCurve cyl = analytic_profile(ProfileKind::Cylinder, 2, 1e-3, 14.0);
  std::vector<OrthogonalityRow> cyl_rows = orthogonality_report(cyl, {4.0, 8.0, 12.0});
  REQUIRE(cyl_rows.size() == 3);
  for (const OrthogonalityRow& row : cyl_rows)
    CHECK(std::abs(row.pairings[0]) < 1e-10);  // odd in x: vanishes by parity
}
