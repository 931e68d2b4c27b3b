// Acceptance harness: one pass/fail line per criterion, nonzero exit when
// any criterion fails.
#include "shrinker/functional.hpp"
#include "shrinker/geometry.hpp"
#include "shrinker/io.hpp"
#include "shrinker/operator.hpp"
#include "shrinker/profiles.hpp"
#include "shrinker/spectra.hpp"
#include "shrinker/variation.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace shrinker;

namespace {

struct Criterion {
  bool ok = true;
  std::ostringstream detail;

  void require(bool condition, const std::string& what) {
    if (!condition) {
      ok = false;
      detail << (detail.str().empty() ? "" : "; ") << what;
    }
  }
};

int failures = 0;

template <typename Body>
void run_criterion(int number, const char* title, Body&& body) {
  Criterion c;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail << "exception: " << e.what();
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!c.ok) ++failures;
  std::printf("criterion %d: %s — %s (%.1fs)%s%s\n", number, c.ok ? "PASS" : "FAIL", title,
              seconds, c.ok ? "" : " — ", c.ok ? "" : c.detail.str().c_str());
  std::fflush(stdout);
}

const ShootingReport& torus_report() {
  static const ShootingReport report = [] {
    ShootingProblem problem;  // default bracket 0.3:2.5, scan-derived
    return shoot_closed_orbit(problem);
  }();
  return report;
}

Vector random_vector(long size, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(size);
  for (long i = 0; i < size; ++i) v[i] = dist(gen);
  return v;
}

// returns -1 when the geometric mode is purely tangential (identically zero
// normal component), e.g. axial translation of a cylinder
double known_mode_residual(const ProfileCurve& curve, KnownMode which) {
  const KnownEigenfunction mode = known_eigenfunction(curve, which);
  if (mode.u.lpNorm<Eigen::Infinity>() < 1e-12) return -1.0;
  const ModeOperator op = assemble_mode_operator(curve, mode.k);
  return residual_check(op, op.to_nodes(mode.u), mode.mu);
}

Eigen::VectorXd dense_eigenvalues(const ModeOperator& op, int count) {
  const long N = static_cast<long>(op.size());
  Matrix S = Matrix::Zero(N, N), M = Matrix::Zero(N, N);
  for (long j = 0; j < N; ++j) {
    S(j, j) = op.stiff_diag[j];
    M(j, j) = op.mass[j];
  }
  for (long j = 0; j + 1 < N; ++j) {
    S(j, j + 1) = op.stiff_off[j];
    S(j + 1, j) = op.stiff_off[j];
  }
  if (op.periodic) {
    S(0, N - 1) = op.stiff_corner;
    S(N - 1, 0) = op.stiff_corner;
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(S, M);
  return solver.eigenvalues().head(count);
}

}  // namespace

int main() {
  run_criterion(1, "analytic-family exactness", [](Criterion& c) {
    for (int n : {2, 3}) {
      c.require(shrinker_residual(analytic_profile(ProfileKind::Sphere, n, 1e-3)) < 1e-10,
                "sphere residual n=" + std::to_string(n));
      c.require(shrinker_residual(analytic_profile(ProfileKind::Cylinder, n, 1e-3)) < 1e-10,
                "cylinder residual n=" + std::to_string(n));
      const double r0 = std::sqrt(2.0 * (n - 1));
      OdeResult ode = integrate_shrinker_ode({-5.0, r0, 0.0}, n, 1e-3, 10.0);
      c.require(ode.termination == OdeTermination::MaxArc, "cylinder orbit left the domain");
      double drift = 0.0;
      for (const ProfilePoint& p : ode.curve.points)
        drift = std::max(drift, std::max(std::abs(p.r - r0), std::abs(p.phi)));
      c.require(drift < 1e-8, "cylinder fixed-point drift " + std::to_string(drift));
    }
  });

  run_criterion(2, "known-eigenfunction residuals, O(h^2)", [](Criterion& c) {
    const std::vector<KnownMode> modes = {KnownMode::Dilation, KnownMode::AxialTranslation,
                                          KnownMode::RotationalTranslation};
    const std::vector<const char*> names = {"dilation", "axial", "rotational"};
    auto curves_at = [](double h) {
      std::vector<std::pair<std::string, ProfileCurve>> out;
      out.emplace_back("sphere", analytic_profile(ProfileKind::Sphere, 2, h));
      out.emplace_back("cylinder",
                       truncate(analytic_profile(ProfileKind::Cylinder, 2, h, 14.0), 12.0));
      ShootingProblem problem;
      problem.output_h = h;
      out.emplace_back("torus", shoot_closed_orbit(problem).curve);
      return out;
    };
    const auto fine = curves_at(1e-3);
    const auto coarse = curves_at(2e-3);
    for (std::size_t ci = 0; ci < fine.size(); ++ci) {
      for (std::size_t mi = 0; mi < modes.size(); ++mi) {
        const double res_fine = known_mode_residual(fine[ci].second, modes[mi]);
        const double res_coarse = known_mode_residual(coarse[ci].second, modes[mi]);
        const std::string tag = fine[ci].first + " " + names[mi];
        if (res_fine < 0.0) continue;  // tangential mode, nothing to measure
        c.require(res_fine < 1e-3, tag + " residual " + std::to_string(res_fine));
        if (res_coarse > 1e-9) {
          const double ratio = res_coarse / res_fine;
          c.require(ratio > 2.5 && ratio < 6.5, tag + " halving ratio " + std::to_string(ratio));
        } else {
          // analytically constant eigenfunction: residual sits at the
          // roundoff floor, so require the floor instead of a ratio
          c.require(res_fine < 1e-9, tag + " roundoff floor " + std::to_string(res_fine));
        }
      }
    }
  });

  run_criterion(3, "spectral ground truth", [](Criterion& c) {
    ProfileCurve sph = analytic_profile(ProfileKind::Sphere, 2, 1e-3);
    ModeOperator op0 = assemble_mode_operator(sph, 0);
    Spectrum s0 = lowest_eigenpairs(op0, 1);
    c.require(std::abs(s0.eigenvalues[0] + 1.0) < 2e-4,
              "sphere mu1(0) = " + std::to_string(s0.eigenvalues[0]));

    ProfileCurve cyl = analytic_profile(ProfileKind::Cylinder, 2, 1e-3, 18.0);
    SpectralSweep sweep = sweep_bottom_spectrum(cyl, 0, default_schedule());
    for (std::size_t i = 1; i < sweep.mu1_values.size(); ++i)
      c.require(sweep.mu1_values[i] <= sweep.mu1_values[i - 1] + 1e-12,
                "cylinder sweep not monotone");
    c.require(std::abs(sweep.mu1_limit + 1.0) < 1e-3,
              "cylinder plateau " + std::to_string(sweep.mu1_limit));

    // dense brute force vs Sturm bisection on every tested operator family
    std::vector<ModeOperator> ops;
    ProfileCurve sph_c = analytic_profile(ProfileKind::Sphere, 2, 1e-2);
    ProfileCurve cyl_c = truncate(analytic_profile(ProfileKind::Cylinder, 2, 1e-2, 10.0), 8.0);
    ShootingProblem problem;
    problem.output_h = 1e-2;
    ProfileCurve torus_c = shoot_closed_orbit(problem).curve;
    for (int k : {0, 1, 2}) {
      ops.push_back(assemble_mode_operator(sph_c, k));
      ops.push_back(assemble_mode_operator(cyl_c, k));
      ops.push_back(assemble_mode_operator(torus_c, k));
    }
    for (const ModeOperator& op : ops) {
      const Spectrum s = lowest_eigenpairs(op, 3);
      const Eigen::VectorXd dense = dense_eigenvalues(op, 3);
      for (int i = 0; i < 3; ++i)
        c.require(std::abs(s.eigenvalues[static_cast<std::size_t>(i)] - dense[i]) < 1e-9,
                  "dense vs bisection mismatch (k=" + std::to_string(op.k) + ")");
    }
  });

  run_criterion(4, "torus certificate, verdict 3", [](Criterion& c) {
    const ShootingReport& report = torus_report();
    c.require(report.converged, "shooting did not converge");
    c.require(std::abs(report.mismatch_history.back()) < 1e-8,
              "section mismatch " + std::to_string(report.mismatch_history.back()));
    const IndexCertificate cert = certify_index(report.curve);
    c.require(cert.verdict == 3, "verdict " + std::to_string(cert.verdict));
    c.require(cert.sweep_k0.mu1_limit < -1.0, "mu1(0) not below -1");
    c.require(cert.sweep_k1.mu1_limit < -0.5, "mu1(1) not below -1/2");
    c.require(cert.trials.size() == 67, "trial count");
    for (const TrialResult& t : cert.trials)
      c.require(t.unstable && t.blocks_nonpositive, "trial failed");
  });

  run_criterion(5, "compact orthogonality pairings", [](Criterion& c) {
    const auto rows = orthogonality_report(torus_report().curve, {});
    c.require(rows.size() == 1, "expected the compact single-row report");
    for (double v : rows[0].pairings)
      c.require(std::abs(v) < 1e-8, "pairing " + std::to_string(v));
  });

  run_criterion(6, "property suites", [](Criterion& c) {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> pos(0.1, 1.0);

    // almost-Bessel inequality, 10^4 random instances
    for (int trial = 0; trial < 10000; ++trial) {
      const long dim = 20;
      Vector v = random_vector(dim, gen), a = random_vector(dim, gen),
             b = random_vector(dim, gen), weight(dim);
      for (long i = 0; i < dim; ++i) weight[i] = pos(gen);
      double ab = 0.0, aa = 0.0, bb = 0.0;
      for (long i = 0; i < dim; ++i) {
        ab += weight[i] * a[i] * b[i];
        aa += weight[i] * a[i] * a[i];
        bb += weight[i] * b[i] * b[i];
      }
      const double eps = std::min(0.999, std::abs(ab) / std::sqrt(aa * bb) + 1e-12);
      const BesselCheck check = almost_bessel_check(v, a, b, weight, eps);
      c.require(check.precondition_ok && check.holds, "almost-Bessel violated");
      if (!check.holds) break;
    }

    // Fourier projection orthogonality and discrete H^1 non-expansion
    const long rows = 40, cols = 32;
    for (int trial = 0; trial < 100; ++trial) {
      Vector u = random_vector(rows, gen), w = random_vector(rows, gen);
      Matrix field(rows, cols);
      for (long i = 0; i < rows; ++i)
        for (long j = 0; j < cols; ++j) {
          const double theta = 2.0 * M_PI * static_cast<double>(j) / cols;
          field(i, j) = u[i] * std::cos(3.0 * theta) + w[i] * std::sin(2.0 * theta);
        }
      c.require((fourier_project(field, 3, Parity::Cos) - u).cwiseAbs().maxCoeff() < 1e-10,
                "projection did not recover the k=3 block");
      c.require(fourier_project(field, 2, Parity::Cos).cwiseAbs().maxCoeff() < 1e-10,
                "cross-mode projection not orthogonal");
      c.require(fourier_project(field, 1, Parity::Sin).cwiseAbs().maxCoeff() < 1e-10,
                "cross-mode projection not orthogonal");

      // partial Fourier sum does not expand the discrete H^1(theta) energy
      Matrix noise(rows, cols);
      for (long i = 0; i < rows; ++i) noise.row(i) = random_vector(cols, gen).transpose();
      Matrix full = field + noise;
      Matrix partial = Matrix::Zero(rows, cols);
      for (int k = 0; k <= 4; ++k)
        for (Parity parity : {Parity::Cos, Parity::Sin}) {
          if (k == 0 && parity == Parity::Sin) continue;
          const Vector uk = fourier_project(full, k, parity);
          for (long i = 0; i < rows; ++i)
            for (long j = 0; j < cols; ++j) {
              const double theta = 2.0 * M_PI * static_cast<double>(j) / cols;
              partial(i, j) += uk[i] * (parity == Parity::Cos ? std::cos(k * theta)
                                                              : std::sin(k * theta));
            }
        }
      auto h1 = [&](const Matrix& f) {
        double e = 0.0;
        for (long i = 0; i < rows; ++i)
          for (long j = 0; j < cols; ++j) {
            const double d = f(i, (j + 1) % cols) - f(i, j);
            e += f(i, j) * f(i, j) + d * d;
          }
        return e;
      };
      c.require(h1(partial) <= h1(full) * (1.0 + 1e-12), "H^1 expansion by projection");
    }

    // discrete self-adjointness (bit-exact) and summation by parts
    ShootingProblem problem;
    problem.output_h = 5e-3;
    ProfileCurve torus = shoot_closed_orbit(problem).curve;
    ProfileCurve cyl = truncate(analytic_profile(ProfileKind::Cylinder, 2, 5e-3, 10.0), 8.0);
    for (const ProfileCurve* curve : {&torus, &cyl}) {
      for (int k : {0, 1}) {
        const ModeOperator op = assemble_mode_operator(*curve, k);
        const long N = static_cast<long>(op.size());
        for (int trial = 0; trial < 50; ++trial) {
          Vector p = random_vector(N, gen), q = random_vector(N, gen);
          c.require(op.bilinear(p, q) == op.bilinear(q, p), "bilinear not bit-symmetric");
          const double via_apply = p.dot(op.apply(q));
          const double via_form = op.bilinear(p, q);
          c.require(std::abs(via_apply - via_form) <=
                        1e-12 * std::max(1.0, std::abs(via_form)),
                    "summation-by-parts identity");
        }
      }
    }

    // scaling equivariance of the second variation
    const long ns = static_cast<long>(torus.size());
    for (int trial = 0; trial < 20; ++trial) {
      std::uniform_real_distribution<double> scale_dist(0.2, 3.0);
      const double scale = scale_dist(gen);
      std::vector<ModeFunction> f = {{0, Parity::Cos, random_vector(ns, gen)},
                                     {1, Parity::Sin, random_vector(ns, gen)}};
      const double h = 0.3, base = second_variation(torus, f, h, {0.1, -0.2, 0.05});
      std::vector<ModeFunction> fs = f;
      for (ModeFunction& mode : fs) mode.u *= scale;
      const double scaled = second_variation(
          torus, fs, scale * h, {scale * 0.1, scale * -0.2, scale * 0.05});
      c.require(std::abs(scaled - scale * scale * base) <=
                    1e-9 * std::max(1.0, std::abs(scaled)),
                "second variation not scaling-equivariant");
    }
  });

  run_criterion(7, "entropy oracles and witness decrease", [](Criterion& c) {
    const double sphere_lambda = 1.4715177646857693;    // 4/e
    const double cylinder_lambda = 1.5203469010662808;  // sqrt(2 pi / e)
    ProfileCurve plane = analytic_profile(ProfileKind::Plane, 2, 1e-3);
    ProfileCurve sph = analytic_profile(ProfileKind::Sphere, 2, 1e-3);
    ProfileCurve cyl = analytic_profile(ProfileKind::Cylinder, 2, 1e-3, 14.0);
    c.require(std::abs(entropy(plane).lambda - 1.0) < 1e-10, "plane entropy");
    c.require(std::abs(entropy(sph).lambda - sphere_lambda) < 1e-5, "sphere entropy");
    c.require(std::abs(entropy(cyl).lambda - cylinder_lambda) < 1e-4, "cylinder entropy");

    for (const ProfileCurve* curve : {&sph, &cyl}) {
      const double delta = 1e-5;
      const double base = f_value(*curve, {0.0, 0.0, 1.0});
      const double da =
          (f_value(*curve, {delta, 0.0, 1.0}) - f_value(*curve, {-delta, 0.0, 1.0})) / (2 * delta);
      const double drho = (f_value(*curve, {0.0, delta, 1.0}) - base) / delta;
      const double dt = (f_value(*curve, {0.0, 0.0, 1.0 + delta}) -
                         f_value(*curve, {0.0, 0.0, 1.0 - delta})) /
                        (2 * delta);
      c.require(std::sqrt(da * da + drho * drho + dt * dt) < 1e-4, "stationarity gradient");
    }

    ShootingProblem problem;
    problem.output_h = 2.5e-3;
    ProfileCurve torus = shoot_closed_orbit(problem).curve;
    const IndexCertificate cert = certify_index(torus);
    c.require(cert.verdict == 3, "witness certificate");
    const std::vector<double> s_values = {-0.02, -0.01, 0.0, 0.01, 0.02};
    const std::vector<double> lambdas = entropy_along_variation(torus, {cert.f0}, s_values, 64);
    const double lambda0 = lambdas[2];
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < s_values.size(); ++i) {
      if (s_values[i] == 0.0) continue;
      c.require(lambdas[i] < lambda0, "entropy did not strictly decrease");
      num += (lambda0 - lambdas[i]) * s_values[i] * s_values[i];
      den += std::pow(s_values[i], 4);
    }
    c.require(num / den > 0.0, "fitted quadratic coefficient not positive");
  });

  run_criterion(8, "negative controls", [](Criterion& c) {
    const IndexCertificate sphere_cert =
        certify_index(analytic_profile(ProfileKind::Sphere, 2, 1e-3));
    c.require(sphere_cert.verdict == 0, "sphere verdict");
    c.require(!sphere_cert.failure.empty(), "sphere failing hypothesis unnamed");

    const IndexCertificate cyl_cert =
        certify_index(analytic_profile(ProfileKind::Cylinder, 2, 1e-3, 18.0));
    c.require(cyl_cert.verdict == 0, "cylinder verdict");
    c.require(!cyl_cert.failure.empty(), "cylinder failing hypothesis unnamed");

    ProfileCurve circle;
    circle.n = 2;
    circle.m = 1;
    circle.closed = true;
    const std::size_t N = 628;
    circle.h = 2.0 * M_PI / static_cast<double>(N);
    for (std::size_t i = 0; i <= N; ++i) {
      const double s = circle.h * static_cast<double>(i);
      circle.points.push_back({std::sin(s), 2.0 - std::cos(s), s});
    }
    bool rejected = false;
    try {
      certify_index(circle);
    } catch (const InvalidProfile&) {
      rejected = true;
    }
    c.require(rejected, "non-shrinker circle not rejected at residual validation");
  });

  std::printf("%s (%d/8 criteria)\n", failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
              8 - failures);
  return failures == 0 ? 0 : 1;
}
