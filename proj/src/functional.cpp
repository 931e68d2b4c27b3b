#include "shrinker/functional.hpp"

#include "shrinker/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace shrinker {

namespace {

constexpr double kPi = std::numbers::pi;

void validate_center(const SpacetimeCenter& center) {
  if (!(center.t0 > 0.0)) throw InvalidProfile("f_value: t0 must be positive");
  if (center.rho < 0.0) throw InvalidProfile("f_value: rho must be nonnegative");
}

/// int_{S^m} e^{c (omega . e)} dsigma(omega).  Circular orbits use the
/// periodic trapezoid (spectrally accurate), S^2 orbits the closed form,
/// higher orbits composite Simpson on the polar angle.
double orbit_integral(double c, int m, int n_theta) {
  if (c == 0.0) return orbit_volume(m);
  if (m == 1) {
    static thread_local int cached_n = -1;
    static thread_local Eigen::ArrayXd costab;
    if (cached_n != n_theta) {
      costab.resize(n_theta);
      for (int j = 0; j < n_theta; ++j) costab[j] = std::cos(2.0 * kPi * j / n_theta);
      cached_n = n_theta;
    }
    return (c * costab).exp().sum() * 2.0 * kPi / n_theta;
  }
  if (m == 2) {
    // 2 pi int_{-1}^{1} e^{c u} du
    if (std::abs(c) < 1e-6) return 4.0 * kPi * (1.0 + c * c / 6.0);
    return 4.0 * kPi * std::sinh(c) / c;
  }
  const int intervals = n_theta + (n_theta % 2);
  const double dt = kPi / intervals;
  double sum = 0.0;
  for (int j = 0; j <= intervals; ++j) {
    const double t = j * dt;
    const double g = std::exp(c * std::cos(t)) * std::pow(std::sin(t), m - 1);
    const double w = (j == 0 || j == intervals) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    sum += w * g;
  }
  return orbit_volume(m - 1) * sum * dt / 3.0;
}

/// Arc-length quadrature weights: periodic trapezoid for closed curves
/// (first/last sample duplicated), composite Simpson for open ones.
std::vector<double> arc_weights(const ProfileCurve& curve) {
  const std::size_t ns = curve.size();
  const double h = curve.h;
  std::vector<double> w(ns, h);
  if (curve.closed) {
    w.front() = 0.5 * h;
    w.back() = 0.5 * h;
    return w;
  }
  const std::size_t segs = curve.segments();
  std::size_t simpson_end = segs;  // Simpson covers [0, simpson_end]
  if (segs % 2 != 0) simpson_end = (segs >= 3) ? segs - 3 : 0;
  std::fill(w.begin(), w.end(), 0.0);
  for (std::size_t j = 0; j <= simpson_end; ++j) {
    double c = (j == 0 || j == simpson_end) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    if (simpson_end == 0) c = 0.0;
    w[j] += c * h / 3.0;
  }
  if (simpson_end < segs) {
    // 3/8 rule on the trailing three intervals (or trapezoid fallback)
    if (segs - simpson_end == 3) {
      const double c38 = 3.0 * h / 8.0;
      w[simpson_end] += c38;
      w[simpson_end + 1] += 3.0 * c38;
      w[simpson_end + 2] += 3.0 * c38;
      w[simpson_end + 3] += c38;
    } else {
      for (std::size_t j = simpson_end; j < segs; ++j) {
        w[j] += 0.5 * h;
        w[j + 1] += 0.5 * h;
      }
    }
  }
  return w;
}

/// Gaussian area of an axisymmetric point set with given arc weights.
double axisym_gaussian_area(const std::vector<double>& xs, const std::vector<double>& rs,
                            const std::vector<double>& ws, int n, int m,
                            const SpacetimeCenter& center, int n_theta) {
  const double t0 = center.t0;
  const double pref = std::pow(4.0 * kPi * t0, -0.5 * n);
  double sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = rs[i];
    if (r <= 0.0) continue;
    const double dx = xs[i] - center.a;
    const double e = std::exp(-(dx * dx + r * r + center.rho * center.rho) / (4.0 * t0));
    sum += ws[i] * std::pow(r, m) * e *
           orbit_integral(r * center.rho / (2.0 * t0), m, n_theta);
  }
  return pref * sum;
}

using Objective = std::function<double(const SpacetimeCenter&)>;

SpacetimeCenter from_params(const Eigen::Vector3d& v) {
  return {v[0], std::abs(v[1]), std::exp(v[2])};
}

/// Nelder-Mead minimization of fn over R^3; returns true on convergence.
bool nelder_mead(const std::function<double(const Eigen::Vector3d&)>& fn, Eigen::Vector3d& x,
                 double& fx, int max_iter = 400) {
  std::array<Eigen::Vector3d, 4> pts;
  std::array<double, 4> vals;
  pts[0] = x;
  vals[0] = fn(x);
  for (int d = 0; d < 3; ++d) {
    pts[d + 1] = x;
    pts[d + 1][d] += 0.25;
    vals[d + 1] = fn(pts[d + 1]);
  }
  auto order = [&] {
    std::array<int, 4> idx = {0, 1, 2, 3};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return vals[a] < vals[b]; });
    std::array<Eigen::Vector3d, 4> p = pts;
    std::array<double, 4> v = vals;
    for (int i = 0; i < 4; ++i) {
      pts[i] = p[idx[i]];
      vals[i] = v[idx[i]];
    }
  };
  bool converged = false;
  for (int it = 0; it < max_iter; ++it) {
    order();
    double diam = 0.0;
    for (int i = 1; i < 4; ++i) diam = std::max(diam, (pts[i] - pts[0]).norm());
    if (diam < 1e-8 && std::abs(vals[3] - vals[0]) < 1e-13 * (1.0 + std::abs(vals[0]))) {
      converged = true;
      break;
    }
    const Eigen::Vector3d centroid = (pts[0] + pts[1] + pts[2]) / 3.0;
    const Eigen::Vector3d refl = centroid + (centroid - pts[3]);
    const double f_refl = fn(refl);
    if (f_refl < vals[0]) {
      const Eigen::Vector3d exp_pt = centroid + 2.0 * (centroid - pts[3]);
      const double f_exp = fn(exp_pt);
      if (f_exp < f_refl) {
        pts[3] = exp_pt;
        vals[3] = f_exp;
      } else {
        pts[3] = refl;
        vals[3] = f_refl;
      }
    } else if (f_refl < vals[2]) {
      pts[3] = refl;
      vals[3] = f_refl;
    } else {
      const Eigen::Vector3d contr = centroid + 0.5 * (pts[3] - centroid);
      const double f_contr = fn(contr);
      if (f_contr < vals[3]) {
        pts[3] = contr;
        vals[3] = f_contr;
      } else {
        for (int i = 1; i < 4; ++i) {
          pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
          vals[i] = fn(pts[i]);
        }
      }
    }
  }
  order();
  x = pts[0];
  fx = vals[0];
  return converged;
}

/// Coarse grid over (a, rho, log t0) plus Nelder-Mead refinement from the
/// best starting points.
EntropyReport entropy_search(const Objective& F) {
  struct Start {
    Eigen::Vector3d v;
    double value;
  };
  std::vector<Start> grid;
  for (int ia = 0; ia < 9; ++ia)
    for (int ir = 0; ir < 5; ++ir)
      for (int itau = 0; itau < 7; ++itau) {
        Eigen::Vector3d v(-2.0 + 0.5 * ia, 0.5 * ir, -1.2 + 0.4 * itau);
        grid.push_back({v, F(from_params(v))});
      }
  std::sort(grid.begin(), grid.end(),
            [](const Start& a, const Start& b) { return a.value > b.value; });
  std::vector<Eigen::Vector3d> starts;
  for (const Start& s : grid) {
    bool fresh = true;
    for (const Eigen::Vector3d& t : starts) fresh = fresh && (s.v - t).norm() > 0.6;
    if (fresh) starts.push_back(s.v);
    if (starts.size() == 3) break;
  }
  EntropyReport report;
  report.lambda = -1.0;
  // Search box: keeps the refinement where the discrete surface resolves the
  // Gaussian (flat directions, e.g. for the plane, would otherwise drift to
  // unresolvably small t0 and pick up pure quadrature noise).
  auto negF = [&](const Eigen::Vector3d& v) {
    if (std::abs(v[0]) > 6.0 || std::abs(v[1]) > 6.0 || std::abs(v[2]) > 1.5) return 1e6;
    return -F(from_params(v));
  };
  for (Eigen::Vector3d x : starts) {
    double fx = 0.0;
    const bool ok = nelder_mead(negF, x, fx);
    if (-fx > report.lambda) {
      report.lambda = -fx;
      report.argmax = from_params(x);
      report.converged = ok;
    }
  }
  return report;
}

bool is_compact(const ProfileCurve& curve) {
  return curve.closed ||
         (is_axis_endpoint(curve, 0) && is_axis_endpoint(curve, curve.size() - 1));
}

}  // namespace

double f_value(const ProfileCurve& curve, const SpacetimeCenter& center, int n_theta) {
  validate_center(center);
  if (curve.size() < 2) throw InvalidProfile("f_value: curve has too few samples");
  const std::size_t ns = curve.size();
  std::vector<double> xs(ns), rs(ns);
  for (std::size_t i = 0; i < ns; ++i) {
    xs[i] = curve.points[i].x;
    rs[i] = curve.points[i].r;
  }
  return axisym_gaussian_area(xs, rs, arc_weights(curve), curve.n, curve.m, center, n_theta);
}

double f_tail_bound(const ProfileCurve& curve, const SpacetimeCenter& center) {
  validate_center(center);
  if (is_compact(curve)) return 0.0;
  double R = 0.0;
  for (const ProfilePoint& p : curve.points) R = std::max(R, std::sqrt(sample_radius2(p)));
  const double d = std::sqrt(center.a * center.a + center.rho * center.rho);
  // in units of sqrt(t0) the tail has the t0 = 1 form and the prefactor
  // powers cancel (orbit dimension + 1 = n)
  const double Rs = std::max(0.0, R - d) / std::sqrt(center.t0);
  const WeightSpec spec = weight_spec(curve);
  return 4.0 * spec.normalization * std::pow(1.0 + Rs, curve.m + 1) * std::exp(-Rs * Rs / 4.0);
}

EntropyReport entropy(const ProfileCurve& curve, int n_theta) {
  EntropyReport report =
      entropy_search([&](const SpacetimeCenter& c) { return f_value(curve, c, n_theta); });
  report.tail_bound = f_tail_bound(curve, report.argmax);
  return report;
}

namespace {

struct DeformContext {
  const ProfileCurve* curve = nullptr;
  std::vector<double> sinphi, cosphi, kappa;
};

DeformContext make_context(const ProfileCurve& curve) {
  DeformContext ctx;
  ctx.curve = &curve;
  const std::size_t ns = curve.size();
  ctx.sinphi.resize(ns);
  ctx.cosphi.resize(ns);
  ctx.kappa.resize(ns);
  for (std::size_t i = 0; i < ns; ++i) {
    ctx.sinphi[i] = std::sin(curve.points[i].phi);
    ctx.cosphi[i] = std::cos(curve.points[i].phi);
    ctx.kappa[i] = curvature_one_sided(curve, i);
  }
  return ctx;
}

void check_immersion(const DeformContext& ctx, double s, double max_amplitude) {
  double worst = 0.0;
  for (double k : ctx.kappa) worst = std::max(worst, std::abs(k));
  if (std::abs(s) * max_amplitude * worst > 0.9)
    throw InvalidProfile("entropy_along_variation: deformation is not an immersion at s = " +
                         std::to_string(s));
}

/// Entropy of the rotationally symmetric deformation by the k = 0 amplitude
/// u: deform the profile, re-derive trapezoid weights from the deformed
/// segment lengths.
double lambda_axisymmetric(const DeformContext& ctx, const Vector& u, double s, int n_theta) {
  const ProfileCurve& curve = *ctx.curve;
  const std::size_t ns = curve.size();
  std::vector<double> xs(ns), rs(ns);
  for (std::size_t i = 0; i < ns; ++i) {
    const double a = s * u[static_cast<long>(i)];
    xs[i] = curve.points[i].x - a * ctx.sinphi[i];
    rs[i] = std::max(0.0, curve.points[i].r + a * ctx.cosphi[i]);
  }
  std::vector<double> ws(ns, 0.0);
  for (std::size_t j = 0; j + 1 < ns; ++j) {
    const double len = std::hypot(xs[j + 1] - xs[j], rs[j + 1] - rs[j]);
    if (len < 0.05 * curve.h)
      throw InvalidProfile("entropy_along_variation: deformed curve degenerates");
    ws[j] += 0.5 * len;
    ws[j + 1] += 0.5 * len;
  }
  return entropy_search([&](const SpacetimeCenter& c) {
           return axisym_gaussian_area(xs, rs, ws, curve.n, curve.m, c, n_theta);
         })
      .lambda;
}

/// Entropy of a non-symmetric deformation (circular orbits): evaluate the
/// Gaussian area on a full (arc, theta) surface grid with finite-difference
/// area elements.
double lambda_grid(const DeformContext& ctx, const std::vector<ModeFunction>& modes, double s,
                   int n_theta) {
  const ProfileCurve& curve = *ctx.curve;
  const std::size_t ni = curve.closed ? curve.size() - 1 : curve.size();
  const std::size_t nj = static_cast<std::size_t>(n_theta);
  const double dtheta = 2.0 * kPi / static_cast<double>(nj);
  std::vector<Eigen::Vector3d> X(ni * nj);
  for (std::size_t i = 0; i < ni; ++i) {
    const ProfilePoint& p = curve.points[i];
    for (std::size_t j = 0; j < nj; ++j) {
      const double theta = dtheta * static_cast<double>(j);
      double u = 0.0;
      for (const ModeFunction& mode : modes) {
        const double trig = mode.parity == Parity::Cos ? std::cos(mode.k * theta)
                                                       : std::sin(mode.k * theta);
        u += mode.u[static_cast<long>(i)] * trig;
      }
      const double a = s * u;
      const double radial = p.r + a * ctx.cosphi[i];
      X[i * nj + j] =
          Eigen::Vector3d(p.x - a * ctx.sinphi[i], radial * std::cos(theta),
                          radial * std::sin(theta));
    }
  }
  std::vector<double> w(ni * nj);
  for (std::size_t i = 0; i < ni; ++i) {
    double iscale = 1.0;
    for (std::size_t j = 0; j < nj; ++j) {
      Eigen::Vector3d ti;
      if (curve.closed) {
        ti = (X[((i + 1) % ni) * nj + j] - X[((i + ni - 1) % ni) * nj + j]) / (2.0 * curve.h);
      } else if (i == 0) {
        ti = (X[nj + j] - X[j]) / curve.h;
        iscale = 0.5;
      } else if (i + 1 == ni) {
        ti = (X[i * nj + j] - X[(i - 1) * nj + j]) / curve.h;
        iscale = 0.5;
      } else {
        ti = (X[(i + 1) * nj + j] - X[(i - 1) * nj + j]) / (2.0 * curve.h);
      }
      // chord correction dtheta/sin(dtheta): the periodic central difference
      // shortens the first orbit harmonic (the circle itself) by exactly
      // sin(dtheta)/dtheta
      const Eigen::Vector3d tj = (X[i * nj + (j + 1) % nj] - X[i * nj + (j + nj - 1) % nj]) /
                                 (2.0 * std::sin(dtheta));
      w[i * nj + j] = iscale * ti.cross(tj).norm() * curve.h * dtheta;
    }
  }
  Eigen::Matrix3Xd P(3, static_cast<long>(X.size()));
  for (std::size_t p = 0; p < X.size(); ++p) P.col(static_cast<long>(p)) = X[p];
  const Eigen::Map<const Eigen::ArrayXd> wv(w.data(), static_cast<long>(w.size()));
  auto F = [&](const SpacetimeCenter& c) {
    const Eigen::Vector3d x0(c.a, c.rho, 0.0);
    const Eigen::ArrayXd d2 = (P.colwise() - x0).colwise().squaredNorm().transpose().array();
    return (wv * (-d2 / (4.0 * c.t0)).exp()).sum() / (4.0 * kPi * c.t0);
  };
  return entropy_search(F).lambda;
}

}  // namespace

std::vector<double> entropy_along_variation(const ProfileCurve& curve,
                                            const std::vector<ModeFunction>& f,
                                            const std::vector<double>& s_values, int n_theta) {
  bool higher = false;
  double max_amplitude = 0.0;
  for (const ModeFunction& mode : f) {
    if (static_cast<std::size_t>(mode.u.size()) != curve.size())
      throw std::invalid_argument("entropy_along_variation: mode on a mismatched curve");
    if (mode.k == 0 && mode.parity == Parity::Sin)
      throw std::invalid_argument("entropy_along_variation: k = 0 has no sin block");
    const double scale = mode.u.size() > 0 ? mode.u.cwiseAbs().maxCoeff() : 0.0;
    if (mode.k >= 1 && scale > 0.0) {
      higher = true;
      for (std::size_t end : {std::size_t{0}, curve.size() - 1})
        if (is_axis_endpoint(curve, end) &&
            std::abs(mode.u[static_cast<long>(end)]) > 1e-6 * scale)
          throw InvalidProfile("entropy_along_variation: k >= 1 mode must vanish on the axis");
    }
    max_amplitude += scale;
  }
  if (higher && curve.m != 1)
    throw InvalidProfile("entropy_along_variation: angular grid needs circular orbits (n = 2)");

  const DeformContext ctx = make_context(curve);
  Vector u0 = Vector::Zero(static_cast<long>(curve.size()));
  if (!higher)
    for (const ModeFunction& mode : f) u0 += mode.u;

  std::vector<double> lambdas;
  lambdas.reserve(s_values.size());
  for (double s : s_values) {
    check_immersion(ctx, s, max_amplitude);
    lambdas.push_back(higher ? lambda_grid(ctx, f, s, n_theta)
                             : lambda_axisymmetric(ctx, u0, s, n_theta));
  }
  return lambdas;
}

}  // namespace shrinker
