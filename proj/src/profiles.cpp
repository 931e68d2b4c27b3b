#include "shrinker/profiles.hpp"

#include "shrinker/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace shrinker {

namespace {

struct State {
  double x, r, phi;
};

struct Deriv {
  double dx, dr, dphi;
};

Deriv rhs(const State& s, int m) {
  const double c = std::cos(s.phi), sn = std::sin(s.phi);
  return {c, sn, m * c / s.r + 0.5 * s.x * sn - 0.5 * s.r * c};
}

State rk4_step(const State& s, int m, double h) {
  const Deriv k1 = rhs(s, m);
  const Deriv k2 = rhs({s.x + 0.5 * h * k1.dx, s.r + 0.5 * h * k1.dr, s.phi + 0.5 * h * k1.dphi}, m);
  const Deriv k3 = rhs({s.x + 0.5 * h * k2.dx, s.r + 0.5 * h * k2.dr, s.phi + 0.5 * h * k2.dphi}, m);
  const Deriv k4 = rhs({s.x + h * k3.dx, s.r + h * k3.dr, s.phi + h * k3.dphi}, m);
  return {s.x + h / 6.0 * (k1.dx + 2 * k2.dx + 2 * k3.dx + k4.dx),
          s.r + h / 6.0 * (k1.dr + 2 * k2.dr + 2 * k3.dr + k4.dr),
          s.phi + h / 6.0 * (k1.dphi + 2 * k2.dphi + 2 * k3.dphi + k4.dphi)};
}

// One output step of size h starting exactly on the axis (r = 0,
// sin phi = +1): a short series step off the singularity, then RK4 substeps.
State axis_step(const State& s0, int m, double h) {
  const int sub = 50;
  const double d = h / sub;
  const double s_sin = std::sin(s0.phi);  // +-1
  const double kappa0 = 0.5 * s0.x * s_sin / (1.0 + m);
  State s{s0.x - 0.5 * s_sin * kappa0 * d * d, s0.r + s_sin * d, s0.phi + kappa0 * d};
  for (int j = 1; j < sub; ++j) s = rk4_step(s, m, d);
  return s;
}

bool on_axis(const State& s) { return s.r < 1e-12; }

// Advance by h, choosing the axis-regularized path when needed.
State advance(const State& s, int m, double h) {
  if (on_axis(s)) return axis_step(s, m, h);
  if (s.r < 5.0 * h) {
    // substep while close to the axis
    State t = s;
    for (int j = 0; j < 10; ++j) t = rk4_step(t, m, h / 10.0);
    return t;
  }
  return rk4_step(s, m, h);
}

struct SectionHit {
  bool found = false;
  State state{};
  double arc = 0.0;
};

// Integrate from the symmetry section and stop at the first downward crossing
// of {x = 0} (x' = cos phi < 0 there).  Newton refinement on the final
// partial step lands on the section to machine precision.  When `store` is
// non-null, states at multiples of `step` are appended to it.
SectionHit integrate_to_section(State s, int m, double step, double max_arc,
                                double blowup_radius, std::vector<State>* store) {
  SectionHit hit;
  double arc = 0.0;
  if (store) store->push_back(s);
  const long max_steps = static_cast<long>(std::ceil(max_arc / step)) + 1;
  for (long i = 0; i < max_steps; ++i) {
    const State next = advance(s, m, step);
    if (!(std::isfinite(next.x) && std::isfinite(next.r) && std::isfinite(next.phi))) return hit;
    if (next.r <= 0.0) return hit;  // hit the axis
    if (next.x * next.x + next.r * next.r > blowup_radius * blowup_radius) return hit;
    if (arc > 2.0 * step && s.x > 0.0 && next.x <= 0.0) {
      // refine the crossing: Newton on the partial step length
      double d = step * s.x / std::max(s.x - next.x, 1e-300);
      State cross = next;
      for (int it = 0; it < 12; ++it) {
        cross = rk4_step(s, m, d);
        const double dxds = std::cos(cross.phi);
        if (std::abs(dxds) < 1e-14) break;
        const double corr = cross.x / dxds;
        d -= corr;
        if (std::abs(corr) < 1e-16 * std::max(1.0, std::abs(d))) {
          cross = rk4_step(s, m, d);
          break;
        }
      }
      hit.found = true;
      hit.state = cross;
      hit.arc = arc + d;
      if (store) store->push_back(cross);
      return hit;
    }
    s = next;
    arc += step;
    if (store) store->push_back(s);
    if (arc >= max_arc) break;
  }
  return hit;
}

// Tangent-angle mismatch at the first return to the section: distance of phi
// from the nearest odd multiple of pi.  NaN when the trajectory never
// returns.
double section_mismatch(double r0, int m, double step, double max_arc, double blowup_radius) {
  const SectionHit hit = integrate_to_section({0.0, r0, 0.0}, m, step, max_arc, blowup_radius, nullptr);
  if (!hit.found) return std::numeric_limits<double>::quiet_NaN();
  const double q = 2.0 * std::round(0.5 * (hit.state.phi / M_PI - 1.0)) + 1.0;
  return hit.state.phi - q * M_PI;
}

// Local cubic Lagrange interpolation on a sorted, nearly uniform node set.
double interp_cubic(const std::vector<double>& s, const std::vector<double>& v, double q) {
  const long n = static_cast<long>(s.size());
  long j = static_cast<long>(std::lower_bound(s.begin(), s.end(), q) - s.begin()) - 1;
  j = std::clamp(j, 0L, n - 2);
  long lo = std::clamp(j - 1, 0L, n - 4);
  double result = 0.0;
  for (long a = lo; a < lo + 4; ++a) {
    double term = v[static_cast<std::size_t>(a)];
    for (long b = lo; b < lo + 4; ++b) {
      if (a == b) continue;
      term *= (q - s[static_cast<std::size_t>(b)]) /
              (s[static_cast<std::size_t>(a)] - s[static_cast<std::size_t>(b)]);
    }
    result += term;
  }
  return result;
}

}  // namespace

ProfileKind profile_kind_from_string(const std::string& s) {
  if (s == "plane") return ProfileKind::Plane;
  if (s == "sphere") return ProfileKind::Sphere;
  if (s == "cylinder") return ProfileKind::Cylinder;
  throw std::invalid_argument("unknown profile kind: " + s);
}

ProfileCurve analytic_profile(ProfileKind kind, int n, double h, double half_length_R) {
  if (h <= 0.0) throw std::invalid_argument("analytic_profile: h must be positive");
  if (n < 2) throw std::invalid_argument("analytic_profile: n must be >= 2");
  ProfileCurve c;
  c.n = n;
  c.m = n - 1;
  c.closed = false;
  switch (kind) {
    case ProfileKind::Sphere: {
      const double a = std::sqrt(2.0 * n);
      const double len = M_PI * a;
      const std::size_t steps = std::max<std::size_t>(4, static_cast<std::size_t>(std::round(len / h)));
      c.h = len / static_cast<double>(steps);
      c.points.resize(steps + 1);
      for (std::size_t i = 0; i <= steps; ++i) {
        const double t = c.h * static_cast<double>(i) / a;  // polar angle from the pole
        c.points[i] = {-a * std::cos(t), a * std::sin(t), 0.5 * M_PI - t};
      }
      break;
    }
    case ProfileKind::Cylinder: {
      if (half_length_R <= 0.0) throw std::invalid_argument("cylinder needs half_length_R > 0");
      const double r0 = std::sqrt(2.0 * (n - 1));
      const double len = 2.0 * half_length_R;
      const std::size_t steps = std::max<std::size_t>(4, static_cast<std::size_t>(std::round(len / h)));
      c.h = len / static_cast<double>(steps);
      c.points.resize(steps + 1);
      for (std::size_t i = 0; i <= steps; ++i)
        c.points[i] = {-half_length_R + c.h * static_cast<double>(i), r0, 0.0};
      break;
    }
    case ProfileKind::Plane: {
      if (half_length_R <= 0.0) throw std::invalid_argument("plane needs half_length_R > 0");
      const std::size_t steps = std::max<std::size_t>(4, static_cast<std::size_t>(std::round(half_length_R / h)));
      c.h = half_length_R / static_cast<double>(steps);
      c.points.resize(steps + 1);
      for (std::size_t i = 0; i <= steps; ++i)
        c.points[i] = {0.0, c.h * static_cast<double>(i), 0.5 * M_PI};
      break;
    }
  }
  return c;
}

OdeResult integrate_shrinker_ode(ProfilePoint start, int n, double step, double max_arc,
                                 double blowup_radius) {
  if (step <= 0.0) throw std::invalid_argument("integrate_shrinker_ode: step must be positive");
  if (n < 2) throw std::invalid_argument("integrate_shrinker_ode: n must be >= 2");
  const int m = n - 1;
  State s{start.x, start.r, start.phi};
  if (start.r < 1e-12) {
    if (std::abs(std::abs(std::sin(start.phi)) - 1.0) > 1e-9)
      throw std::invalid_argument("axis start requires sin phi = +-1");
    if (std::sin(start.phi) < 0.0)
      throw std::invalid_argument("axis start must point into r > 0");
    s.r = 0.0;
  } else if (start.r < 0.0) {
    throw std::invalid_argument("start radius must be nonnegative");
  }

  OdeResult out;
  out.curve.n = n;
  out.curve.m = m;
  out.curve.h = step;
  out.curve.closed = false;
  out.curve.points.push_back({s.x, s.r, s.phi});
  out.termination = OdeTermination::MaxArc;
  const long max_steps = static_cast<long>(std::round(max_arc / step));
  for (long i = 0; i < max_steps; ++i) {
    const State next = advance(s, m, step);
    if (!(std::isfinite(next.x) && std::isfinite(next.r) && std::isfinite(next.phi)) ||
        next.r <= 0.0) {
      out.termination = OdeTermination::HitAxis;
      break;
    }
    if (next.x * next.x + next.r * next.r > blowup_radius * blowup_radius) {
      out.termination = OdeTermination::BlowUp;
      break;
    }
    s = next;
    out.curve.points.push_back({s.x, s.r, s.phi});
  }
  out.arc = step * static_cast<double>(out.curve.points.size() - 1);
  return out;
}

ShootingReport shoot_closed_orbit(const ShootingProblem& problem) {
  if (problem.r_lo <= 0.0 || problem.r_hi <= problem.r_lo)
    throw std::invalid_argument("shoot_closed_orbit: bracket must be positive and nondegenerate");
  if (problem.closure_tol <= 0.0)
    throw std::invalid_argument("shoot_closed_orbit: closure_tol must be positive");
  const int m = problem.n - 1;
  const double blowup = 30.0;
  auto mismatch = [&](double r0, double step) {
    return section_mismatch(r0, m, step, problem.max_arc, blowup);
  };

  // coarse scan for a sign change
  double a = 0.0, b = 0.0, fa = 0.0, fb = 0.0;
  bool bracketed = false;
  double prev_r = 0.0, prev_f = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < problem.scan_points; ++i) {
    const double r0 = problem.r_lo + (problem.r_hi - problem.r_lo) * i /
                                         static_cast<double>(problem.scan_points - 1);
    const double f = mismatch(r0, problem.step);
    if (std::isfinite(prev_f) && std::isfinite(f) && prev_f * f < 0.0) {
      a = prev_r;
      b = r0;
      fa = prev_f;
      fb = f;
      bracketed = true;
      break;
    }
    prev_r = r0;
    prev_f = f;
  }
  if (!bracketed) throw NoOrbitFound("shoot_closed_orbit: no mismatch sign change in bracket");

  ShootingReport report;
  report.mismatch_history = {fa, fb};

  // secant/bisection hybrid
  double r_star = 0.5 * (a + b), f_star = std::numeric_limits<double>::infinity();
  for (int it = 0; it < problem.max_iterations; ++it) {
    double cand = b - fb * (b - a) / (fb - fa);
    if (!std::isfinite(cand) || cand <= a || cand >= b) cand = 0.5 * (a + b);
    const double fc = mismatch(cand, problem.step);
    report.mismatch_history.push_back(fc);
    if (!std::isfinite(fc)) {  // shrink toward the midpoint from both sides
      const double mid = 0.5 * (a + b);
      const double fm = mismatch(mid, problem.step);
      if (!std::isfinite(fm)) break;
      if (fa * fm < 0.0) {
        b = mid;
        fb = fm;
      } else {
        a = mid;
        fa = fm;
      }
      continue;
    }
    r_star = cand;
    f_star = fc;
    if (std::abs(fc) < 1e-13 || b - a < 1e-15) break;
    if (fa * fc < 0.0) {
      b = cand;
      fb = fc;
    } else {
      a = cand;
      fa = fc;
    }
  }

  // polish at the fine step (the root shifts by O(step^4))
  {
    double r1 = r_star, r2 = r_star * (1.0 + 1e-7);
    double g1 = mismatch(r1, problem.refine_step);
    double g2 = mismatch(r2, problem.refine_step);
    for (int it = 0; it < 30 && std::isfinite(g1) && std::isfinite(g2); ++it) {
      if (std::abs(g2 - g1) < 1e-300) break;
      const double r3 = r2 - g2 * (r2 - r1) / (g2 - g1);
      if (!std::isfinite(r3) || r3 <= 0.0) break;
      r1 = r2;
      g1 = g2;
      r2 = r3;
      g2 = mismatch(r2, problem.refine_step);
      report.mismatch_history.push_back(g2);
      if (std::isfinite(g2) && std::abs(g2) < 0.1 * problem.closure_tol) break;
    }
    if (std::isfinite(g2) && std::abs(g2) < std::abs(f_star)) {
      r_star = r2;
      f_star = g2;
    }
  }

  report.r_star = r_star;
  report.converged = std::isfinite(f_star) && std::abs(f_star) <= problem.closure_tol;
  if (!report.converged) return report;

  // final half orbit at the fine step
  std::vector<State> dense;
  const SectionHit hit =
      integrate_to_section({0.0, r_star, 0.0}, m, problem.refine_step, problem.max_arc, blowup, &dense);
  if (!hit.found || dense.size() < 8) {
    report.converged = false;
    return report;
  }
  const double s_half = hit.arc;
  std::vector<double> sv(dense.size()), xv(dense.size()), rv(dense.size()), pv(dense.size());
  for (std::size_t i = 0; i < dense.size(); ++i) {
    sv[i] = (i + 1 == dense.size()) ? s_half : problem.refine_step * static_cast<double>(i);
    xv[i] = dense[i].x;
    rv[i] = dense[i].r;
    pv[i] = dense[i].phi;
  }

  const std::size_t half_steps =
      std::max<std::size_t>(4, static_cast<std::size_t>(std::round(s_half / problem.output_h)));
  const double h_out = s_half / static_cast<double>(half_steps);
  const double winding = hit.state.phi;  // ~ odd multiple of pi

  ProfileCurve& curve = report.curve;
  curve.n = problem.n;
  curve.m = m;
  curve.h = h_out;
  curve.closed = true;
  curve.points.resize(2 * half_steps + 1);
  for (std::size_t j = 0; j <= half_steps; ++j) {
    const double q = h_out * static_cast<double>(j);
    curve.points[j] = {interp_cubic(sv, xv, q), interp_cubic(sv, rv, q), interp_cubic(sv, pv, q)};
  }
  curve.points[half_steps] = {hit.state.x, hit.state.r, hit.state.phi};
  curve.points[0] = {0.0, r_star, 0.0};
  // second half by reflection symmetry x -> -x
  for (std::size_t j = half_steps + 1; j <= 2 * half_steps; ++j) {
    const ProfilePoint& src = curve.points[2 * half_steps - j];
    curve.points[j] = {-src.x, src.r, 2.0 * winding - src.phi};
  }
  return report;
}

ProfileCurve truncate(const ProfileCurve& curve, double R) {
  if (R <= 0.0) throw std::invalid_argument("truncate: R must be positive");
  const std::size_t n = curve.size();
  std::vector<bool> inside(n);
  bool all_inside = true, any_inside = false;
  for (std::size_t i = 0; i < n; ++i) {
    inside[i] = sample_radius2(curve.points[i]) <= R * R;
    all_inside = all_inside && inside[i];
    any_inside = any_inside || inside[i];
  }
  if (!any_inside) throw EmptyDomain("truncate: profile does not intersect B_R");
  if (all_inside) return curve;

  // longest contiguous inside run (cyclic for closed curves)
  const std::size_t nd = curve.closed ? n - 1 : n;
  std::size_t best_start = 0, best_len = 0;
  const std::size_t span = curve.closed ? 2 * nd : nd;
  std::size_t run_start = 0, run_len = 0;
  for (std::size_t i = 0; i < span; ++i) {
    if (inside[i % nd]) {
      if (run_len == 0) run_start = i;
      ++run_len;
      if (run_len > best_len && run_len <= nd) {
        best_len = run_len;
        best_start = run_start;
      }
    } else {
      run_len = 0;
    }
  }
  if (best_len < 5) throw EmptyDomain("truncate: intersection with B_R is too small");
  ProfileCurve out;
  out.n = curve.n;
  out.m = curve.m;
  out.h = curve.h;
  out.closed = false;
  out.points.resize(best_len);
  const double winding = curve.closed ? curve.points.back().phi - curve.points.front().phi : 0.0;
  for (std::size_t j = 0; j < best_len; ++j) {
    const std::size_t src = (best_start + j) % nd;
    ProfilePoint p = curve.points[src];
    if (curve.closed && best_start + j >= nd) p.phi += winding;
    out.points[j] = p;
  }
  return out;
}

ProfileCurve resample(const ProfileCurve& curve, double new_h) {
  if (new_h <= 0.0) throw std::invalid_argument("resample: new_h must be positive");
  if (curve.size() < 5) throw std::invalid_argument("resample: curve too short");
  const double len = curve.length();
  const std::size_t steps = std::max<std::size_t>(4, static_cast<std::size_t>(std::round(len / new_h)));
  const double h_out = len / static_cast<double>(steps);

  const std::size_t n = curve.size();
  std::vector<double> sv, xv, rv, pv;
  if (curve.closed) {
    // pad with wrapped samples so the cubic stencil never sees the seam
    const std::size_t nd = n - 1;
    const double winding = curve.points.back().phi - curve.points.front().phi;
    const long pad = 3;
    for (long j = -pad; j < static_cast<long>(nd) + pad + 1; ++j) {
      long idx = j;
      double off = 0.0;
      while (idx < 0) {
        idx += static_cast<long>(nd);
        off -= winding;
      }
      while (idx >= static_cast<long>(nd)) {
        idx -= static_cast<long>(nd);
        off += winding;
      }
      const ProfilePoint& p = curve.points[static_cast<std::size_t>(idx)];
      sv.push_back(curve.h * static_cast<double>(j));
      xv.push_back(p.x);
      rv.push_back(p.r);
      pv.push_back(p.phi + off);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      sv.push_back(curve.h * static_cast<double>(i));
      xv.push_back(curve.points[i].x);
      rv.push_back(curve.points[i].r);
      pv.push_back(curve.points[i].phi);
    }
  }

  ProfileCurve out;
  out.n = curve.n;
  out.m = curve.m;
  out.h = h_out;
  out.closed = curve.closed;
  out.points.resize(steps + 1);
  for (std::size_t j = 0; j <= steps; ++j) {
    const double q = h_out * static_cast<double>(j);
    out.points[j] = {interp_cubic(sv, xv, q), interp_cubic(sv, rv, q), interp_cubic(sv, pv, q)};
  }
  if (!curve.closed) {
    out.points.front() = curve.points.front();
    out.points.back() = curve.points.back();
  } else {
    out.points.front() = curve.points.front();
    out.points.back() = curve.points.back();
  }
  return out;
}

}  // namespace shrinker
