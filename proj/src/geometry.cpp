#include "shrinker/geometry.hpp"

#include <algorithm>

namespace shrinker {

namespace {

// phi at a (possibly wrapped) index, with the winding offset added so the
// values stay unwrapped across the seam of a closed curve.
double phi_at(const ProfileCurve& c, long j) {
  const long np = static_cast<long>(c.segments());  // distinct samples on closed curves
  if (!c.closed) return c.points[static_cast<std::size_t>(j)].phi;
  const double winding = c.points.back().phi - c.points.front().phi;
  double offset = 0.0;
  while (j < 0) {
    j += np;
    offset -= winding;
  }
  while (j >= np) {
    j -= np;
    offset += winding;
  }
  return c.points[static_cast<std::size_t>(j)].phi + offset;
}

double centered_kappa(const ProfileCurve& c, long i) {
  const long nlast = static_cast<long>(c.size()) - 1;
  const double h = c.h;
  if (c.closed || (i >= 2 && i <= nlast - 2)) {
    // fourth-order centered
    return (phi_at(c, i - 2) - 8.0 * phi_at(c, i - 1) + 8.0 * phi_at(c, i + 1) -
            phi_at(c, i + 2)) /
           (12.0 * h);
  }
  // second-order centered (i = 1 or i = nlast - 1 on open curves)
  return (phi_at(c, i + 1) - phi_at(c, i - 1)) / (2.0 * h);
}

double one_sided_kappa(const ProfileCurve& c, long i) {
  const long nlast = static_cast<long>(c.size()) - 1;
  const double h = c.h;
  auto p = [&](long j) { return phi_at(c, j); };
  if (i == 0) {
    return (-25.0 * p(0) + 48.0 * p(1) - 36.0 * p(2) + 16.0 * p(3) - 3.0 * p(4)) / (12.0 * h);
  }
  if (i == nlast) {
    return (25.0 * p(nlast) - 48.0 * p(nlast - 1) + 36.0 * p(nlast - 2) - 16.0 * p(nlast - 3) +
            3.0 * p(nlast - 4)) /
           (12.0 * h);
  }
  return centered_kappa(c, i);
}

}  // namespace

double curvature(const ProfileCurve& curve, std::size_t i) {
  if (curve.size() < 5) throw std::invalid_argument("curvature: curve too short");
  if (i >= curve.size()) throw std::out_of_range("curvature: index out of range");
  if (!curve.closed && (i == 0 || i + 1 == curve.size()))
    throw std::out_of_range("curvature: open-curve endpoint; use curvature_one_sided");
  return centered_kappa(curve, static_cast<long>(i));
}

double curvature_one_sided(const ProfileCurve& curve, std::size_t i) {
  if (curve.size() < 5) throw std::invalid_argument("curvature: curve too short");
  if (i >= curve.size()) throw std::out_of_range("curvature: index out of range");
  if (curve.closed) return centered_kappa(curve, static_cast<long>(i));
  return one_sided_kappa(curve, static_cast<long>(i));
}

double mean_curvature(const ProfileCurve& curve, std::size_t i) {
  const ProfilePoint& p = curve.points.at(i);
  const double kappa = curvature_one_sided(curve, i);
  if (is_axis_endpoint(curve, i)) {
    // smooth limit: (nu . e_r)/r -> -kappa as r -> 0 with sin phi = +-1
    return -(1.0 + curve.m) * kappa;
  }
  if (p.r <= 0.0) throw InvalidProfile("mean_curvature: non-axis sample with r <= 0");
  return -kappa + curve.m * std::cos(p.phi) / p.r;
}

double second_fundamental_norm(const ProfileCurve& curve, std::size_t i) {
  const ProfilePoint& p = curve.points.at(i);
  const double kappa = curvature_one_sided(curve, i);
  if (is_axis_endpoint(curve, i)) return (1.0 + curve.m) * kappa * kappa;
  if (p.r <= 0.0) throw InvalidProfile("second_fundamental_norm: non-axis sample with r <= 0");
  const double c = std::cos(p.phi) / p.r;
  return kappa * kappa + curve.m * c * c;
}

double shrinker_residual(const ProfileCurve& curve) {
  double res = 0.0;
  for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
    const ProfilePoint& p = curve.points[i];
    const double h = mean_curvature(curve, i);
    const double target = 0.5 * (-p.x * std::sin(p.phi) + p.r * std::cos(p.phi));
    res = std::max(res, std::abs(h - target));
  }
  return res;
}

NormalComponents normal_components(const ProfileCurve& curve, std::size_t i) {
  const ProfilePoint& p = curve.points.at(i);
  return {-std::sin(p.phi), std::cos(p.phi)};
}

Vector sample_weights(const ProfileCurve& curve, const WeightSpec& spec) {
  const std::size_t n = curve.size();
  Vector w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ProfilePoint& p = curve.points[i];
    w[i] = spec.normalization * std::pow(p.r, spec.m) * std::exp(-0.25 * sample_radius2(p)) *
           curve.h;
  }
  if (curve.closed) {
    // duplicate endpoint: split the full weight between the two copies
    w[0] *= 0.5;
    w[n - 1] *= 0.5;
  } else {
    w[0] *= 0.5;
    w[n - 1] *= 0.5;
  }
  return w;
}

double weighted_integral(const ProfileCurve& curve, const Vector& f, const WeightSpec& spec) {
  if (static_cast<std::size_t>(f.size()) != curve.size())
    throw std::invalid_argument("weighted_integral: f size mismatch");
  return sample_weights(curve, spec).dot(f);
}

double truncation_tail_bound(const ProfileCurve& curve, double R) {
  if (curve.closed) return 0.0;
  // [1]' restricted to |gamma| > R is bounded by C (1 + R)^m e^{-R^2/4} using
  // r <= |gamma| and polynomial growth of the arc length measure.
  const WeightSpec spec = weight_spec(curve);
  return 4.0 * spec.normalization * std::pow(1.0 + R, curve.m + 1) * std::exp(-0.25 * R * R);
}

ProfileCurve reversed(const ProfileCurve& curve) {
  ProfileCurve out = curve;
  const std::size_t n = curve.size();
  for (std::size_t i = 0; i < n; ++i) {
    const ProfilePoint& p = curve.points[n - 1 - i];
    out.points[i] = {p.x, p.r, p.phi + M_PI};
  }
  return out;
}

}  // namespace shrinker
