#include "shrinker/types.hpp"

namespace shrinker {

double orbit_volume(int m) {
  if (m < 0) throw std::invalid_argument("orbit_volume: m must be >= 0");
  // vol(S^m) = 2 pi^{(m+1)/2} / Gamma((m+1)/2)
  const double p = 0.5 * (m + 1);
  return 2.0 * std::pow(M_PI, p) / std::tgamma(p);
}

WeightSpec weight_spec(const ProfileCurve& curve) {
  WeightSpec spec;
  spec.n = curve.n;
  spec.m = curve.m;
  spec.normalization = std::pow(4.0 * M_PI, -0.5 * curve.n) * orbit_volume(curve.m);
  return spec;
}

bool is_axis_endpoint(const ProfileCurve& curve, std::size_t i) {
  if (curve.closed) return false;
  if (i != 0 && i + 1 != curve.size()) return false;
  const ProfilePoint& p = curve.points[i];
  return p.r < 1e-9 && std::abs(std::abs(std::sin(p.phi)) - 1.0) < 1e-6;
}

}  // namespace shrinker
