#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace shrinker {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A sample of the quotient profile curve in the (x, r) half-plane.
/// phi is the tangent angle, T = (cos phi, sin phi), kept unwrapped along
/// the curve.
struct ProfilePoint {
  double x = 0.0;
  double r = 0.0;
  double phi = 0.0;
};

/// Profile curve of a rotationally symmetric hypersurface, sampled at
/// uniform arc length h.  Closed curves store the first point twice
/// (points.front() == points.back() up to tolerance, phi advanced by a
/// multiple of 2*pi).
struct ProfileCurve {
  std::vector<ProfilePoint> points;
  double h = 0.0;
  bool closed = false;
  int n = 2;  ///< ambient dimension of the hypersurface Sigma^n in R^{n+1}
  int m = 1;  ///< orbit weight exponent, m = n - 1 for full SO(n) symmetry

  std::size_t size() const { return points.size(); }
  std::size_t segments() const { return points.empty() ? 0 : points.size() - 1; }
  double length() const { return h * static_cast<double>(segments()); }
};

/// Weight data for quotient integrals [.]': w(x, r) = r^m e^{-(x^2+r^2)/4},
/// scaled by normalization = (4*pi)^{-n/2} * vol(S^m).
struct WeightSpec {
  int n = 2;
  int m = 1;
  double normalization = 0.0;
};

struct InvalidProfile : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyDomain : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoOrbitFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Surface volume of the unit sphere S^m.
double orbit_volume(int m);

WeightSpec weight_spec(const ProfileCurve& curve);

inline double sample_radius2(const ProfilePoint& p) { return p.x * p.x + p.r * p.r; }

/// True if sample i is an endpoint of an open curve lying on the symmetry
/// axis (r = 0, tangent perpendicular to the axis).
bool is_axis_endpoint(const ProfileCurve& curve, std::size_t i);

}  // namespace shrinker
