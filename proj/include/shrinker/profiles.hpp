#pragma once

#include "shrinker/types.hpp"

namespace shrinker {

enum class ProfileKind { Plane, Sphere, Cylinder };

ProfileKind profile_kind_from_string(const std::string& s);

/// Analytic shrinker families: sphere S^n(sqrt(2n)) as a half-circle pole to
/// pole, cylinder S^{n-1}(sqrt(2(n-1))) x R as a segment |x| <= R, plane as a
/// segment on the r-axis.  h is adjusted slightly so the length is an exact
/// multiple of it.
ProfileCurve analytic_profile(ProfileKind kind, int n, double h, double half_length_R = 10.0);

enum class OdeTermination { MaxArc, HitAxis, BlowUp };

struct OdeResult {
  ProfileCurve curve;
  OdeTermination termination = OdeTermination::MaxArc;
  double arc = 0.0;
};

/// Integrate the profile ODE x' = cos phi, r' = sin phi,
/// phi' = m cos phi / r + x sin phi / 2 - r cos phi / 2 with classical RK4 in
/// arc length.  Axis starts (r = 0, sin phi = +-1) use the regularized series
/// expansion for the first step.
OdeResult integrate_shrinker_ode(ProfilePoint start, int n, double step, double max_arc,
                                 double blowup_radius = 30.0);

struct ShootingProblem {
  int n = 2;
  double r_lo = 0.3;
  double r_hi = 2.5;
  double step = 1e-3;       ///< integrator step for the bracketing scan
  double refine_step = 1e-4;  ///< integrator step for the final orbit
  double max_arc = 30.0;
  double closure_tol = 1e-10;
  double output_h = 1e-3;
  int scan_points = 200;
  int max_iterations = 200;
};

struct ShootingReport {
  double r_star = 0.0;
  std::vector<double> mismatch_history;
  ProfileCurve curve;
  bool converged = false;
};

/// Shoot for a closed orbit of the profile ODE from the symmetry section
/// {x = 0, phi = 0}, matching the tangent angle at the first return to x = 0.
/// Throws NoOrbitFound if the coarse scan finds no sign change in the bracket.
ShootingReport shoot_closed_orbit(const ShootingProblem& problem);

/// Restriction of the profile to samples with |gamma| <= R (D_R exhaustion).
/// Closed curves entirely inside B_R are returned unchanged.
ProfileCurve truncate(const ProfileCurve& curve, double R);

/// Cubic re-interpolation to uniform arc length ~new_h (adjusted so the total
/// length is an exact multiple).
ProfileCurve resample(const ProfileCurve& curve, double new_h);

}  // namespace shrinker
