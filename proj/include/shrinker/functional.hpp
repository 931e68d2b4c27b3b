#pragma once

#include "shrinker/types.hpp"
#include "shrinker/variation.hpp"

#include <vector>

namespace shrinker {

/// Spacetime center (x0, t0) of the Gaussian area functional.  By rotational
/// symmetry of the search space the spatial center is parametrized by one
/// axial offset a along the symmetry axis and a radial offset rho >= 0 in the
/// rotation plane.
struct SpacetimeCenter {
  double a = 0.0;
  double rho = 0.0;
  double t0 = 1.0;
};

/// Gaussian-weighted area (4 pi t0)^{-n/2} int_Sigma e^{-|X - x0|^2/(4 t0)}.
/// On-axis centers use the closed-form orbit factor; off-axis ones an
/// n_theta-point quadrature of the orbit integral (trapezoid for circular
/// orbits, spectrally accurate).  Throws InvalidProfile for t0 <= 0 or
/// rho < 0.
double f_value(const ProfileCurve& curve, const SpacetimeCenter& center, int n_theta = 128);

/// Analytic Gaussian bound on the mass of f_value beyond the sampled
/// truncation radius; zero for compact profiles (closed curves, or open
/// curves with both endpoints on the axis).
double f_tail_bound(const ProfileCurve& curve, const SpacetimeCenter& center);

struct EntropyReport {
  double lambda = 0.0;
  SpacetimeCenter argmax;
  double tail_bound = 0.0;  ///< truncation error bar (noncompact profiles)
  bool converged = false;   ///< false flags the value as best-found only
};

/// Entropy sup_{x0, t0} F: coarse grid over (a, rho, log t0) followed by
/// Nelder-Mead refinement from the best starts.
EntropyReport entropy(const ProfileCurve& curve, int n_theta = 64);

/// Entropy of the normal deformation X + s f nu for each s in s_values.
/// Pure k = 0 variations deform the profile curve; variations containing
/// k >= 1 modes break rotational symmetry and are evaluated on a
/// theta-extended surface grid (circular orbits only).  Throws
/// InvalidProfile when the deformation stops being an immersion.
std::vector<double> entropy_along_variation(const ProfileCurve& curve,
                                            const std::vector<ModeFunction>& f,
                                            const std::vector<double>& s_values,
                                            int n_theta = 128);

}  // namespace shrinker
