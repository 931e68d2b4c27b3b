#pragma once

#include "shrinker/types.hpp"

namespace shrinker {

/// Signed curvature kappa = d phi / ds at sample i, centered finite
/// difference (wrap-around on closed curves).  Throws std::out_of_range at
/// the endpoints of open curves; use curvature_one_sided there.
double curvature(const ProfileCurve& curve, std::size_t i);

/// Curvature at any sample, falling back to one-sided stencils at the
/// endpoints of open curves.
double curvature_one_sided(const ProfileCurve& curve, std::size_t i);

/// Mean curvature H = -kappa + m (nu . e_r) / r with nu = (-sin phi, cos phi).
/// At axis endpoints the smooth limit H = -(1 + m) kappa is used.
double mean_curvature(const ProfileCurve& curve, std::size_t i);

/// |A|^2 = kappa^2 + m (nu . e_r)^2 / r^2, axis-endpoint limit (1+m) kappa^2.
double second_fundamental_norm(const ProfileCurve& curve, std::size_t i);

/// Max over interior samples of |H - (1/2) gamma . nu|; vanishes (to
/// discretization order) exactly on shrinker profiles.
double shrinker_residual(const ProfileCurve& curve);

/// Quotient-level normal components (nu . e_axis, nu . e_r).
struct NormalComponents {
  double axial = 0.0;
  double radial = 0.0;
};
NormalComponents normal_components(const ProfileCurve& curve, std::size_t i);

/// Per-sample quadrature weights for [.]' including the normalization
/// constant, composite trapezoid on the arc-length grid.
Vector sample_weights(const ProfileCurve& curve, const WeightSpec& spec);

/// Weighted integral [f]' = normalization * int f r^m e^{-|gamma|^2/4} ds.
double weighted_integral(const ProfileCurve& curve, const Vector& f, const WeightSpec& spec);

/// Gaussian tail bound for the part of [1]' outside radius R (open,
/// noncompact profiles truncated at |gamma| = R).
double truncation_tail_bound(const ProfileCurve& curve, double R);

/// Reverse the traversal direction (negates kappa, nu, H).
ProfileCurve reversed(const ProfileCurve& curve);

}  // namespace shrinker
