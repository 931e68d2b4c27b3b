#pragma once

#include "shrinker/types.hpp"

#include <utility>

namespace shrinker {

enum class BoundaryCondition { DirichletTruncation, AxisDirichlet, AxisEven, Periodic };

/// Discrete stability operator for the Fourier mode k on a profile curve.
///
/// Cell-centered flux-form scheme: unknowns live on the N = segments()
/// midpoint nodes s_j = (j + 1/2) h; flux weights live on the curve samples.
/// The stiffness array represents the quadratic form of -L_k,
///   u^T S u = [ (u')^2 - V u^2 ]'  (+ wall penalties for Dirichlet data),
/// so the pencil S u = mu M u carries the eigenvalues in the convention
/// L_k u + mu u = 0 (dilations at mu = -1, translations at mu = -1/2).
/// Symmetry of S is exact by construction.  1/r^2 is only evaluated at nodes
/// (r >= h/2 near the axis); at axis endpoints the flux weight vanishes
/// identically, so both axis conditions are encoded without ghost values.
struct ModeOperator {
  int k = 0;
  int n = 2;
  int m = 1;
  double theta_k = 0.0;  ///< angular eigenvalue k (k + n - 2)
  double h = 0.0;
  bool periodic = false;
  std::pair<BoundaryCondition, BoundaryCondition> bc{BoundaryCondition::DirichletTruncation,
                                                     BoundaryCondition::DirichletTruncation};

  // node-centered geometry and coefficients (size N)
  Vector s, x, r, phi, kappa, H, A2, V, w;
  Vector wf;  ///< flux weights at the curve samples (size N + 1)

  Vector stiff_diag;  ///< size N
  Vector stiff_off;   ///< size N - 1
  double stiff_corner = 0.0;  ///< cyclic coupling (periodic operators only)
  Vector mass;  ///< size N, strictly positive

  std::size_t size() const { return static_cast<std::size_t>(mass.size()); }

  Vector apply(const Vector& u) const;       ///< S u
  Vector mass_apply(const Vector& u) const;  ///< M u
  /// u^T S v evaluated in a manifestly symmetric grouping, so
  /// bilinear(u, v) == bilinear(v, u) bit for bit.
  double bilinear(const Vector& u, const Vector& v) const;
  double quad(const Vector& u) const;        ///< u^T S u
  double mass_dot(const Vector& u, const Vector& v) const;

  /// Fourth-order interpolation of per-sample data onto the node grid.
  Vector to_nodes(const Vector& sample_values) const;
};

/// Assemble with the automatic boundary policy: periodic on closed curves,
/// axis conditions (even for k = 0, Dirichlet for k >= 1) at axis endpoints,
/// Dirichlet at truncation endpoints.
ModeOperator assemble_mode_operator(const ProfileCurve& curve, int k);

/// Assemble with an explicit boundary pair; throws InvalidProfile on a
/// bc/topology mismatch (periodic on open curves, axis conditions on closed
/// curves or non-axis endpoints).
ModeOperator assemble_mode_operator(const ProfileCurve& curve, int k,
                                    std::pair<BoundaryCondition, BoundaryCondition> bc);

enum class KnownMode { Dilation, AxialTranslation, RotationalTranslation };

/// Analytically known eigenfunctions, given per curve sample:
/// dilation -> (k = 0, u = H, mu = -1); axial translation ->
/// (k = 0, u = nu . e_axis, mu = -1/2); rotational (transverse) translation
/// -> (k = 1, u = nu . e_r, mu = -1/2).
struct KnownEigenfunction {
  int k = 0;
  double mu = 0.0;
  Vector u;  ///< per curve sample
};
KnownEigenfunction known_eigenfunction(const ProfileCurve& curve, KnownMode which);

/// max over interior nodes of |L_k u + lambda u| / max |u| under the discrete
/// operator.  A few cells adjacent to each open boundary are excluded (wall
/// penalties and the axis cell carry the boundary condition, which analytic
/// eigenfunctions of the full problem need not satisfy).  At axis endpoints a
/// boundary layer of nodes with r < 0.05 max(r) is also excluded: the
/// staggered scheme's pointwise truncation error there is O(h^2 / r), so only
/// outside that layer is the nodal residual uniformly second order.
double residual_check(const ModeOperator& op, const Vector& u, double lambda);

/// Mean of the squared angular eigenfunction over the orbit sphere S^m:
/// 1 for k = 0, 1/(m+1) for k = 1 (coordinate harmonics y . e).
double angular_factor(int k, int n);

}  // namespace shrinker
