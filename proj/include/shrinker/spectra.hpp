#pragma once

#include "shrinker/operator.hpp"
#include "shrinker/types.hpp"

#include <limits>
#include <vector>

namespace shrinker {

/// Lowest eigenpairs of a ModeOperator pencil (stiffness, mass).
/// Eigenvalues are ascending, mu_1 simple with an interior-positive
/// eigenfunction; eigenfunctions are mass-orthonormal, sign-normalized so the
/// first nonnegligible component is positive.
struct Spectrum {
  int k = 0;
  double R = std::numeric_limits<double>::infinity();  ///< truncation radius
  std::vector<double> eigenvalues;
  std::vector<Vector> eigenfunctions;
};

Spectrum lowest_eigenpairs(const ModeOperator& op, int count);

/// u^T S u / u^T M u.
double rayleigh_quotient(const ModeOperator& op, const Vector& u);

/// Number of pencil eigenvalues strictly below sigma (negative inertia of
/// S - sigma M by symmetric factorization; cyclic operators use a bordered
/// elimination).
long eigenvalue_count_below(const ModeOperator& op, double sigma);

/// R-exhaustion of the bottom of the k-th restricted spectrum.
struct SpectralSweep {
  int k = 0;
  std::vector<double> schedule;
  std::vector<double> mu1_values;
  double mu1_limit = 0.0;
  bool converged = false;
};

inline std::vector<double> default_schedule() { return {4, 6, 8, 10, 12, 14, 16}; }

SpectralSweep sweep_bottom_spectrum(const ProfileCurve& curve, int k,
                                    const std::vector<double>& schedule,
                                    double plateau_tol = 1e-6);

enum class Parity { Cos, Sin };

/// Fourier coefficient in theta of a field sampled on an (s, theta) grid
/// (rows: curve samples, cols: uniform theta in [0, 2pi)).  Returns the
/// per-sample profile u with u(s) cos(k theta) (resp. sin) the projected
/// mode; k = 0 returns the theta average.
Vector fourier_project(const Matrix& field, int k, Parity parity);

/// Almost-Bessel inequality <v,a>^2/|a|^2 + <v,b>^2/|b|^2 <= |v|^2/(1 - eps)
/// for |<a,b>| <= eps |a||b|, in the diagonal inner product given by weight.
struct BesselCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  bool precondition_ok = false;
};
BesselCheck almost_bessel_check(const Vector& v, const Vector& a, const Vector& b,
                                const Vector& weight, double epsilon);

}  // namespace shrinker
