#pragma once

#include "shrinker/spectra.hpp"
#include "shrinker/types.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace shrinker {

/// A single Fourier block of a variation function f = u(s) cos(k theta)
/// (or sin).  u is given per curve sample.
struct ModeFunction {
  int k = 0;
  Parity parity = Parity::Cos;
  Vector u;
};

/// Spacetime translation split by Fourier block: one axial component (k = 0)
/// and the two components in the rotation plane (k = 1 cos / sin).  For the
/// rotationally symmetric profiles treated here this parametrization spans
/// every translation direction that pairs nontrivially with f.
struct SpacetimeVector {
  double axial = 0.0;
  double rot_cos = 0.0;
  double rot_sin = 0.0;
};

/// Second variation of F at the shrinker: [-f L f + 2 f h H - h^2 H^2
/// + f (y . n) - 1/2 (y . n)^2]', evaluated blockwise per Fourier mode
/// (cross terms between distinct (k, parity) blocks vanish identically).
double second_variation(const ProfileCurve& curve, const std::vector<ModeFunction>& f, double h,
                        const SpacetimeVector& y);

/// Closed-form maximizer of the concave quadratic in (h, y):
/// h* = [fH]/[H^2], y* from the (diagonal) per-block Gram system; degenerate
/// blocks resolve to zero.
std::pair<double, SpacetimeVector> optimize_spacetime(const ProfileCurve& curve,
                                                      const std::vector<ModeFunction>& f);

struct VariationAssessment {
  std::vector<ModeFunction> f;
  double h_star = 0.0;
  SpacetimeVector y_star;
  double value = 0.0;
  bool unstable = false;
};

/// Assessment at the optimal (h, y); unstable iff the optimized value is
/// below -stability_tol.
VariationAssessment is_unstable(const ProfileCurve& curve, const std::vector<ModeFunction>& f,
                                double stability_tol = 1e-9);

/// True iff u takes values below -tol and above +tol at samples with r > 0.
bool sign_change(const ProfileCurve& curve, const Vector& u, double tol = 1e-6);

struct CertifyOptions {
  std::vector<double> schedule = default_schedule();
  double margin_tol = 1e-3;
  double stability_tol = 1e-9;
  double plateau_tol = 1e-6;
  int trials = 64;
  std::uint64_t seed = 20240816;
  std::string curve_id = "profile";
};

struct TrialResult {
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  double h_star = 0.0;
  SpacetimeVector y_star;
  double value = 0.0;
  double block_a = 0.0, block_b = 0.0, block_c = 0.0;
  bool unstable = false;
  bool blocks_nonpositive = false;
};

struct IndexCertificate {
  std::string curve_id;
  std::uint64_t curve_hash = 0;
  double residual = 0.0;
  bool er_sign_change = false;
  bool h_sign_change = false;
  SpectralSweep sweep_k0, sweep_k1;
  double margin_k0 = 0.0;  ///< -1 - mu1_limit(0)
  double margin_k1 = 0.0;  ///< -1/2 - mu1_limit(1)
  ModeFunction f0, f1, g1;
  std::vector<TrialResult> trials;
  std::uint64_t seed = 0;
  bool compact_path = false;
  std::string failure;  ///< empty when verdict = 3
  int verdict = 0;
};

/// Full F-index >= 3 certification pipeline: shrinker-residual gate, sign
/// change hypotheses, spectral sweeps with margins, witness extraction,
/// random-combination trials, and the blockwise A/B/C decomposition check.
IndexCertificate certify_index(const ProfileCurve& curve, const CertifyOptions& options = {});

/// Weighted pairings [H (e_i . n)] for the axial and the two rotation-plane
/// directions, per truncation radius (single entry at R = inf for compact
/// surfaces, i.e. closed curves or open curves with both ends on the axis);
/// near zero on shrinkers: the axial pairing by eigenfunction orthogonality,
/// the rotation-plane pairings exactly by the orbit integral of cos/sin.
struct OrthogonalityRow {
  double R = 0.0;
  std::array<double, 3> pairings{};  ///< axial, rot cos, rot sin
};
std::vector<OrthogonalityRow> orthogonality_report(const ProfileCurve& curve,
                                                   const std::vector<double>& R_schedule);

/// FNV-1a hash of the sample data (used to tie certificates to curves).
std::uint64_t curve_hash(const ProfileCurve& curve);

}  // namespace shrinker
