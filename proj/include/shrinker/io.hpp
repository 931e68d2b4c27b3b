#pragma once

#include "shrinker/functional.hpp"
#include "shrinker/operator.hpp"
#include "shrinker/profiles.hpp"
#include "shrinker/spectra.hpp"
#include "shrinker/variation.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace shrinker {

using Json = nlohmann::json;

/// Schema version stamped into every JSON artifact.
inline constexpr int kSchemaVersion = 1;

/// {schema, n, m, closed, h, points: [[x, r, phi], ...]}; doubles round-trip
/// bitwise through dump/parse.
Json profile_to_json(const ProfileCurve& curve);
ProfileCurve profile_from_json(const Json& j);

Json shooting_report_to_json(const ShootingReport& report);

Json spectrum_to_json(const Spectrum& spectrum);
Json sweep_to_json(const SpectralSweep& sweep);

Json mode_function_to_json(const ModeFunction& mode);
ModeFunction mode_function_from_json(const Json& j);

/// Certificate bundle: hypotheses, sweeps with margins, RNG seed, trial
/// table, and witness eigenfunctions downsampled to at most max_witness
/// samples (full witnesses are written separately by the CLI).
Json certificate_to_json(const IndexCertificate& cert, std::size_t max_witness = 512);

Json entropy_report_to_json(const EntropyReport& report);

/// CSV exports (17-significant-digit values).
std::string profile_csv(const ProfileCurve& curve);                       // s,x,r,phi,H,A2
std::string sweep_csv(const std::vector<SpectralSweep>& sweeps);          // k,R,mu1
std::string operator_debug_csv(const ModeOperator& op);                   // s,r,w,V
std::string entropy_variation_csv(const std::vector<double>& s_values,
                                  const std::vector<double>& lambdas);    // s,lambda

/// Half-plane plot of the profile with the symmetry axis and the B_R
/// truncation circles; plain path elements, no external dependencies.
std::string profile_svg(const ProfileCurve& curve, const std::vector<double>& radii = {});

/// Profile with the node-valued eigenfunction u overlaid as a normal offset.
std::string eigenfunction_svg(const ProfileCurve& curve, const Vector& u_nodes);

void write_file(const std::string& path, const std::string& content);

}  // namespace shrinker
