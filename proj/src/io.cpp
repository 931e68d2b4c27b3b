#include "shrinker/io.hpp"

#include "shrinker/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace shrinker {

namespace {

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (long i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vector vector_from_json(const Json& j) {
  Vector v(static_cast<long>(j.size()));
  for (long i = 0; i < v.size(); ++i) v[i] = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

std::string parity_name(Parity p) { return p == Parity::Cos ? "cos" : "sin"; }

Parity parity_from_name(const std::string& name) {
  if (name == "cos") return Parity::Cos;
  if (name == "sin") return Parity::Sin;
  throw std::invalid_argument("mode_function_from_json: unknown parity " + name);
}

void require_schema(const Json& j, const char* what) {
  if (!j.contains("schema") || j["schema"].get<int>() != kSchemaVersion)
    throw std::invalid_argument(std::string(what) + ": unsupported schema version");
}

std::string fmt(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

}  // namespace

Json profile_to_json(const ProfileCurve& curve) {
  Json points = Json::array();
  for (const ProfilePoint& p : curve.points) points.push_back({p.x, p.r, p.phi});
  return {{"schema", kSchemaVersion}, {"n", curve.n},           {"m", curve.m},
          {"closed", curve.closed},   {"h", curve.h},           {"points", points}};
}

ProfileCurve profile_from_json(const Json& j) {
  require_schema(j, "profile_from_json");
  ProfileCurve curve;
  curve.n = j.at("n").get<int>();
  curve.m = j.at("m").get<int>();
  curve.closed = j.at("closed").get<bool>();
  curve.h = j.at("h").get<double>();
  for (const Json& p : j.at("points"))
    curve.points.push_back({p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()});
  return curve;
}

Json shooting_report_to_json(const ShootingReport& report) {
  return {{"schema", kSchemaVersion},
          {"r_star", report.r_star},
          {"converged", report.converged},
          {"mismatch_history", report.mismatch_history}};
}

Json spectrum_to_json(const Spectrum& spectrum) {
  Json funcs = Json::array();
  for (const Vector& u : spectrum.eigenfunctions) funcs.push_back(vector_to_json(u));
  return {{"schema", kSchemaVersion},
          {"k", spectrum.k},
          {"R", std::isfinite(spectrum.R) ? Json(spectrum.R) : Json("inf")},
          {"eigenvalues", spectrum.eigenvalues},
          {"eigenfunctions", funcs}};
}

Json sweep_to_json(const SpectralSweep& sweep) {
  return {{"schema", kSchemaVersion},   {"k", sweep.k},
          {"schedule", sweep.schedule}, {"mu1_values", sweep.mu1_values},
          {"mu1_limit", sweep.mu1_limit}, {"converged", sweep.converged}};
}

Json mode_function_to_json(const ModeFunction& mode) {
  return {{"schema", kSchemaVersion},
          {"k", mode.k},
          {"parity", parity_name(mode.parity)},
          {"u", vector_to_json(mode.u)}};
}

ModeFunction mode_function_from_json(const Json& j) {
  require_schema(j, "mode_function_from_json");
  ModeFunction mode;
  mode.k = j.at("k").get<int>();
  mode.parity = parity_from_name(j.at("parity").get<std::string>());
  mode.u = vector_from_json(j.at("u"));
  return mode;
}

namespace {

Json witness_to_json(const ModeFunction& mode, std::size_t max_witness) {
  const std::size_t size = static_cast<std::size_t>(mode.u.size());
  const std::size_t stride = std::max<std::size_t>(1, (size + max_witness - 1) / max_witness);
  Json samples = Json::array();
  for (std::size_t i = 0; i < size; i += stride) samples.push_back(mode.u[static_cast<long>(i)]);
  return {{"k", mode.k},
          {"parity", parity_name(mode.parity)},
          {"stride", stride},
          {"size", size},
          {"u", samples}};
}

}  // namespace

Json certificate_to_json(const IndexCertificate& cert, std::size_t max_witness) {
  Json trials = Json::array();
  for (const TrialResult& t : cert.trials)
    trials.push_back({{"alpha", t.alpha},
                      {"beta", t.beta},
                      {"gamma", t.gamma},
                      {"h_star", t.h_star},
                      {"y_star", {t.y_star.axial, t.y_star.rot_cos, t.y_star.rot_sin}},
                      {"value", t.value},
                      {"blocks", {t.block_a, t.block_b, t.block_c}},
                      {"unstable", t.unstable},
                      {"blocks_nonpositive", t.blocks_nonpositive}});
  return {{"schema", kSchemaVersion},
          {"curve_id", cert.curve_id},
          {"curve_hash", cert.curve_hash},
          {"residual", cert.residual},
          {"er_sign_change", cert.er_sign_change},
          {"h_sign_change", cert.h_sign_change},
          {"sweep_k0", sweep_to_json(cert.sweep_k0)},
          {"sweep_k1", sweep_to_json(cert.sweep_k1)},
          {"margin_k0", cert.margin_k0},
          {"margin_k1", cert.margin_k1},
          {"witnesses",
           {witness_to_json(cert.f0, max_witness), witness_to_json(cert.f1, max_witness),
            witness_to_json(cert.g1, max_witness)}},
          {"trials", trials},
          {"seed", cert.seed},
          {"compact_path", cert.compact_path},
          {"failure", cert.failure},
          {"verdict", cert.verdict}};
}

Json entropy_report_to_json(const EntropyReport& report) {
  return {{"schema", kSchemaVersion},
          {"lambda", report.lambda},
          {"argmax", {{"a", report.argmax.a}, {"rho", report.argmax.rho}, {"t0", report.argmax.t0}}},
          {"tail_bound", report.tail_bound},
          {"converged", report.converged}};
}

std::string profile_csv(const ProfileCurve& curve) {
  std::ostringstream out;
  out << "s,x,r,phi,H,A2\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const ProfilePoint& p = curve.points[i];
    out << fmt(static_cast<double>(i) * curve.h) << ',' << fmt(p.x) << ',' << fmt(p.r) << ','
        << fmt(p.phi) << ',' << fmt(mean_curvature(curve, i)) << ','
        << fmt(second_fundamental_norm(curve, i)) << '\n';
  }
  return out.str();
}

std::string sweep_csv(const std::vector<SpectralSweep>& sweeps) {
  std::ostringstream out;
  out << "k,R,mu1\n";
  for (const SpectralSweep& sweep : sweeps)
    for (std::size_t i = 0; i < sweep.schedule.size(); ++i)
      out << sweep.k << ',' << fmt(sweep.schedule[i]) << ',' << fmt(sweep.mu1_values[i]) << '\n';
  return out.str();
}

std::string operator_debug_csv(const ModeOperator& op) {
  std::ostringstream out;
  out << "s,r,w,V\n";
  for (long j = 0; j < static_cast<long>(op.size()); ++j)
    out << fmt(op.s[j]) << ',' << fmt(op.r[j]) << ',' << fmt(op.w[j]) << ',' << fmt(op.V[j])
        << '\n';
  return out.str();
}

std::string entropy_variation_csv(const std::vector<double>& s_values,
                                  const std::vector<double>& lambdas) {
  if (s_values.size() != lambdas.size())
    throw std::invalid_argument("entropy_variation_csv: length mismatch");
  std::ostringstream out;
  out << "s,lambda\n";
  for (std::size_t i = 0; i < s_values.size(); ++i)
    out << fmt(s_values[i]) << ',' << fmt(lambdas[i]) << '\n';
  return out.str();
}

namespace {

struct SvgFrame {
  double x_min, x_max, r_min, r_max, scale;
  static constexpr double kWidth = 800.0, kHeight = 440.0, kMargin = 40.0;

  static SvgFrame fit(double x_min, double x_max, double r_min, double r_max) {
    SvgFrame f{x_min, x_max, r_min, r_max, 1.0};
    const double sx = (kWidth - 2 * kMargin) / std::max(1e-12, x_max - x_min);
    const double sy = (kHeight - 2 * kMargin) / std::max(1e-12, r_max - r_min);
    f.scale = std::min(sx, sy);
    return f;
  }
  double px(double x) const { return kMargin + (x - x_min) * scale; }
  double py(double r) const { return kHeight - kMargin - (r - r_min) * scale; }
};

std::string polyline(const SvgFrame& f, const std::vector<std::pair<double, double>>& pts,
                     const char* color) {
  std::ostringstream out;
  out << "  <path fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" d=\"";
  for (std::size_t i = 0; i < pts.size(); ++i)
    out << (i == 0 ? 'M' : 'L') << f.px(pts[i].first) << ' ' << f.py(pts[i].second) << ' ';
  out << "\"/>\n";
  return out.str();
}

}  // namespace

std::string profile_svg(const ProfileCurve& curve, const std::vector<double>& radii) {
  double x_min = 0.0, x_max = 0.0, r_max = 1.0;
  for (const ProfilePoint& p : curve.points) {
    x_min = std::min(x_min, p.x);
    x_max = std::max(x_max, p.x);
    r_max = std::max(r_max, p.r);
  }
  for (double R : radii) {
    x_min = std::min(x_min, -R);
    x_max = std::max(x_max, R);
    r_max = std::max(r_max, R);
  }
  const SvgFrame f = SvgFrame::fit(x_min - 0.3, x_max + 0.3, -0.1, r_max + 0.3);
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << SvgFrame::kWidth
      << "\" height=\"" << SvgFrame::kHeight << "\">\n";
  out << "  <line x1=\"" << f.px(f.x_min) << "\" y1=\"" << f.py(0.0) << "\" x2=\""
      << f.px(f.x_max) << "\" y2=\"" << f.py(0.0) << "\" stroke=\"#888\" stroke-width=\"1\"/>\n";
  for (double R : radii) {
    // half circle |gamma| = R in the upper half-plane
    out << "  <path fill=\"none\" stroke=\"#bbb\" stroke-dasharray=\"4 3\" d=\"M" << f.px(-R)
        << ' ' << f.py(0.0) << " A" << R * f.scale << ' ' << R * f.scale << " 0 0 1 " << f.px(R)
        << ' ' << f.py(0.0) << "\"/>\n";
  }
  std::vector<std::pair<double, double>> pts;
  for (const ProfilePoint& p : curve.points) pts.emplace_back(p.x, p.r);
  out << polyline(f, pts, "#1f4e9c");
  out << "</svg>\n";
  return out.str();
}

std::string eigenfunction_svg(const ProfileCurve& curve, const Vector& u_nodes) {
  const long N = u_nodes.size();
  if (N + 1 != static_cast<long>(curve.size()))
    throw std::invalid_argument("eigenfunction_svg: node count mismatch");
  double x_min = 0.0, x_max = 0.0, r_max = 1.0;
  for (const ProfilePoint& p : curve.points) {
    x_min = std::min(x_min, p.x);
    x_max = std::max(x_max, p.x);
    r_max = std::max(r_max, p.r);
  }
  const SvgFrame f = SvgFrame::fit(x_min - 0.8, x_max + 0.8, -0.1, r_max + 0.8);
  const double amp = 0.35 / std::max(1e-12, u_nodes.cwiseAbs().maxCoeff());
  std::vector<std::pair<double, double>> base, offset;
  for (const ProfilePoint& p : curve.points) base.emplace_back(p.x, p.r);
  for (long j = 0; j < N; ++j) {
    // node j sits at the midpoint of segment j
    const ProfilePoint& a = curve.points[static_cast<std::size_t>(j)];
    const ProfilePoint& b = curve.points[static_cast<std::size_t>(j) + 1];
    const double phi = 0.5 * (a.phi + b.phi);
    const double d = amp * u_nodes[j];
    offset.emplace_back(0.5 * (a.x + b.x) - d * std::sin(phi),
                        std::max(0.0, 0.5 * (a.r + b.r) + d * std::cos(phi)));
  }
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << SvgFrame::kWidth
      << "\" height=\"" << SvgFrame::kHeight << "\">\n";
  out << "  <line x1=\"" << f.px(f.x_min) << "\" y1=\"" << f.py(0.0) << "\" x2=\""
      << f.px(f.x_max) << "\" y2=\"" << f.py(0.0) << "\" stroke=\"#888\" stroke-width=\"1\"/>\n";
  out << polyline(f, base, "#1f4e9c");
  out << polyline(f, offset, "#c03a2b");
  out << "</svg>\n";
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_file: cannot open " + path);
  out << content;
}

}  // namespace shrinker
