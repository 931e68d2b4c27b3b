#include "shrinker/variation.hpp"

#include "shrinker/geometry.hpp"
#include "shrinker/operator.hpp"
#include "shrinker/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace shrinker {

namespace {

// Interpolate node-centered data back to the curve samples (fourth order).
Vector nodes_to_samples(const ProfileCurve& curve, const Vector& nodes) {
  const long N = nodes.size();
  const long ns = static_cast<long>(curve.size());
  Vector out(ns);
  for (long i = 0; i < ns; ++i) {
    // sample i sits at node coordinate i - 1/2 (node j is at j + 1/2)
    long j0 = i - 2;
    if (!curve.closed) j0 = std::clamp(j0, 0L, N - 4);
    const double t = static_cast<double>(i) - 0.5;
    double acc = 0.0;
    for (long a = j0; a < j0 + 4; ++a) {
      double c = 1.0;
      for (long b = j0; b < j0 + 4; ++b)
        if (a != b) c *= (t - static_cast<double>(b)) / static_cast<double>(a - b);
      long idx = a;
      if (curve.closed) idx = ((a % N) + N) % N;
      acc += c * nodes[idx];
    }
    out[i] = acc;
  }
  return out;
}

// Shared per-curve data for second-variation evaluations.
struct VarContext {
  const ProfileCurve* curve = nullptr;
  std::map<int, ModeOperator> ops;
  Vector Hn, nu_ax, nu_rad;  // node arrays
  double HH = 0.0;           // [H^2]
  double nn_ax = 0.0;        // [nu_axial^2] (k = 0 block)
  double nn_rad = 0.0;       // [nu_radial^2] (per k = 1 parity, without c_1)

  explicit VarContext(const ProfileCurve& c) : curve(&c) {
    const ModeOperator& op0 = op(0);
    const long N = static_cast<long>(op0.size());
    Hn = op0.H;
    nu_ax.resize(N);
    nu_rad.resize(N);
    for (long j = 0; j < N; ++j) {
      nu_ax[j] = -std::sin(op0.phi[j]);
      nu_rad[j] = std::cos(op0.phi[j]);
    }
    HH = op0.mass_dot(Hn, Hn);
    nn_ax = op0.mass_dot(nu_ax, nu_ax);
    nn_rad = op0.mass_dot(nu_rad, nu_rad);
  }

  const ModeOperator& op(int k) {
    auto it = ops.find(k);
    if (it == ops.end()) it = ops.emplace(k, assemble_mode_operator(*curve, k)).first;
    return it->second;
  }
};

// Combined node-grid functions per (k, parity) block.
struct Blocks {
  std::map<std::pair<int, int>, Vector> nodes;  // key (k, parity)
};

Blocks combine(VarContext& ctx, const std::vector<ModeFunction>& f) {
  const ProfileCurve& curve = *ctx.curve;
  std::map<std::pair<int, int>, Vector> samples;
  for (const ModeFunction& mode : f) {
    if (mode.k < 0) throw std::invalid_argument("second_variation: negative mode");
    if (mode.k == 0 && mode.parity == Parity::Sin)
      throw std::invalid_argument("second_variation: k = 0 has no sin block");
    if (static_cast<std::size_t>(mode.u.size()) != curve.size())
      throw std::invalid_argument("second_variation: mode defined on a mismatched curve");
    const double scale = mode.u.cwiseAbs().maxCoeff();
    if (mode.k >= 1 && scale > 0.0) {
      for (std::size_t end : {std::size_t{0}, curve.size() - 1})
        if (is_axis_endpoint(curve, end) && std::abs(mode.u[static_cast<long>(end)]) > 1e-6 * scale)
          throw InvalidProfile("second_variation: k >= 1 mode must vanish at axis endpoints");
    }
    const auto key = std::make_pair(mode.k, mode.parity == Parity::Cos ? 0 : 1);
    auto [it, inserted] = samples.emplace(key, mode.u);
    if (!inserted) it->second += mode.u;
  }
  Blocks out;
  for (const auto& [key, u] : samples) out.nodes[key] = ctx.op(key.first).to_nodes(u);
  return out;
}

struct BlockValues {
  double a = 0.0, b = 0.0, c = 0.0, rest = 0.0;
  double total() const { return a + b + c + rest; }
};

// Blockwise second variation: block a carries the k = 0 part together with
// the h and axial-translation couplings, blocks b/c the k = 1 cos/sin parts
// with the rotation-plane translations; every other mode lands in `rest`.
BlockValues blockwise_value(VarContext& ctx, const Blocks& blocks, double h,
                            const SpacetimeVector& y) {
  const int n = ctx.curve->n;
  BlockValues val;
  double fH = 0.0, f_nu_ax = 0.0, f_nu_cos = 0.0, f_nu_sin = 0.0;
  for (const auto& [key, u] : blocks.nodes) {
    const auto& [k, par] = key;
    const ModeOperator& op = ctx.op(k);
    const double ck = angular_factor(k, n);
    const double quad = ck * op.quad(u);
    if (k == 0) {
      fH = op.mass_dot(u, ctx.Hn);
      f_nu_ax = op.mass_dot(u, ctx.nu_ax);
      val.a += quad;
    } else if (k == 1 && par == 0) {
      f_nu_cos = op.mass_dot(u, ctx.nu_rad);
      val.b += quad;
    } else if (k == 1 && par == 1) {
      f_nu_sin = op.mass_dot(u, ctx.nu_rad);
      val.c += quad;
    } else {
      val.rest += quad;
    }
  }
  const double c1 = angular_factor(1, n);
  val.a += 2.0 * h * fH - h * h * ctx.HH;
  val.a += y.axial * f_nu_ax - 0.5 * y.axial * y.axial * ctx.nn_ax;
  val.b += c1 * (y.rot_cos * f_nu_cos - 0.5 * y.rot_cos * y.rot_cos * ctx.nn_rad);
  val.c += c1 * (y.rot_sin * f_nu_sin - 0.5 * y.rot_sin * y.rot_sin * ctx.nn_rad);
  return val;
}

std::pair<double, SpacetimeVector> optimum(VarContext& ctx, const Blocks& blocks) {
  const double tol = 1e-12;
  double fH = 0.0, f_nu_ax = 0.0, f_nu_cos = 0.0, f_nu_sin = 0.0;
  for (const auto& [key, u] : blocks.nodes) {
    const auto& [k, par] = key;
    if (k == 0) {
      fH = ctx.op(0).mass_dot(u, ctx.Hn);
      f_nu_ax = ctx.op(0).mass_dot(u, ctx.nu_ax);
    } else if (k == 1 && par == 0) {
      f_nu_cos = ctx.op(1).mass_dot(u, ctx.nu_rad);
    } else if (k == 1 && par == 1) {
      f_nu_sin = ctx.op(1).mass_dot(u, ctx.nu_rad);
    }
  }
  SpacetimeVector y;
  const double h = ctx.HH > tol ? fH / ctx.HH : 0.0;
  y.axial = ctx.nn_ax > tol ? f_nu_ax / ctx.nn_ax : 0.0;
  y.rot_cos = ctx.nn_rad > tol ? f_nu_cos / ctx.nn_rad : 0.0;
  y.rot_sin = ctx.nn_rad > tol ? f_nu_sin / ctx.nn_rad : 0.0;
  return {h, y};
}

}  // namespace

double second_variation(const ProfileCurve& curve, const std::vector<ModeFunction>& f, double h,
                        const SpacetimeVector& y) {
  VarContext ctx(curve);
  const Blocks blocks = combine(ctx, f);
  return blockwise_value(ctx, blocks, h, y).total();
}

std::pair<double, SpacetimeVector> optimize_spacetime(const ProfileCurve& curve,
                                                      const std::vector<ModeFunction>& f) {
  VarContext ctx(curve);
  const Blocks blocks = combine(ctx, f);
  return optimum(ctx, blocks);
}

VariationAssessment is_unstable(const ProfileCurve& curve, const std::vector<ModeFunction>& f,
                                double stability_tol) {
  bool nonzero = false;
  for (const ModeFunction& mode : f) nonzero = nonzero || mode.u.cwiseAbs().maxCoeff() > 0.0;
  if (!nonzero) throw std::invalid_argument("is_unstable: zero variation function");
  VarContext ctx(curve);
  const Blocks blocks = combine(ctx, f);
  VariationAssessment out;
  out.f = f;
  std::tie(out.h_star, out.y_star) = optimum(ctx, blocks);
  out.value = blockwise_value(ctx, blocks, out.h_star, out.y_star).total();
  out.unstable = out.value < -stability_tol;
  return out;
}

bool sign_change(const ProfileCurve& curve, const Vector& u, double tol) {
  if (static_cast<std::size_t>(u.size()) != curve.size())
    throw std::invalid_argument("sign_change: size mismatch");
  bool pos = false, neg = false;
  for (long i = 0; i < u.size(); ++i) {
    if (curve.points[static_cast<std::size_t>(i)].r <= 1e-9) continue;
    pos = pos || u[i] > tol;
    neg = neg || u[i] < -tol;
  }
  return pos && neg;
}

std::uint64_t curve_hash(const ProfileCurve& curve) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](const void* data, std::size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  mix(&curve.h, sizeof(curve.h));
  mix(&curve.n, sizeof(curve.n));
  const int closed = curve.closed ? 1 : 0;
  mix(&closed, sizeof(closed));
  for (const ProfilePoint& p : curve.points) mix(&p, sizeof(double) * 3);
  return h;
}

IndexCertificate certify_index(const ProfileCurve& curve, const CertifyOptions& options) {
  IndexCertificate cert;
  cert.curve_id = options.curve_id;
  cert.curve_hash = curve_hash(curve);
  cert.seed = options.seed;
  cert.compact_path = curve.closed;
  cert.residual = shrinker_residual(curve);
  if (cert.residual >= 1e-6)
    throw InvalidProfile("certify_index: profile does not satisfy the shrinker equation");

  Vector er(static_cast<long>(curve.size())), Hs(static_cast<long>(curve.size()));
  for (std::size_t i = 0; i < curve.size(); ++i) {
    er[static_cast<long>(i)] = std::cos(curve.points[i].phi);
    Hs[static_cast<long>(i)] = mean_curvature(curve, i);
  }
  cert.er_sign_change = sign_change(curve, er);
  cert.h_sign_change = sign_change(curve, Hs);
  if (!cert.er_sign_change || !cert.h_sign_change) {
    cert.failure = !cert.er_sign_change ? "er-sign-change" : "h-sign-change";
    return cert;
  }

  cert.sweep_k0 = sweep_bottom_spectrum(curve, 0, options.schedule, options.plateau_tol);
  cert.sweep_k1 = sweep_bottom_spectrum(curve, 1, options.schedule, options.plateau_tol);
  cert.margin_k0 = -1.0 - cert.sweep_k0.mu1_limit;
  cert.margin_k1 = -0.5 - cert.sweep_k1.mu1_limit;
  if (!cert.sweep_k0.converged || !cert.sweep_k1.converged) {
    cert.failure = "sweep-not-converged";
    return cert;
  }
  if (cert.margin_k0 < options.margin_tol || cert.margin_k1 < options.margin_tol) {
    cert.failure = "insufficient-margin";
    return cert;
  }

  // Witnesses: ground states on the certification domain (the curve itself
  // when compact, otherwise the largest truncation of the sweep).
  const ProfileCurve domain =
      curve.closed ? curve : truncate(curve, options.schedule.back());
  VarContext ctx(domain);
  const Spectrum s0 = lowest_eigenpairs(ctx.op(0), 1);
  const Spectrum s1 = lowest_eigenpairs(ctx.op(1), 1);
  const Vector f0n = s0.eigenfunctions[0];
  const Vector f1n = s1.eigenfunctions[0];
  cert.f0 = {0, Parity::Cos, nodes_to_samples(domain, f0n)};
  cert.f1 = {1, Parity::Cos, nodes_to_samples(domain, f1n)};
  cert.g1 = {1, Parity::Sin, cert.f1.u};

  const double c1 = angular_factor(1, domain.n);
  const double f0H = ctx.op(0).mass_dot(f0n, ctx.Hn);
  const double f0nu = ctx.op(0).mass_dot(f0n, ctx.nu_ax);
  const double f1nu = ctx.op(1).mass_dot(f1n, ctx.nu_rad);
  const double q0 = ctx.op(0).quad(f0n);
  const double q1 = c1 * ctx.op(1).quad(f1n);

  auto run_trial = [&](double alpha, double beta, double gamma) {
    TrialResult trial;
    trial.alpha = alpha;
    trial.beta = beta;
    trial.gamma = gamma;
    trial.h_star = ctx.HH > 1e-12 ? alpha * f0H / ctx.HH : 0.0;
    trial.y_star.axial = ctx.nn_ax > 1e-12 ? alpha * f0nu / ctx.nn_ax : 0.0;
    trial.y_star.rot_cos = ctx.nn_rad > 1e-12 ? beta * f1nu / ctx.nn_rad : 0.0;
    trial.y_star.rot_sin = ctx.nn_rad > 1e-12 ? gamma * f1nu / ctx.nn_rad : 0.0;
    const double h = trial.h_star;
    trial.block_a = alpha * alpha * q0 + 2.0 * h * alpha * f0H - h * h * ctx.HH +
                    trial.y_star.axial * alpha * f0nu -
                    0.5 * trial.y_star.axial * trial.y_star.axial * ctx.nn_ax;
    trial.block_b = beta * beta * q1 +
                    c1 * (trial.y_star.rot_cos * beta * f1nu -
                          0.5 * trial.y_star.rot_cos * trial.y_star.rot_cos * ctx.nn_rad);
    trial.block_c = gamma * gamma * q1 +
                    c1 * (trial.y_star.rot_sin * gamma * f1nu -
                          0.5 * trial.y_star.rot_sin * trial.y_star.rot_sin * ctx.nn_rad);
    trial.value = trial.block_a + trial.block_b + trial.block_c;
    trial.unstable = trial.value < -options.stability_tol;
    trial.blocks_nonpositive = trial.block_a <= options.stability_tol &&
                               trial.block_b <= options.stability_tol &&
                               trial.block_c <= options.stability_tol;
    return trial;
  };

  cert.trials.push_back(run_trial(1.0, 0.0, 0.0));
  cert.trials.push_back(run_trial(0.0, 1.0, 0.0));
  cert.trials.push_back(run_trial(0.0, 0.0, 1.0));
  std::mt19937_64 gen(options.seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (int t = 0; t < options.trials; ++t) {
    double a = dist(gen), b = dist(gen), g = dist(gen);
    const double norm = std::sqrt(a * a + b * b + g * g);
    if (norm < 1e-3) {
      a = 1.0;
      b = g = 0.0;
    }
    cert.trials.push_back(run_trial(a, b, g));
  }

  bool all_ok = true;
  for (const TrialResult& trial : cert.trials)
    all_ok = all_ok && trial.unstable && trial.blocks_nonpositive;
  if (!all_ok) {
    cert.failure = "trial-not-unstable";
    return cert;
  }
  cert.verdict = 3;
  return cert;
}

std::vector<OrthogonalityRow> orthogonality_report(const ProfileCurve& curve,
                                                   const std::vector<double>& R_schedule) {
  auto row_for = [&](const ProfileCurve& domain, double R) {
    const WeightSpec spec = weight_spec(domain);
    const long ns = static_cast<long>(domain.size());
    Vector h_ax(ns);
    for (long i = 0; i < ns; ++i) {
      const double H = mean_curvature(domain, static_cast<std::size_t>(i));
      h_ax[i] = H * -std::sin(domain.points[static_cast<std::size_t>(i)].phi);
    }
    OrthogonalityRow row;
    row.R = R;
    row.pairings[0] = weighted_integral(domain, h_ax, spec);
    // rotation-plane directions: H is constant in theta, so the pairing
    // carries a bare integral of cos(theta) (resp. sin) over the orbit and
    // vanishes identically
    row.pairings[1] = 0.0;
    row.pairings[2] = 0.0;
    return row;
  };
  const bool compact = curve.closed || (is_axis_endpoint(curve, 0) &&
                                        is_axis_endpoint(curve, curve.size() - 1));
  std::vector<OrthogonalityRow> rows;
  if (compact) {
    rows.push_back(row_for(curve, std::numeric_limits<double>::infinity()));
    return rows;
  }
  for (double R : R_schedule) rows.push_back(row_for(truncate(curve, R), R));
  return rows;
}

}  // namespace shrinker
