#include "shrinker/operator.hpp"

#include "shrinker/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace shrinker {

namespace {

// Periodic sample lookup with the tangent-angle winding offset; plain fields
// pass winding = 0.
double sample_at(const std::vector<double>& v, long i, bool closed, double winding) {
  const long ns = static_cast<long>(v.size()) - 1;  // distinct samples on closed curves
  if (!closed) return v[static_cast<std::size_t>(std::clamp(i, 0L, ns))];
  double off = 0.0;
  while (i < 0) {
    i += ns;
    off -= winding;
  }
  while (i >= ns) {
    i -= ns;
    off += winding;
  }
  return v[static_cast<std::size_t>(i)] + off;
}

// Cubic Lagrange value of sample data at the midpoint node j + 1/2.
double node_value(const std::vector<double>& v, long j, bool closed, double winding) {
  const long ns = static_cast<long>(v.size()) - 1;
  long j0 = j - 1;
  if (!closed) j0 = std::clamp(j0, 0L, ns - 3);
  const double t = static_cast<double>(j) + 0.5;
  double result = 0.0;
  for (long a = j0; a < j0 + 4; ++a) {
    double c = 1.0;
    for (long b = j0; b < j0 + 4; ++b)
      if (a != b) c *= (t - static_cast<double>(b)) / static_cast<double>(a - b);
    result += c * sample_at(v, a, closed, winding);
  }
  return result;
}

// Cubic Lagrange derivative (d/ds, grid units 1/h) at the midpoint node.
double node_deriv(const std::vector<double>& v, long j, bool closed, double winding, double h) {
  const long ns = static_cast<long>(v.size()) - 1;
  long j0 = j - 1;
  if (!closed) j0 = std::clamp(j0, 0L, ns - 3);
  const double t = static_cast<double>(j) + 0.5;
  double result = 0.0;
  for (long a = j0; a < j0 + 4; ++a) {
    double dc = 0.0;
    for (long b = j0; b < j0 + 4; ++b) {
      if (b == a) continue;
      double term = 1.0 / static_cast<double>(a - b);
      for (long cidx = j0; cidx < j0 + 4; ++cidx) {
        if (cidx == a || cidx == b) continue;
        term *= (t - static_cast<double>(cidx)) / static_cast<double>(a - cidx);
      }
      dc += term;
    }
    result += dc * sample_at(v, a, closed, winding);
  }
  return result / h;
}

bool is_dirichlet(BoundaryCondition b) {
  return b == BoundaryCondition::DirichletTruncation || b == BoundaryCondition::AxisDirichlet;
}

}  // namespace

double angular_factor(int k, int n) {
  if (k < 0) throw std::invalid_argument("angular_factor: k must be >= 0");
  if (k == 0) return 1.0;
  if (k == 1) return 1.0 / static_cast<double>(n);  // 1/(m+1), coordinate harmonics
  if (n == 2) return 0.5;                           // cos/sin modes on S^1
  throw std::invalid_argument("angular_factor: modes k >= 2 unsupported for n > 2");
}

Vector ModeOperator::apply(const Vector& u) const {
  const long N = static_cast<long>(size());
  if (u.size() != N) throw std::invalid_argument("apply: size mismatch");
  Vector out(N);
  for (long j = 0; j < N; ++j) {
    double v = stiff_diag[j] * u[j];
    if (j > 0) v += stiff_off[j - 1] * u[j - 1];
    if (j + 1 < N) v += stiff_off[j] * u[j + 1];
    out[j] = v;
  }
  if (periodic && N > 2) {
    out[0] += stiff_corner * u[N - 1];
    out[N - 1] += stiff_corner * u[0];
  }
  return out;
}

Vector ModeOperator::mass_apply(const Vector& u) const { return mass.cwiseProduct(u); }

double ModeOperator::bilinear(const Vector& u, const Vector& v) const {
  const long N = static_cast<long>(size());
  if (u.size() != N || v.size() != N) throw std::invalid_argument("bilinear: size mismatch");
  double acc = 0.0;
  for (long j = 0; j < N; ++j) acc += stiff_diag[j] * (u[j] * v[j]);
  for (long j = 0; j + 1 < N; ++j) acc += stiff_off[j] * (u[j] * v[j + 1] + u[j + 1] * v[j]);
  if (periodic && N > 2) acc += stiff_corner * (u[0] * v[N - 1] + u[N - 1] * v[0]);
  return acc;
}

double ModeOperator::quad(const Vector& u) const { return bilinear(u, u); }

double ModeOperator::mass_dot(const Vector& u, const Vector& v) const {
  if (u.size() != mass.size() || v.size() != mass.size())
    throw std::invalid_argument("mass_dot: size mismatch");
  return u.cwiseProduct(mass).dot(v);
}

Vector ModeOperator::to_nodes(const Vector& sample_values) const {
  const long N = static_cast<long>(size());
  if (sample_values.size() != N + 1) throw std::invalid_argument("to_nodes: expected sample data");
  std::vector<double> v(sample_values.data(), sample_values.data() + sample_values.size());
  Vector out(N);
  for (long j = 0; j < N; ++j) out[j] = node_value(v, j, periodic, 0.0);
  return out;
}

ModeOperator assemble_mode_operator(const ProfileCurve& curve, int k) {
  std::pair<BoundaryCondition, BoundaryCondition> bc;
  if (curve.closed) {
    bc = {BoundaryCondition::Periodic, BoundaryCondition::Periodic};
  } else {
    auto pick = [&](std::size_t i) {
      if (is_axis_endpoint(curve, i))
        return k == 0 ? BoundaryCondition::AxisEven : BoundaryCondition::AxisDirichlet;
      return BoundaryCondition::DirichletTruncation;
    };
    bc = {pick(0), pick(curve.size() - 1)};
  }
  return assemble_mode_operator(curve, k, bc);
}

ModeOperator assemble_mode_operator(const ProfileCurve& curve, int k,
                                    std::pair<BoundaryCondition, BoundaryCondition> bc) {
  if (k < 0) throw std::invalid_argument("assemble_mode_operator: k must be >= 0");
  if (curve.segments() < 5) throw InvalidProfile("assemble_mode_operator: curve too short");
  const bool per_lo = bc.first == BoundaryCondition::Periodic;
  const bool per_hi = bc.second == BoundaryCondition::Periodic;
  if (per_lo != per_hi) throw InvalidProfile("assemble_mode_operator: inconsistent periodic bc");
  if (per_lo != curve.closed)
    throw InvalidProfile("assemble_mode_operator: periodic bc requires a closed curve");
  if (!curve.closed) {
    auto check_axis = [&](BoundaryCondition b, std::size_t i) {
      const bool axis = is_axis_endpoint(curve, i);
      if ((b == BoundaryCondition::AxisEven || b == BoundaryCondition::AxisDirichlet) && !axis)
        throw InvalidProfile("assemble_mode_operator: axis bc at a non-axis endpoint");
      if (b == BoundaryCondition::AxisEven && k >= 1)
        throw InvalidProfile("assemble_mode_operator: axis_even requires k = 0");
      if (b == BoundaryCondition::AxisDirichlet && k == 0)
        throw InvalidProfile("assemble_mode_operator: axis_dirichlet requires k >= 1");
    };
    check_axis(bc.first, 0);
    check_axis(bc.second, curve.size() - 1);
  }

  ModeOperator op;
  op.k = k;
  op.n = curve.n;
  op.m = curve.m;
  op.theta_k = static_cast<double>(k) * static_cast<double>(k + curve.n - 2);
  op.h = curve.h;
  op.periodic = curve.closed;
  op.bc = bc;

  const long N = static_cast<long>(curve.segments());
  const WeightSpec spec = weight_spec(curve);
  const double C = spec.normalization;
  const double h = curve.h;

  std::vector<double> xs(curve.size()), rs(curve.size()), ps(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    xs[i] = curve.points[i].x;
    rs[i] = curve.points[i].r;
    ps[i] = curve.points[i].phi;
  }
  const double winding = curve.closed ? ps.back() - ps.front() : 0.0;

  op.wf.resize(N + 1);
  for (long i = 0; i <= N; ++i)
    op.wf[i] = C * std::pow(rs[static_cast<std::size_t>(i)], curve.m) *
               std::exp(-0.25 * (xs[static_cast<std::size_t>(i)] * xs[static_cast<std::size_t>(i)] +
                                 rs[static_cast<std::size_t>(i)] * rs[static_cast<std::size_t>(i)]));

  op.s.resize(N);
  op.x.resize(N);
  op.r.resize(N);
  op.phi.resize(N);
  op.kappa.resize(N);
  op.H.resize(N);
  op.A2.resize(N);
  op.V.resize(N);
  op.w.resize(N);
  for (long j = 0; j < N; ++j) {
    op.s[j] = (static_cast<double>(j) + 0.5) * h;
    op.x[j] = node_value(xs, j, curve.closed, 0.0);
    op.r[j] = node_value(rs, j, curve.closed, 0.0);
    op.phi[j] = node_value(ps, j, curve.closed, winding);
    op.kappa[j] = node_deriv(ps, j, curve.closed, winding, h);
    if (!(op.r[j] > 0.0)) throw InvalidProfile("assemble_mode_operator: nonpositive node radius");
    const double cr = std::cos(op.phi[j]) / op.r[j];
    op.H[j] = -op.kappa[j] + curve.m * cr;
    op.A2[j] = op.kappa[j] * op.kappa[j] + curve.m * cr * cr;
    op.V[j] = op.A2[j] + 0.5 - op.theta_k / (op.r[j] * op.r[j]);
    op.w[j] = C * std::pow(op.r[j], curve.m) *
              std::exp(-0.25 * (op.x[j] * op.x[j] + op.r[j] * op.r[j]));
  }

  op.stiff_diag.resize(N);
  op.stiff_off.resize(N - 1);
  op.mass.resize(N);
  for (long j = 0; j < N; ++j) {
    double flux = 0.0;
    if (curve.closed) {
      flux = (op.wf[j] + op.wf[j + 1]) / h;
    } else {
      if (j > 0) flux += op.wf[j] / h;
      if (j + 1 < N) flux += op.wf[j + 1] / h;
      if (j == 0 && is_dirichlet(bc.first)) flux += 2.0 * op.wf[0] / h;
      if (j + 1 == N && is_dirichlet(bc.second)) flux += 2.0 * op.wf[N] / h;
    }
    op.stiff_diag[j] = flux - op.w[j] * op.V[j] * h;
    op.mass[j] = op.w[j] * h;
    if (!(op.mass[j] > 0.0)) throw InvalidProfile("assemble_mode_operator: nonpositive mass entry");
  }
  for (long j = 0; j + 1 < N; ++j) op.stiff_off[j] = -op.wf[j + 1] / h;
  op.stiff_corner = curve.closed ? -op.wf[0] / h : 0.0;
  return op;
}

KnownEigenfunction known_eigenfunction(const ProfileCurve& curve, KnownMode which) {
  const long ns = static_cast<long>(curve.size());
  KnownEigenfunction out;
  out.u.resize(ns);
  switch (which) {
    case KnownMode::Dilation:
      out.k = 0;
      out.mu = -1.0;
      // H through the shrinker identity H = (1/2) gamma . nu: exact on
      // shrinker profiles and free of finite-difference noise (the curvature
      // stencil would amplify the tiny closure defect of shot orbits)
      for (long i = 0; i < ns; ++i) {
        const ProfilePoint& p = curve.points[static_cast<std::size_t>(i)];
        out.u[i] = 0.5 * (-p.x * std::sin(p.phi) + p.r * std::cos(p.phi));
      }
      break;
    case KnownMode::AxialTranslation:
      out.k = 0;
      out.mu = -0.5;
      for (long i = 0; i < ns; ++i)
        out.u[i] = -std::sin(curve.points[static_cast<std::size_t>(i)].phi);
      break;
    case KnownMode::RotationalTranslation:
      out.k = 1;
      out.mu = -0.5;
      for (long i = 0; i < ns; ++i)
        out.u[i] = std::cos(curve.points[static_cast<std::size_t>(i)].phi);
      break;
  }
  return out;
}

double residual_check(const ModeOperator& op, const Vector& u, double lambda) {
  const long N = static_cast<long>(op.size());
  if (u.size() != N) throw std::invalid_argument("residual_check: u not on the operator grid");
  const double scale = u.cwiseAbs().maxCoeff();
  if (scale == 0.0) throw std::invalid_argument("residual_check: zero function");
  const Vector su = op.apply(u);
  long lo = op.periodic ? 0 : 3;
  long hi = op.periodic ? N : N - 3;
  if (!op.periodic) {
    // exclude the axis boundary layer: the staggered scheme's pointwise
    // truncation is O(h^2 / r), so a fixed-width layer keeps the interior
    // residual uniformly O(h^2)
    const double layer = 0.05 * op.r.maxCoeff();
    const auto is_axis = [](BoundaryCondition b) {
      return b == BoundaryCondition::AxisEven || b == BoundaryCondition::AxisDirichlet;
    };
    if (is_axis(op.bc.first))
      while (lo < hi && op.r[lo] < layer) ++lo;
    if (is_axis(op.bc.second))
      while (hi > lo && op.r[hi - 1] < layer) --hi;
  }
  double worst = 0.0;
  for (long j = lo; j < hi; ++j)
    worst = std::max(worst, std::abs(-su[j] / op.mass[j] + lambda * u[j]));
  return worst / scale;
}

}  // namespace shrinker
