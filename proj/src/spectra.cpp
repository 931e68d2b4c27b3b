#include "shrinker/spectra.hpp"

#include "shrinker/profiles.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>

namespace shrinker {

namespace {

// Negative inertia of the symmetric (cyclic) tridiagonal T = S - sigma M via
// LDL^T elimination; the cyclic corner is handled by tracking the fill of the
// last column while eliminating variables 0..N-2.
long inertia_below(const Vector& diag, const Vector& off, double corner, bool periodic,
                   const Vector& mass, double sigma) {
  const long N = diag.size();
  const double scale = diag.cwiseAbs().maxCoeff() + off.cwiseAbs().maxCoeff() +
                       sigma * mass.cwiseAbs().maxCoeff() + std::abs(corner);
  const double tiny = 1e-40 * std::max(scale, 1e-300);
  auto t = [&](long j) { return diag[j] - sigma * mass[j]; };
  auto guard = [&](double d) { return std::abs(d) < tiny ? -tiny : d; };

  long neg = 0;
  if (!periodic) {
    double d = guard(t(0));
    neg += d < 0;
    for (long j = 1; j < N; ++j) {
      d = guard(t(j) - off[j - 1] * off[j - 1] / d);
      neg += d < 0;
    }
    return neg;
  }

  double cur_d = guard(t(0));
  double cur_f = corner;
  double acc = t(N - 1);
  for (long i = 0; i + 1 < N; ++i) {
    if (i + 2 == N) {
      const double coupling = off[N - 2] + cur_f;
      neg += cur_d < 0;
      acc -= coupling * coupling / cur_d;
      neg += guard(acc) < 0;
      break;
    }
    neg += cur_d < 0;
    acc -= cur_f * cur_f / cur_d;
    const double next_d = t(i + 1) - off[i] * off[i] / cur_d;
    const double next_f = -off[i] * cur_f / cur_d;
    cur_d = guard(next_d);
    cur_f = next_f;
  }
  return neg;
}

struct GershgorinBounds {
  double lo, hi;
};

GershgorinBounds pencil_bounds(const ModeOperator& op) {
  const long N = static_cast<long>(op.size());
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (long j = 0; j < N; ++j) {
    const double alpha = op.stiff_diag[j] / op.mass[j];
    double radius = 0.0;
    if (j > 0) radius += std::abs(op.stiff_off[j - 1]) / std::sqrt(op.mass[j] * op.mass[j - 1]);
    if (j + 1 < N) radius += std::abs(op.stiff_off[j]) / std::sqrt(op.mass[j] * op.mass[j + 1]);
    if (op.periodic && (j == 0 || j + 1 == N))
      radius += std::abs(op.stiff_corner) / std::sqrt(op.mass[0] * op.mass[N - 1]);
    lo = std::min(lo, alpha - radius);
    hi = std::max(hi, alpha + radius);
  }
  return {lo, hi};
}

Eigen::SparseMatrix<double> shifted_matrix(const ModeOperator& op, double sigma) {
  const long N = static_cast<long>(op.size());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(3 * N));
  for (long j = 0; j < N; ++j) {
    trips.emplace_back(j, j, op.stiff_diag[j] - sigma * op.mass[j]);
    if (j + 1 < N) {
      trips.emplace_back(j, j + 1, op.stiff_off[j]);
      trips.emplace_back(j + 1, j, op.stiff_off[j]);
    }
  }
  if (op.periodic && N > 2) {
    trips.emplace_back(0, N - 1, op.stiff_corner);
    trips.emplace_back(N - 1, 0, op.stiff_corner);
  }
  Eigen::SparseMatrix<double> A(N, N);
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

void sign_normalize(Vector& u) {
  const double scale = u.cwiseAbs().maxCoeff();
  for (long j = 0; j < u.size(); ++j) {
    if (std::abs(u[j]) > 1e-6 * scale) {
      if (u[j] < 0.0) u = -u;
      return;
    }
  }
}

}  // namespace

long eigenvalue_count_below(const ModeOperator& op, double sigma) {
  return inertia_below(op.stiff_diag, op.stiff_off, op.stiff_corner, op.periodic, op.mass, sigma);
}

double rayleigh_quotient(const ModeOperator& op, const Vector& u) {
  const double nn = op.mass_dot(u, u);
  if (!(nn > 0.0)) throw std::invalid_argument("rayleigh_quotient: zero function");
  return op.quad(u) / nn;
}

Spectrum lowest_eigenpairs(const ModeOperator& op, int count) {
  const long N = static_cast<long>(op.size());
  if (count < 1) throw std::invalid_argument("lowest_eigenpairs: count must be >= 1");
  if (N < 3) throw EmptyDomain("lowest_eigenpairs: grid too small");
  if (count > static_cast<int>(N)) throw std::invalid_argument("lowest_eigenpairs: count > grid");

  Spectrum spec;
  spec.k = op.k;
  const GershgorinBounds bounds = pencil_bounds(op);

  // Sturm-sequence bisection for the `count` smallest pencil eigenvalues.
  spec.eigenvalues.resize(static_cast<std::size_t>(count));
  for (int i = 1; i <= count; ++i) {
    double lo = bounds.lo, hi = bounds.hi;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (eigenvalue_count_below(op, mid) >= i)
        hi = mid;
      else
        lo = mid;
      if (hi - lo < 1e-14 * std::max(1.0, std::abs(mid))) break;
    }
    spec.eigenvalues[static_cast<std::size_t>(i - 1)] = 0.5 * (lo + hi);
  }

  // Shifted inverse iteration for eigenvectors, with mass-orthogonalization
  // against the previously found ones (robust for cyclic near-multiplicity).
  spec.eigenfunctions.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double lambda = spec.eigenvalues[static_cast<std::size_t>(i)];
    double delta = 0.0;
    Vector u;
    bool ok = false;
    for (int attempt = 0; attempt < 4 && !ok; ++attempt) {
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
      lu.compute(shifted_matrix(op, lambda + delta));
      if (lu.info() != Eigen::Success) {
        delta = (delta == 0.0) ? 1e-10 * (1.0 + std::abs(lambda)) : delta * 100.0;
        continue;
      }
      Vector y(N);
      for (long j = 0; j < N; ++j) y[j] = 1.0 + 0.5 * std::sin(0.7 * static_cast<double>(j + 1));
      double best = std::numeric_limits<double>::infinity();
      for (int it = 0; it < 12; ++it) {
        for (const Vector& prev : spec.eigenfunctions) y -= op.mass_dot(prev, y) * prev;
        Vector z = lu.solve(op.mass_apply(y));
        const double nn = std::sqrt(op.mass_dot(z, z));
        if (!(nn > 0.0) || !z.allFinite()) break;
        z /= nn;
        const double resid = (op.apply(z) - lambda * op.mass_apply(z)).norm() /
                             op.mass_apply(z).norm();
        if (resid < best) {
          best = resid;
          u = z;
        }
        y = z;
        if (best < 1e-11) break;  // well under the 1e-9 contract
      }
      ok = best < 1e-9;
      if (!ok) {
        delta = (delta == 0.0) ? 1e-10 * (1.0 + std::abs(lambda)) : delta * 100.0;
      }
    }
    if (!ok) throw SolverFailure("lowest_eigenpairs: inverse iteration did not converge");
    for (const Vector& prev : spec.eigenfunctions) u -= op.mass_dot(prev, u) * prev;
    u /= std::sqrt(op.mass_dot(u, u));
    sign_normalize(u);
    spec.eigenfunctions.push_back(u);
  }
  return spec;
}

SpectralSweep sweep_bottom_spectrum(const ProfileCurve& curve, int k,
                                    const std::vector<double>& schedule, double plateau_tol) {
  if (schedule.empty()) throw std::invalid_argument("sweep_bottom_spectrum: empty schedule");
  for (std::size_t i = 1; i < schedule.size(); ++i)
    if (schedule[i] <= schedule[i - 1])
      throw std::invalid_argument("sweep_bottom_spectrum: schedule must increase");

  SpectralSweep sweep;
  sweep.k = k;
  if (curve.closed) {
    const ModeOperator op = assemble_mode_operator(curve, k);
    const Spectrum spec = lowest_eigenpairs(op, 1);
    sweep.schedule = {std::numeric_limits<double>::infinity()};
    sweep.mu1_values = {spec.eigenvalues[0]};
    sweep.mu1_limit = spec.eigenvalues[0];
    sweep.converged = true;
    return sweep;
  }
  for (double R : schedule) {
    const ProfileCurve domain = truncate(curve, R);
    const ModeOperator op = assemble_mode_operator(domain, k);
    const Spectrum spec = lowest_eigenpairs(op, 1);
    sweep.schedule.push_back(R);
    sweep.mu1_values.push_back(spec.eigenvalues[0]);
  }
  sweep.mu1_limit = sweep.mu1_values.back();
  const std::size_t nvals = sweep.mu1_values.size();
  sweep.converged = nvals >= 2 && std::abs(sweep.mu1_values[nvals - 1] -
                                           sweep.mu1_values[nvals - 2]) < plateau_tol;
  return sweep;
}

Vector fourier_project(const Matrix& field, int k, Parity parity) {
  const long T = field.cols();
  if (k < 0) throw std::invalid_argument("fourier_project: k must be >= 0");
  if (T < 4 * k + 4) throw std::invalid_argument("fourier_project: theta grid too coarse");
  Vector basis(T);
  for (long t = 0; t < T; ++t) {
    const double theta = 2.0 * M_PI * static_cast<double>(t) / static_cast<double>(T);
    basis[t] = parity == Parity::Cos ? std::cos(k * theta) : std::sin(k * theta);
  }
  const double norm = (k == 0) ? (parity == Parity::Cos ? 1.0 : 0.0)
                               : 2.0 / static_cast<double>(T);
  if (k == 0 && parity == Parity::Cos) return field.rowwise().mean();
  return norm * (field * basis);
}

BesselCheck almost_bessel_check(const Vector& v, const Vector& a, const Vector& b,
                                const Vector& weight, double epsilon) {
  auto ip = [&](const Vector& p, const Vector& q) { return p.cwiseProduct(weight).dot(q); };
  const double na2 = ip(a, a), nb2 = ip(b, b), nv2 = ip(v, v);
  if (!(na2 > 0.0) || !(nb2 > 0.0))
    throw std::invalid_argument("almost_bessel_check: a, b must be nonzero");
  BesselCheck out;
  out.precondition_ok = std::abs(ip(a, b)) <= epsilon * std::sqrt(na2 * nb2) + 1e-14;
  const double va = ip(v, a), vb = ip(v, b);
  out.lhs = va * va / na2 + vb * vb / nb2;
  out.rhs = epsilon < 1.0 ? nv2 / (1.0 - epsilon) : std::numeric_limits<double>::infinity();
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-12) + 1e-300;
  return out;
}

}  // namespace shrinker
