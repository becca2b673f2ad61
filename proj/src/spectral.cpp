// Copyright 2026 The dqw Authors
// SPDX-License-Identifier: Apache-2.0

#include "dqw/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>
#include <sstream>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace dqw {

double EigenSystem::unitarity_error() const {
  const CMatrix g = transform * transform.adjoint();
  return (g - CMatrix::Identity(size(), size())).cwiseAbs().maxCoeff();
}

double EigenSystem::diagonalization_error(const CouplingGraph& graph) const {
  const CMatrix c = graph.dense();
  const double scale = std::max(c.cwiseAbs().maxCoeff(), 1e-300);
  CMatrix d = transform * c * transform.adjoint();
  d.diagonal() -= frequencies.cast<Complex>();
  return d.cwiseAbs().maxCoeff() / scale;
}

void apply_phase_convention(CMatrix& transform) {
  for (Eigen::Index k = 0; k < transform.rows(); ++k) {
    const double top = transform.row(k).cwiseAbs().maxCoeff();
    if (top == 0.0) continue;
    Eigen::Index pivot = 0;
    while (std::abs(transform(k, pivot)) < top * (1.0 - 1e-9)) ++pivot;
    const Complex v = transform(k, pivot);
    transform.row(k) *= std::conj(v) / std::abs(v);
    transform(k, pivot) = std::abs(v);
  }
}

namespace {

EigenSystem finish(RVector w, CMatrix transform) {
  apply_phase_convention(transform);
  return EigenSystem{std::move(w), std::move(transform)};
}

EigenSystem solve_real(RMatrix a) {
  const auto n = static_cast<lapack_int>(a.rows());
  RVector w(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, a.data(), n, w.data());
  if (info != 0) {
    std::ostringstream os;
    os << "eigensolver failed for a " << n << "x" << n << " real symmetric matrix (dsyevd info " << info << ")";
    throw NumericalError(os.str());
  }
  return finish(std::move(w), a.transpose().cast<Complex>());
}

EigenSystem solve_complex(CMatrix a) {
  const auto n = static_cast<lapack_int>(a.rows());
  RVector w(n);
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n, a.data(), n, w.data());
  if (info != 0) {
    std::ostringstream os;
    os << "eigensolver failed for a " << n << "x" << n << " Hermitian matrix (zheevd info " << info << ")";
    throw NumericalError(os.str());
  }
  return finish(std::move(w), a.adjoint());
}

}  // namespace

EigenSystem diagonalize_matrix(const CMatrix& hermitian) {
  if (hermitian.rows() != hermitian.cols() || hermitian.rows() == 0)
    throw std::invalid_argument("diagonalize: matrix must be square and non-empty");
  if (hermitian.imag().cwiseAbs().maxCoeff() == 0.0) return solve_real(hermitian.real());
  return solve_complex(hermitian);
}

EigenSystem diagonalize(const CouplingGraph& graph) {
  const int n = graph.n_modes();
  EigenSystem eig;
  if (graph.is_real()) {
    RMatrix a = RMatrix::Zero(n, n);
    const auto& c = graph.coupling();
    for (int k = 0; k < c.outerSize(); ++k)
      for (SparseCMatrix::InnerIterator it(c, k); it; ++it) a(it.row(), it.col()) = it.value().real();
    eig = solve_real(std::move(a));
  } else {
    eig = solve_complex(graph.dense());
  }

  // Residual ||C T^dag - T^dag diag(Omega)|| through the sparse coupling, cheap at any size.
  double residual = 0.0;
  constexpr int kBlock = 256;
  for (int b = 0; b < n; b += kBlock) {
    const int nb = std::min(kBlock, n - b);
    const CMatrix v = eig.transform.middleRows(b, nb).adjoint();
    CMatrix r = graph.coupling() * v;
    r -= v * eig.frequencies.segment(b, nb).cast<Complex>().asDiagonal();
    residual = std::max(residual, r.cwiseAbs().maxCoeff());
  }
  double cmax = 0.0;
  for (int k = 0; k < graph.coupling().outerSize(); ++k)
    for (SparseCMatrix::InnerIterator it(graph.coupling(), k); it; ++it) cmax = std::max(cmax, std::abs(it.value()));
  if (residual > 1e-9 * std::max(cmax, 1.0)) {
    std::ostringstream os;
    os << "eigensolver residual " << residual << " too large for a " << n << "x" << n << " coupling matrix";
    throw NumericalError(os.str());
  }
  return eig;
}

EigenSystem chain_eigensystem_analytic(int n, double onsite, double coupling) {
  if (n < 1) throw std::invalid_argument("chain_eigensystem_analytic: n must be >= 1");
  const double pi = std::numbers::pi;
  RVector omega(n);
  CMatrix t(n, n);
  const double norm = std::sqrt(2.0 / (n + 1));
  for (int j = 1; j <= n; ++j) {
    omega[j - 1] = onsite + 2.0 * coupling * std::cos(j * pi / (n + 1));
    for (int k = 1; k <= n; ++k) t(j - 1, k - 1) = norm * std::sin(static_cast<double>(j) * k * pi / (n + 1));
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return omega[a] < omega[b]; });
  RVector w(n);
  CMatrix sorted(n, n);
  for (int i = 0; i < n; ++i) {
    w[i] = omega[order[i]];
    sorted.row(i) = t.row(order[i]);
  }
  return finish(std::move(w), std::move(sorted));
}

int chain_mode_position(int j, int n, double coupling) {
  if (j < 1 || j > n) throw std::invalid_argument("chain_mode_position: j out of range");
  return coupling >= 0.0 ? n - j : j - 1;
}

double chebyshev_u(int degree, double x) {
  if (degree < 0) return 0.0;
  double prev = 1.0, cur = 2.0 * x;
  if (degree == 0) return prev;
  for (int k = 1; k < degree; ++k) {
    const double next = 2.0 * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

std::vector<double> defect_chain_eigenvalues(int depth) {
  if (depth < 1) throw std::invalid_argument("defect_chain_eigenvalues: depth must be >= 1");
  auto f = [depth](double x) { return chebyshev_u(depth, x) - chebyshev_u(depth - 1, x); };
  const int points = 16 * depth;
  std::vector<double> roots;
  double xa = -1.0, fa = f(xa);
  for (int g = 1; g <= points; ++g) {
    const double xb = -1.0 + 2.0 * g / points;
    const double fb = f(xb);
    if (fa == 0.0) {
      roots.push_back(xa);
    } else if (fa * fb < 0.0) {
      double lo = xa, hi = xb, flo = fa;
      while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    xa = xb;
    fa = fb;
  }
  if (fa == 0.0) roots.push_back(xa);
  if (static_cast<int>(roots.size()) != depth) {
    std::ostringstream os;
    os << "defect_chain_eigenvalues: bracketed " << roots.size() << " roots of U_" << depth << " - U_" << depth - 1
       << " on [-1, 1] with " << points << " grid intervals, expected " << depth;
    throw NumericalError(os.str());
  }
  return roots;
}

namespace {

double max_nearest_distance(const std::vector<double>& values, const RVector& spectrum) {
  double worst = 0.0;
  for (double v : values) worst = std::max(worst, (spectrum.array() - v).abs().minCoeff());
  return worst;
}

}  // namespace

ChebyshevMappingReport validate_chebyshev_mapping(int depth) {
  ChebyshevMappingReport report;
  report.depth = depth;
  report.roots = defect_chain_eigenvalues(depth);
  const auto defect = diagonalize(build_reduced_glued_trees(depth, 1.0 / std::numbers::sqrt2));
  report.best_residual = std::numeric_limits<double>::infinity();
  for (double scale : {1.0, std::numbers::sqrt2, 2.0, 2.0 * std::numbers::sqrt2}) {
    std::vector<double> mapped;
    for (double x : report.roots) mapped.push_back(scale * x);
    const double r = max_nearest_distance(mapped, defect.frequencies);
    if (r < report.best_residual) {
      report.best_residual = r;
      report.best_scale = scale;
    }
  }
  report.matched = report.best_residual <= 1e-9;

  std::vector<double> doubled;
  for (double x : report.roots) doubled.push_back(2.0 * x);
  report.uniform_chain_residual =
      max_nearest_distance(doubled, chain_eigensystem_analytic(2 * depth, 0.0, 1.0).frequencies);
  return report;
}

EigenPump pump_to_eigenbasis(const PumpConfig& pump, const EigenSystem& eig) {
  pump.validate();
  const int n = eig.size();
  if (pump.n_modes() != n) throw std::invalid_argument("pump_to_eigenbasis: pump and eigensystem dimensions differ");
  EigenPump out;
  out.drive = pump.drive;
  out.pump_frequency = pump.pump_frequency;
  const auto& t = eig.transform;
  if (pump.drive == DriveType::Lasing) {
    out.lasing = pump.amplitude_scale * (t * pump.lasing_profile);
    out.mismatch = eig.frequencies.array() - pump.pump_frequency;
  } else {
    CMatrix s = pump.amplitude_scale * (t * pump.squeezing_profile * t.transpose());
    out.squeezing = 0.5 * (s + s.transpose());
    out.pair_mismatch.resize(n, n);
    for (int k = 0; k < n; ++k)
      for (int kp = 0; kp < n; ++kp)
        out.pair_mismatch(k, kp) = eig.frequencies[k] + eig.frequencies[kp] - pump.pump_frequency;
  }
  return out;
}

bool PhaseMatchedSet::contains(int k) const { return std::find(modes.begin(), modes.end(), k) != modes.end(); }

bool PhaseMatchedSet::contains(int k, int kp) const {
  const auto p = std::make_pair(std::min(k, kp), std::max(k, kp));
  return std::find(pairs.begin(), pairs.end(), p) != pairs.end();
}

PhaseMatchedSet phase_matched_set(const EigenPump& eigpump, double tolerance) {
  if (tolerance < 0.0) throw std::invalid_argument("phase_matched_set: tolerance must be >= 0");
  PhaseMatchedSet out;
  if (eigpump.drive == DriveType::Lasing) {
    for (int k = 0; k < eigpump.mismatch.size(); ++k)
      if (std::abs(eigpump.mismatch[k]) <= tolerance) out.modes.push_back(k);
  } else {
    const auto n = eigpump.pair_mismatch.rows();
    for (int k = 0; k < n; ++k)
      for (int kp = k; kp < n; ++kp)
        if (std::abs(eigpump.pair_mismatch(k, kp)) <= tolerance) out.pairs.emplace_back(k, kp);
  }
  return out;
}

}  // namespace dqw
