// Copyright 2026 The dqw Authors
// SPDX-License-Identifier: Apache-2.0

#include "dqw/decomposition.hpp"

#include <algorithm>
#include <cmath>

namespace dqw {

namespace {

// (e^{i d t} - 1) / (i d) written without cancellation for small d.
Complex phase_integral(double d, double t, double eps) {
  if (std::abs(d) <= eps) return t;
  return (2.0 * std::sin(0.5 * d * t) / d) * std::exp(kI * (0.5 * d * t));
}

}  // namespace

IntegratedPump integrated_pump(const EigenPump& eigpump, const EigenSystem& eig, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("integrated_pump: t must be >= 0");
  const int n = eig.size();
  const double eps = 1e-12 * std::max(eig.frequencies.cwiseAbs().maxCoeff(), 1e-300);
  IntegratedPump zp;
  zp.drive = eigpump.drive;
  zp.walk_time = t;
  const CMatrix& tr = eig.transform;
  if (eigpump.drive == DriveType::Lasing) {
    if (eigpump.lasing.size() != n) throw std::invalid_argument("integrated_pump: dimension mismatch");
    zp.lasing.resize(n);
    for (int k = 0; k < n; ++k) zp.lasing[k] = eigpump.lasing[k] * phase_integral(eigpump.mismatch[k], t, eps);
    zp.lasing_physical = tr.adjoint() * zp.lasing;
  } else {
    if (eigpump.squeezing.rows() != n) throw std::invalid_argument("integrated_pump: dimension mismatch");
    zp.squeezing.resize(n, n);
    for (int k = 0; k < n; ++k)
      for (int kp = 0; kp < n; ++kp)
        zp.squeezing(k, kp) = eigpump.squeezing(k, kp) * phase_integral(eigpump.pair_mismatch(k, kp), t, eps);
    zp.squeezing = 0.5 * (zp.squeezing + zp.squeezing.transpose()).eval();
    zp.squeezing_physical = tr.adjoint() * zp.squeezing * tr.conjugate();
    zp.squeezing_physical = 0.5 * (zp.squeezing_physical + zp.squeezing_physical.transpose()).eval();
  }
  return zp;
}

GaussianState effective_input_state(const IntegratedPump& zp, const EigenSystem& eig) {
  const int n = eig.size();
  if (zp.drive == DriveType::Lasing) {
    if (zp.lasing.size() != n) throw std::invalid_argument("effective_input_state: dimension mismatch");
    const CVector eigen_mean = -kI * zp.lasing;
    return GaussianState::coherent(eig.transform.adjoint() * eigen_mean);
  }
  if (zp.squeezing.rows() != n) throw std::invalid_argument("effective_input_state: dimension mismatch");
  if (zp.squeezing_physical.isZero(0.0)) return GaussianState::vacuum(n);

  // exp(-i (sum z a^dag a^dag + h.c.)) is the unit-time flow of a constant
  // squeezing drive with profile z on an uncoupled graph.
  const CouplingGraph free_modes(SparseCMatrix(n, n));
  PumpConfig generator;
  generator.drive = DriveType::Squeezing;
  generator.squeezing_profile = zp.squeezing_physical;
  generator.pump_frequency = 0.0;
  generator.amplitude_scale = 1.0;
  const double strength = zp.squeezing_physical.norm();
  const long steps = std::max<long>(1000, static_cast<long>(std::ceil(1000.0 * strength)));
  GaussianState out = GaussianState::vacuum(n);
  evolve_driven_observed(free_modes, generator, 1.0, 1.0 / static_cast<double>(steps), std::nullopt, steps,
                         [&](double, const GaussianState& s) { out = s; });
  return out;
}

GaussianState decompose_run(const CouplingGraph& graph, const EigenSystem& eig, const PumpConfig& pump, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("decompose_run: t must be >= 0");
  if (pump.n_modes() != graph.n_modes() || eig.size() != graph.n_modes())
    throw std::invalid_argument("decompose_run: dimension mismatch");
  if (t == 0.0) return GaussianState::vacuum(graph.n_modes());
  const auto zp = integrated_pump(pump_to_eigenbasis(pump, eig), eig, t);
  return evolve_passive(eig, effective_input_state(zp, eig), t);
}

GaussianState decompose_run(const CouplingGraph& graph, const PumpConfig& pump, double t) {
  return decompose_run(graph, diagonalize(graph), pump, t);
}

DecompositionReport decomposition_error(const CouplingGraph& graph, const PumpConfig& pump, double t, double dt) {
  const auto eig = diagonalize(graph);
  const GaussianState factorized = decompose_run(graph, eig, pump, t);
  GaussianState direct = GaussianState::vacuum(graph.n_modes());
  evolve_driven_observed(graph, pump, t, dt, std::nullopt, 1 << 30, [&](double, const GaussianState& s) { direct = s; });

  DecompositionReport r;
  r.drive = pump.drive;
  r.n_modes = graph.n_modes();
  r.gamma0 = pump.amplitude_scale;
  r.pump_frequency = pump.pump_frequency;
  r.walk_time = t;
  r.dt = dt;
  const RVector nd = direct.photon_numbers();
  const RVector nf = factorized.photon_numbers();
  r.max_photon_difference = (nd - nf).cwiseAbs().maxCoeff();
  r.total_photons_direct = nd.sum();
  r.relative_total_difference = nd.sum() > 0.0 ? std::abs(nd.sum() - nf.sum()) / nd.sum() : std::abs(nf.sum());
  r.max_mean_difference = (direct.mean - factorized.mean).cwiseAbs().maxCoeff();
  return r;
}

}  // namespace dqw
