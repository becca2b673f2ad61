// Copyright 2026 The dqw Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "dqw/dynamics.hpp"
#include "dqw/spectral.hpp"

namespace dqw {

/// Time integral of the interaction-picture pump in the eigenbasis, with its
/// physical-basis image (z_phys = T^dag z for lasing, T^dag z conj(T) for squeezing).
struct IntegratedPump {
  DriveType drive = DriveType::Lasing;
  CVector lasing;
  CMatrix squeezing;
  CVector lasing_physical;
  CMatrix squeezing_physical;
  double walk_time = 0.0;
};

/// z = S (e^{i Delta t} - 1)/(i Delta), or S t when |Delta| <= 1e-12 max|Omega|.
IntegratedPump integrated_pump(const EigenPump& eigpump, const EigenSystem& eig, double t);

/// State prepared by the drive alone, in the physical basis. Lasing: coherent
/// state with eigenbasis mean -i z. Squeezing: exp(-i (sum z A^dag A^dag + h.c.))|0>,
/// exponentiated by the moment integrator (C = 0, constant profile, unit time).
GaussianState effective_input_state(const IntegratedPump& zp, const EigenSystem& eig);

/// Passive walk of the effective input state: the factorized form of the
/// driven walk from vacuum. No integration of the drive is involved.
GaussianState decompose_run(const CouplingGraph& graph, const PumpConfig& pump, double t);
GaussianState decompose_run(const CouplingGraph& graph, const EigenSystem& eig, const PumpConfig& pump, double t);

struct DecompositionReport {
  DriveType drive = DriveType::Lasing;
  int n_modes = 0;
  double gamma0 = 0.0;
  double pump_frequency = 0.0;
  double walk_time = 0.0;
  double dt = 0.0;
  double max_photon_difference = 0.0;    // max_j |n_j(direct) - n_j(factorized)|
  double relative_total_difference = 0.0;
  double max_mean_difference = 0.0;
  double total_photons_direct = 0.0;
};

/// Compares decompose_run against evolve_driven at the same t.
DecompositionReport decomposition_error(const CouplingGraph& graph, const PumpConfig& pump, double t, double dt);

}  // namespace dqw
