// Copyright 2026 The dqw Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "dqw/graphs.hpp"
#include "dqw/pump.hpp"
#include "dqw/spectral.hpp"
#include "dqw/types.hpp"

namespace dqw {

/// Multimode Gaussian state in centred complex moments:
///   mean_j         = <a_j>
///   number_jk      = <a_j^dag a_k> - conj(mean_j) mean_k     (Hermitian, PSD)
///   anomalous_jk   = <a_j a_k> - mean_j mean_k                (symmetric)
struct GaussianState {
  CVector mean;
  CMatrix number;
  CMatrix anomalous;
  Basis basis = Basis::Physical;

  static GaussianState vacuum(int n_modes, Basis basis = Basis::Physical);
  static GaussianState coherent(CVector mean, Basis basis = Basis::Physical);

  int n_modes() const { return static_cast<int>(mean.size()); }
  bool is_vacuum() const;
  /// <a_j^dag a_j> in the state's own basis.
  RVector photon_numbers() const;
  double total_photons() const;
};

/// Quadrature covariance, ordering (x_1..x_n, p_1..p_n), vacuum variance 1/2.
RMatrix quadrature_covariance(const GaussianState& state);
/// Symplectic eigenvalues of the quadrature covariance, ascending.
RVector symplectic_eigenvalues(const GaussianState& state);

struct StateDiagnostics {
  double min_number_eigenvalue = 0.0;
  double anomalous_asymmetry = 0.0;
  double number_hermiticity = 0.0;
  double min_physicality_eigenvalue = 0.0;  // of sigma + (i/2) Omega
  double purity_deviation = 0.0;            // max |nu_k - 1/2|
};

StateDiagnostics diagnose_state(const GaussianState& state);
/// Throws ValidationError when the state breaks its invariants.
void validate_state(const GaussianState& state);

/// mean -> U mean, number -> conj(U) N U^T, anomalous -> U M U^T.
GaussianState transform_state(const GaussianState& state, const CMatrix& u, Basis result_basis);
GaussianState to_eigenbasis(const GaussianState& state, const EigenSystem& eig);
GaussianState to_physical_basis(const GaussianState& state, const EigenSystem& eig);

struct GaussianTrajectory {
  std::vector<double> times;
  std::vector<GaussianState> states;
  PumpConfig pump;
  std::shared_ptr<const CouplingGraph> graph;
};

/// 1e-3 * 2 pi / max |Omega| for the given graph.
double default_time_step(const CouplingGraph& graph);

using StateObserver = std::function<void(double time, const GaussianState& state)>;

/// Integrates the Heisenberg moment equations of
///   da/dt = -i C a - i g(t) - 2 i G(t) a^dag
/// with fixed-step RK4. The observer sees t = 0, every `record_every`-th step,
/// and t_final. Lasing from vacuum touches only the mean.
void evolve_driven_observed(const CouplingGraph& graph, const PumpConfig& pump, double t_final, double dt,
                            const std::optional<GaussianState>& initial, int record_every,
                            const StateObserver& observer);

GaussianTrajectory evolve_driven(const CouplingGraph& graph, const PumpConfig& pump, double t_final, double dt,
                                 const std::optional<GaussianState>& initial = std::nullopt, int record_every = 1);

/// Passive walk exp(-i C t) applied through the eigendecomposition.
GaussianState evolve_passive(const CouplingGraph& graph, const GaussianState& state, double t);
GaussianState evolve_passive(const EigenSystem& eig, const GaussianState& state, double t);

/// exp(-i C t) as a dense matrix.
CMatrix passive_propagator(const EigenSystem& eig, double t);

/// Brute-force reference: the same time-dependent Hamiltonian on a truncated
/// Fock space (at most 3 modes, cutoff^n <= 1e6), RK4 on the state vector.
/// Returns <a_j^dag a_j>. Throws CutoffTooSmall if the top level ever holds
/// more than 1e-8 probability.
RVector fock_oracle_evolve(const CouplingGraph& graph, const PumpConfig& pump, double t, double dt, int cutoff);

}  // namespace dqw
