// Copyright 2026 The dqw Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dqw/graphs.hpp"
#include "dqw/pump.hpp"
#include "dqw/types.hpp"

namespace dqw {

/// Eigenfrequencies (ascending) and the unitary T with A = T a; row k of T is
/// eigenmode k written in the physical basis, so T C T^dag = diag(frequencies).
///
/// Phase convention: in every row the first component whose magnitude is
/// within 1e-9 (relative) of the row maximum is made real and positive.
struct EigenSystem {
  RVector frequencies;
  CMatrix transform;

  int size() const { return static_cast<int>(frequencies.size()); }
  /// max |T T^dag - I|
  double unitarity_error() const;
  /// max |T C T^dag - diag(Omega)| / max |C|
  double diagonalization_error(const CouplingGraph& graph) const;
};

EigenSystem diagonalize(const CouplingGraph& graph);

/// Dense Hermitian eigenproblem on an explicit matrix (same conventions).
EigenSystem diagonalize_matrix(const CMatrix& hermitian);

/// Closed-form chain spectrum: Omega_j = onsite + 2 coupling cos(j pi/(n+1)),
/// T_jk = sqrt(2/(n+1)) sin(j k pi/(n+1)), returned in ascending order with
/// the same phase convention as diagonalize().
EigenSystem chain_eigensystem_analytic(int n, double onsite, double coupling);

/// Position of the closed-form chain mode with label j (1-based, in the
/// Omega_j = onsite + 2 coupling cos(j pi/(n+1)) numbering) in the ascending order.
int chain_mode_position(int j, int n, double coupling);

void apply_phase_convention(CMatrix& transform);

/// Chebyshev polynomial of the second kind, by recurrence.
double chebyshev_u(int degree, double x);

/// Real roots of U_depth(x) - U_{depth-1}(x) on [-1, 1], ascending, from
/// sign changes on a 16*depth grid refined by bisection to 1e-12.
std::vector<double> defect_chain_eigenvalues(int depth);

/// Outcome of matching the Chebyshev roots against a chain spectrum under the
/// candidate argument mappings lambda = scale * x.
struct ChebyshevMappingReport {
  int depth = 0;
  std::vector<double> roots;
  double best_scale = 0.0;
  double best_residual = 0.0;       // max over roots of the distance to the nearest eigenvalue
  bool matched = false;             // best_residual <= 1e-9
  double uniform_chain_residual = 0.0;  // same check against the 2*depth chain without the defect, scale 2
};

/// Validates the Chebyshev condition against the column-reduced glued-trees
/// chain (unit couplings with sqrt(2) at the centre, zero on-site).
ChebyshevMappingReport validate_chebyshev_mapping(int depth);

/// Pump profile expressed in the eigenbasis, including the amplitude scale.
/// Lasing: S = gamma0 T Gamma_L. Squeezing: S = gamma0 T Gamma_S T^T.
struct EigenPump {
  DriveType drive = DriveType::Lasing;
  CVector lasing;             // S_k
  CMatrix squeezing;          // S_kk'
  double pump_frequency = 0.0;
  RVector mismatch;           // lasing: Omega_k - wp
  RMatrix pair_mismatch;      // squeezing: Omega_k + Omega_k' - wp
};

EigenPump pump_to_eigenbasis(const PumpConfig& pump, const EigenSystem& eig);

struct PhaseMatchedSet {
  std::vector<int> modes;                   // lasing
  std::vector<std::pair<int, int>> pairs;   // squeezing, k <= k'
  bool contains(int k) const;
  bool contains(int k, int kp) const;
  std::size_t size() const { return modes.size() + pairs.size(); }
};

PhaseMatchedSet phase_matched_set(const EigenPump& eigpump, double tolerance);

}  // namespace dqw
