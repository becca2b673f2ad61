// Copyright 2026 The dqw Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "dqw/graphs.hpp"
#include "dqw/observables.hpp"
#include "dqw/spectral.hpp"

namespace dqw {

/// Edge weight giving the reduced chain unit couplings with sqrt(2) at the centre.
inline const double kSearchEdgeWeight = 1.0 / std::sqrt(2.0);

struct SearchSpec {
  int depth = 3;
  double gamma0 = 0.1;
  double t_final = 0.0;  // <= 0: three wait times
  double dt = 0.0;       // <= 0: default_time_step
  bool use_reduced_chain = true;
  double edge_weight = kSearchEdgeWeight;
  std::optional<int> entrance;  // defaults to the graph's entrance/exit labels
  std::optional<int> exit;
  int record_every = 1;
};

/// Eigenmode with the largest combined entrance/exit weight.
struct TargetMode {
  int index = -1;
  double frequency = 0.0;
  double entrance_weight = 0.0;  // |mu_{D,p}|
  double exit_weight = 0.0;      // |mu_{D,d}|
  int cluster_size = 1;          // size of the degenerate subspace D belongs to
  bool rotated = false;          // weights come from a rotation within that subspace
};

/// Picks the eigenmode maximizing |T_{k,entrance}|^2 + |T_{k,exit}|^2 after
/// dividing each component by sqrt(multiplicity). Degenerate subspaces
/// (|dOmega| <= 1e-9 max|Omega|) are scored by the best rotation inside them.
/// Ties (scores within 1e-9) go to the mode closest to the band centre, then
/// to the higher frequency.
TargetMode find_target_eigenmode(const EigenSystem& eig, int entrance, int exit,
                                 const std::optional<std::vector<int>>& multiplicities = std::nullopt);

struct SearchResult {
  int depth = 0;
  int n_modes = 0;
  bool use_reduced_chain = true;
  double gamma0 = 0.0;
  double t_final = 0.0;
  double dt = 0.0;
  TargetMode target;
  double min_mismatch = 0.0;       // Delta_min to the nearest other driven eigenmode
  double wait_time_estimate = 0.0; // 1/Delta_min, infinity when Delta_min = 0
  /// Per-vertex photon numbers; columns: entrance, exit, max over the other modes.
  ObservableSeries series;
  /// 1 + number of non-entrance modes holding strictly more photons than the exit.
  std::vector<int> exit_rank_over_time;
  /// Earliest time from which exit_rank stays 1 to the end; NaN if it never settles.
  double rank1_threshold_time = std::nan("");
  /// Last time at which the exit population decreased (0 if it never did).
  double transient_time = 0.0;

  int final_exit_rank() const { return exit_rank_over_time.empty() ? 0 : exit_rank_over_time.back(); }
};

/// Lasing on the entrance with wp = Omega_D, evolved from vacuum.
SearchResult run_driven_search(const SearchSpec& spec);

/// Builds the search graph: reduced chain or full glued trees.
CouplingGraph search_graph(const SearchSpec& spec);

struct PassiveOscillation {
  std::vector<double> times;
  RVector entrance_probability;
  RVector exit_probability;
  RVector total_probability;
};

/// Single walker started on the entrance, psi(t) = exp(-i C t) e_entrance,
/// sampled every dt on [0, t_final]. Reduced-chain probabilities are per vertex.
PassiveOscillation passive_oscillation(int depth, double t_final, double dt, bool use_reduced_chain = false,
                                       double edge_weight = kSearchEdgeWeight);

/// Interior local maxima of a sampled series; a flat top counts once.
int count_local_maxima(const RVector& values);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares y = slope x + intercept; needs >= 2 distinct x.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct ScalingPoint {
  int depth = 0;
  int n_modes = 0;
  double weight = 0.0;       // entrance weight of the target eigenmode
  double exit_weight = 0.0;
  double inverse_square = 0.0;
  double min_mismatch = 0.0;
};

struct ScalingStudy {
  bool use_reduced_chain = true;
  double edge_weight = kSearchEdgeWeight;
  std::vector<ScalingPoint> points;
  std::optional<LinearFit> fit;  // weight^-2 = slope depth + intercept; absent for one depth
};

/// Full-graph mode is limited to depth <= 11.
ScalingStudy weight_scaling_study(const std::vector<int>& depths, bool use_reduced_chain,
                                  double edge_weight = kSearchEdgeWeight, int threads = 1);

/// Delta_min between Omega_D and the nearest other eigenfrequency the entrance drive reaches.
double min_driven_mismatch(const EigenSystem& eig, const TargetMode& target, int entrance);

struct ClassicalWalk {
  int depth = 0;
  std::vector<double> times;
  RVector exit_occupation;
  double stationary_exit = 0.0;          // deg(exit) / sum(deg)
  double half_stationary_time = std::nan("");
};

/// Continuous-time classical walk dp/dt = (A D^-1 - I) p from the entrance
/// of the unweighted glued trees, evaluated exactly through the eigenvectors
/// of D^-1/2 A D^-1/2. Depth <= 9.
ClassicalWalk classical_hitting_baseline(int depth, double t_final, double dt);

/// Full probability vector of the same walk at time t.
RVector classical_distribution(int depth, double t);

}  // namespace dqw
