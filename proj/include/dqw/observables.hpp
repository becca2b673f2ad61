// Copyright 2026 The dqw Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dqw/dynamics.hpp"
#include "dqw/spectral.hpp"

namespace dqw {

enum class SeriesKind { PhotonPhysical, PhotonEigen, Total, Variance, VarianceRescaled };

std::string to_string(SeriesKind k);

/// Time series of one observable. `values` has one row per time and either
/// one column (scalar kinds) or one column per mode.
struct ObservableSeries {
  std::vector<double> times;
  RMatrix values;
  SeriesKind kind = SeriesKind::Total;

  RVector column(int j) const { return values.col(j); }
};

/// n_j = N_jj + |mu_j|^2 in the requested basis.
RVector photon_numbers(const GaussianState& state, Basis basis, const EigenSystem* eig = nullptr);

/// Raw second moment sum_x x^2 n_x (no mean subtraction, no normalization).
double position_variance(const GaussianState& state, const RVector& positions);
/// sum_x x^2 n_x / sum_x n_x: the position spread of a single walker.
double position_variance_rescaled(const GaussianState& state, const RVector& positions);
/// sum_x (x - <x>)^2 n_x / sum_x n_x.
double position_variance_central(const GaussianState& state, const RVector& positions);

ObservableSeries photon_series(const GaussianTrajectory& traj, Basis basis, const EigenSystem* eig = nullptr);
ObservableSeries total_series(const GaussianTrajectory& traj);
/// Variance or VarianceRescaled; uses the graph's positions.
ObservableSeries variance_series(const GaussianTrajectory& traj, SeriesKind kind);

struct GrowthFit {
  double exponent = 0.0;       // slope of log v vs log t
  double log_prefactor = 0.0;
  double r2_power = 0.0;
  double rate = 0.0;           // slope of log v vs t
  double r2_exponential = 0.0;
  int samples = 0;
  double t_begin = 0.0;
  double t_end = 0.0;
};

/// Least-squares fits of log(value) against log(t) and against t over the
/// samples with t in [t_begin, t_end]. Needs >= 10 samples, all positive.
GrowthFit growth_exponent(const std::vector<double>& times, const RVector& values, double t_begin, double t_end);
GrowthFit growth_exponent(const ObservableSeries& series, double t_begin, double t_end, int column = 0);

/// (sum n)^2 / sum n^2.
double participation_ratio(const RVector& occupations);

/// One driven run per pump frequency (in parallel over `threads`), returning
/// the final physical-basis photon numbers row by row in input order.
RMatrix frequency_sweep(const CouplingGraph& graph, const PumpConfig& pump_template,
                        const std::vector<double>& omega_values, double t, double dt, int threads = 1);

}  // namespace dqw
