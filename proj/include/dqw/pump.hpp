// Copyright 2026 The dqw Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "dqw/types.hpp"

namespace dqw {

/// Classical, undepleted, monochromatic pump.
///
/// Lasing adds  sum_k g_k(t) a_k^dag + h.c.          with g(t) = gamma0 * profile * exp(-i wp t),
/// squeezing adds sum_jk G_jk(t) a_j^dag a_k^dag + h.c. with G(t) = gamma0 * profile * exp(-i wp t).
struct PumpConfig {
  DriveType drive = DriveType::Lasing;
  CVector lasing_profile;     // length n, lasing only
  CMatrix squeezing_profile;  // n x n symmetric, squeezing only
  double pump_frequency = 0.0;
  double amplitude_scale = 1.0;

  static constexpr double kSymmetryTolerance = 1e-12;

  int n_modes() const {
    return static_cast<int>(drive == DriveType::Lasing ? lasing_profile.size() : squeezing_profile.rows());
  }

  /// Throws ValidationError on a broken invariant.
  void validate() const;

  /// Lasing pump on a single mode.
  static PumpConfig lasing_on(int n_modes, int mode, double pump_frequency, double gamma0);
  /// Squeezing pump a_mode^dag^2 on a single mode.
  static PumpConfig squeezing_on(int n_modes, int mode, double pump_frequency, double gamma0);
};

}  // namespace dqw
