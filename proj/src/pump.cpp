// Copyright 2026 The dqw Authors
// SPDX-License-Identifier: Apache-2.0

#include "dqw/pump.hpp"

#include <cmath>
#include <string>

namespace dqw {

void PumpConfig::validate() const {
  if (!(amplitude_scale >= 0.0)) throw ValidationError("pump amplitude_scale must be >= 0");
  if (!std::isfinite(pump_frequency)) throw ValidationError("pump frequency must be finite");
  if (drive == DriveType::Lasing) {
    if (lasing_profile.size() == 0) throw ValidationError("lasing pump needs a non-empty profile vector");
  } else {
    if (squeezing_profile.rows() == 0 || squeezing_profile.rows() != squeezing_profile.cols())
      throw ValidationError("squeezing pump needs a square profile matrix");
    const double asym = (squeezing_profile - squeezing_profile.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTolerance)
      throw ValidationError("squeezing profile is not symmetric (max |G - G^T| = " + std::to_string(asym) + ")");
  }
}

PumpConfig PumpConfig::lasing_on(int n_modes, int mode, double pump_frequency, double gamma0) {
  if (mode < 0 || mode >= n_modes) throw std::invalid_argument("lasing_on: mode index out of range");
  PumpConfig p;
  p.drive = DriveType::Lasing;
  p.lasing_profile = CVector::Zero(n_modes);
  p.lasing_profile[mode] = 1.0;
  p.pump_frequency = pump_frequency;
  p.amplitude_scale = gamma0;
  return p;
}

PumpConfig PumpConfig::squeezing_on(int n_modes, int mode, double pump_frequency, double gamma0) {
  if (mode < 0 || mode >= n_modes) throw std::invalid_argument("squeezing_on: mode index out of range");
  PumpConfig p;
  p.drive = DriveType::Squeezing;
  p.squeezing_profile = CMatrix::Zero(n_modes, n_modes);
  p.squeezing_profile(mode, mode) = 1.0;
  p.pump_frequency = pump_frequency;
  p.amplitude_scale = gamma0;
  return p;
}

}  // namespace dqw
