// Copyright 2026 The dqw Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dqw/decomposition.hpp"
#include "dqw/observables.hpp"
#include "dqw/search.hpp"

namespace dqw {

/// Output could not be written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// CSV writers. Numbers are printed with 17 significant digits so re-runs
// compare byte for byte.

/// time,mode_index,basis,mean_re,mean_im,photon_number
void write_trajectory_csv(std::ostream& os, const GaussianTrajectory& traj, const EigenSystem* eig = nullptr);
/// index,frequency
void write_spectrum_csv(std::ostream& os, const EigenSystem& eig);
/// omega_p,n_0,...,n_{N-1}
void write_sweep_csv(std::ostream& os, const std::vector<double>& omegas, const RMatrix& photons);
/// time,<columns...>
void write_series_csv(std::ostream& os, const std::vector<double>& times, const RMatrix& values,
                      const std::vector<std::string>& columns);
/// depth,weight,weight_inv_sq
void write_scaling_csv(std::ostream& os, const ScalingStudy& study);

nlohmann::json to_json(const GrowthFit& fit);
nlohmann::json to_json(const DecompositionReport& report);
nlohmann::json to_json(const TargetMode& target);
/// Scalar fields only; series go to CSV.
nlohmann::json to_json(const SearchResult& result);
nlohmann::json to_json(const ScalingStudy& study);

/// Writes `text` to `path`, creating parent directories. Throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Finite doubles as numbers; NaN and infinities as the strings "nan", "inf", "-inf".
nlohmann::json json_number(double v);

}  // namespace dqw
