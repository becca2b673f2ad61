// Copyright 2026 The dqw Authors
// SPDX-License-Identifier: Apache-2.0

#include "dqw/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

namespace dqw {

using json = nlohmann::json;

namespace {

struct Precise {
  explicit Precise(std::ostream& os) : os_(os), flags_(os.flags()), prec_(os.precision()) {
    os_ << std::setprecision(17);
  }
  ~Precise() {
    os_.flags(flags_);
    os_.precision(prec_);
  }
  std::ostream& os_;
  std::ios::fmtflags flags_;
  std::streamsize prec_;
};

}  // namespace

json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

void write_trajectory_csv(std::ostream& os, const GaussianTrajectory& traj, const EigenSystem* eig) {
  Precise guard(os);
  os << "time,mode_index,basis,mean_re,mean_im,photon_number\n";
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    auto emit = [&](const GaussianState& s) {
      const RVector n = s.photon_numbers();
      const std::string basis = to_string(s.basis);
      for (int j = 0; j < s.n_modes(); ++j)
        os << traj.times[i] << ',' << j << ',' << basis << ',' << s.mean[j].real() << ',' << s.mean[j].imag() << ','
           << n[j] << '\n';
    };
    emit(traj.states[i]);
    if (eig != nullptr) {
      emit(traj.states[i].basis == Basis::Physical ? to_eigenbasis(traj.states[i], *eig)
                                                   : to_physical_basis(traj.states[i], *eig));
    }
  }
}

void write_spectrum_csv(std::ostream& os, const EigenSystem& eig) {
  Precise guard(os);
  os << "index,frequency\n";
  for (int k = 0; k < eig.size(); ++k) os << k << ',' << eig.frequencies[k] << '\n';
}

void write_sweep_csv(std::ostream& os, const std::vector<double>& omegas, const RMatrix& photons) {
  if (static_cast<Eigen::Index>(omegas.size()) != photons.rows())
    throw std::invalid_argument("write_sweep_csv: row count differs from omega count");
  Precise guard(os);
  os << "omega_p";
  for (Eigen::Index j = 0; j < photons.cols(); ++j) os << ",n_" << j;
  os << '\n';
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    os << omegas[i];
    for (Eigen::Index j = 0; j < photons.cols(); ++j) os << ',' << photons(static_cast<Eigen::Index>(i), j);
    os << '\n';
  }
}

void write_series_csv(std::ostream& os, const std::vector<double>& times, const RMatrix& values,
                      const std::vector<std::string>& columns) {
  if (static_cast<Eigen::Index>(columns.size()) != values.cols() ||
      static_cast<Eigen::Index>(times.size()) != values.rows())
    throw std::invalid_argument("write_series_csv: shape mismatch");
  Precise guard(os);
  os << "time";
  for (const auto& c : columns) os << ',' << c;
  os << '\n';
  for (std::size_t i = 0; i < times.size(); ++i) {
    os << times[i];
    for (Eigen::Index j = 0; j < values.cols(); ++j) os << ',' << values(static_cast<Eigen::Index>(i), j);
    os << '\n';
  }
}

void write_scaling_csv(std::ostream& os, const ScalingStudy& study) {
  Precise guard(os);
  os << "depth,weight,weight_inv_sq\n";
  for (const auto& p : study.points) os << p.depth << ',' << p.weight << ',' << p.inverse_square << '\n';
}

json to_json(const GrowthFit& f) {
  return {{"exponent", json_number(f.exponent)},
          {"log_prefactor", json_number(f.log_prefactor)},
          {"r2_power", json_number(f.r2_power)},
          {"rate", json_number(f.rate)},
          {"r2_exponential", json_number(f.r2_exponential)},
          {"samples", f.samples},
          {"window", {f.t_begin, f.t_end}}};
}

json to_json(const DecompositionReport& r) {
  return {{"drive_type", to_string(r.drive)},
          {"n_modes", r.n_modes},
          {"gamma0", r.gamma0},
          {"omega_p", r.pump_frequency},
          {"walk_time", r.walk_time},
          {"dt", r.dt},
          {"max_photon_difference", json_number(r.max_photon_difference)},
          {"relative_total_difference", json_number(r.relative_total_difference)},
          {"max_mean_difference", json_number(r.max_mean_difference)},
          {"total_photons_direct", json_number(r.total_photons_direct)}};
}

json to_json(const TargetMode& t) {
  return {{"index", t.index},
          {"frequency", t.frequency},
          {"entrance_weight", t.entrance_weight},
          {"exit_weight", t.exit_weight},
          {"degenerate_cluster_size", t.cluster_size},
          {"rotated_within_cluster", t.rotated}};
}

json to_json(const SearchResult& r) {
  return {{"depth", r.depth},
          {"n_modes", r.n_modes},
          {"use_reduced_chain", r.use_reduced_chain},
          {"gamma0", r.gamma0},
          {"t_final", r.t_final},
          {"dt", r.dt},
          {"target_eigenmode_index", r.target.index},
          {"target_frequency", r.target.frequency},
          {"entrance_weight", r.target.entrance_weight},
          {"exit_weight", r.target.exit_weight},
          {"target", to_json(r.target)},
          {"min_mismatch", json_number(r.min_mismatch)},
          {"wait_time_estimate", json_number(r.wait_time_estimate)},
          {"rank1_threshold_time", json_number(r.rank1_threshold_time)},
          {"transient_time", json_number(r.transient_time)},
          {"final_exit_rank", r.final_exit_rank()}};
}

json to_json(const ScalingStudy& s) {
  json points = json::array();
  for (const auto& p : s.points)
    points.push_back({{"depth", p.depth},
                      {"n_modes", p.n_modes},
                      {"weight", p.weight},
                      {"exit_weight", p.exit_weight},
                      {"weight_inv_sq", p.inverse_square},
                      {"min_mismatch", p.min_mismatch}});
  json out = {{"use_reduced_chain", s.use_reduced_chain}, {"edge_weight", s.edge_weight}, {"points", points}};
  if (s.fit)
    out["fit"] = {{"slope", s.fit->slope}, {"intercept", s.fit->intercept}, {"r2", s.fit->r2}};
  else
    out["fit"] = nullptr;
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  f.close();
  if (!f) throw IoError("failed writing " + path.string());
}

}  // namespace dqw
