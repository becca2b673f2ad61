// Copyright 2026 The dqw Authors
// SPDX-License-Identifier: Apache-2.0

#include "dqw/observables.hpp"

#include <cmath>
#include <sstream>

#include "dqw/parallel.hpp"

namespace dqw {

std::string to_string(SeriesKind k) {
  switch (k) {
    case SeriesKind::PhotonPhysical: return "photon_physical";
    case SeriesKind::PhotonEigen: return "photon_eigen";
    case SeriesKind::Total: return "total";
    case SeriesKind::Variance: return "variance";
    case SeriesKind::VarianceRescaled: return "variance_rescaled";
  }
  return "unknown";
}

RVector photon_numbers(const GaussianState& state, Basis basis, const EigenSystem* eig) {
  if (state.basis == basis) return state.photon_numbers();
  if (eig == nullptr) throw std::invalid_argument("photon_numbers: changing basis requires an EigenSystem");
  const GaussianState moved = basis == Basis::Eigen ? to_eigenbasis(state, *eig) : to_physical_basis(state, *eig);
  return moved.photon_numbers();
}

namespace {

RVector physical_numbers(const GaussianState& state, const RVector& positions) {
  if (state.basis != Basis::Physical) throw std::invalid_argument("position variance needs a physical-basis state");
  if (positions.size() != state.n_modes()) throw std::invalid_argument("positions length differs from n_modes");
  return state.photon_numbers();
}

}  // namespace

double position_variance(const GaussianState& state, const RVector& positions) {
  const RVector n = physical_numbers(state, positions);
  return (positions.array().square() * n.array()).sum();
}

double position_variance_rescaled(const GaussianState& state, const RVector& positions) {
  const RVector n = physical_numbers(state, positions);
  const double total = n.sum();
  return total > 0.0 ? (positions.array().square() * n.array()).sum() / total : 0.0;
}

double position_variance_central(const GaussianState& state, const RVector& positions) {
  const RVector n = physical_numbers(state, positions);
  const double total = n.sum();
  if (total <= 0.0) return 0.0;
  const double mean = (positions.array() * n.array()).sum() / total;
  return ((positions.array() - mean).square() * n.array()).sum() / total;
}

ObservableSeries photon_series(const GaussianTrajectory& traj, Basis basis, const EigenSystem* eig) {
  ObservableSeries s;
  s.kind = basis == Basis::Physical ? SeriesKind::PhotonPhysical : SeriesKind::PhotonEigen;
  s.times = traj.times;
  const int n = traj.states.empty() ? 0 : traj.states.front().n_modes();
  s.values.resize(static_cast<Eigen::Index>(traj.states.size()), n);
  for (std::size_t i = 0; i < traj.states.size(); ++i)
    s.values.row(static_cast<Eigen::Index>(i)) = photon_numbers(traj.states[i], basis, eig).transpose();
  return s;
}

ObservableSeries total_series(const GaussianTrajectory& traj) {
  ObservableSeries s;
  s.kind = SeriesKind::Total;
  s.times = traj.times;
  s.values.resize(static_cast<Eigen::Index>(traj.states.size()), 1);
  for (std::size_t i = 0; i < traj.states.size(); ++i) s.values(static_cast<Eigen::Index>(i), 0) = traj.states[i].total_photons();
  return s;
}

ObservableSeries variance_series(const GaussianTrajectory& traj, SeriesKind kind) {
  if (kind != SeriesKind::Variance && kind != SeriesKind::VarianceRescaled)
    throw std::invalid_argument("variance_series: kind must be variance or variance_rescaled");
  if (!traj.graph || !traj.graph->positions())
    throw std::invalid_argument("variance_series: graph has no mode positions");
  const RVector& x = *traj.graph->positions();
  ObservableSeries s;
  s.kind = kind;
  s.times = traj.times;
  s.values.resize(static_cast<Eigen::Index>(traj.states.size()), 1);
  for (std::size_t i = 0; i < traj.states.size(); ++i)
    s.values(static_cast<Eigen::Index>(i), 0) = kind == SeriesKind::Variance
                                                    ? position_variance(traj.states[i], x)
                                                    : position_variance_rescaled(traj.states[i], x);
  return s;
}

namespace {

struct LineFit {
  double slope, intercept, r2;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    ss_res += r * r;
  }
  return {slope, intercept, syy > 0 ? 1.0 - ss_res / syy : 1.0};
}

}  // namespace

GrowthFit growth_exponent(const std::vector<double>& times, const RVector& values, double t_begin, double t_end) {
  if (static_cast<Eigen::Index>(times.size()) != values.size())
    throw std::invalid_argument("growth_exponent: times and values differ in length");
  std::vector<double> lt, t, lv;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_begin || times[i] > t_end) continue;
    const double v = values[static_cast<Eigen::Index>(i)];
    if (!(v > 0.0) || !(times[i] > 0.0)) {
      std::ostringstream os;
      os << "growth_exponent: sample " << i << " (t = " << times[i] << ", value = " << v
         << ") is not positive";
      throw std::invalid_argument(os.str());
    }
    lt.push_back(std::log(times[i]));
    t.push_back(times[i]);
    lv.push_back(std::log(v));
  }
  if (lv.size() < 10) throw std::invalid_argument("growth_exponent: window holds fewer than 10 samples");
  const auto power = least_squares(lt, lv);
  const auto expo = least_squares(t, lv);
  GrowthFit fit;
  fit.exponent = power.slope;
  fit.log_prefactor = power.intercept;
  fit.r2_power = power.r2;
  fit.rate = expo.slope;
  fit.r2_exponential = expo.r2;
  fit.samples = static_cast<int>(lv.size());
  fit.t_begin = t_begin;
  fit.t_end = t_end;
  return fit;
}

GrowthFit growth_exponent(const ObservableSeries& series, double t_begin, double t_end, int column) {
  return growth_exponent(series.times, series.values.col(column), t_begin, t_end);
}

double participation_ratio(const RVector& occupations) {
  const double sq = occupations.squaredNorm();
  if (sq == 0.0) return 0.0;
  const double s = occupations.sum();
  return s * s / sq;
}

RMatrix frequency_sweep(const CouplingGraph& graph, const PumpConfig& pump_template,
                        const std::vector<double>& omega_values, double t, double dt, int threads) {
  if (omega_values.empty()) throw std::invalid_argument("frequency_sweep: omega_values must be non-empty");
  RMatrix out(static_cast<Eigen::Index>(omega_values.size()), graph.n_modes());
  parallel_for(omega_values.size(), threads, [&](std::size_t i) {
    PumpConfig pump = pump_template;
    pump.pump_frequency = omega_values[i];
    GaussianState last = GaussianState::vacuum(graph.n_modes());
    evolve_driven_observed(graph, pump, t, dt, std::nullopt, 1 << 30, [&](double, const GaussianState& s) { last = s; });
    out.row(static_cast<Eigen::Index>(i)) = last.photon_numbers().transpose();
  });
  return out;
}

}  // namespace dqw
