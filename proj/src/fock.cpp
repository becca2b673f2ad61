// Copyright 2026 The dqw Authors
// SPDX-License-Identifier: Apache-2.0

// Truncated Fock-space reference integrator. Deliberately shares nothing with
// the moment equations beyond the Hamiltonian definition.

#include <cmath>
#include <sstream>
#include <vector>

#include "dqw/dynamics.hpp"

namespace dqw {

namespace {

using Triplet = Eigen::Triplet<Complex>;

struct FockSpace {
  int modes;
  int cutoff;
  long dim;

  int occupation(long index, int mode) const {
    for (int m = 0; m < mode; ++m) index /= cutoff;
    return static_cast<int>(index % cutoff);
  }
  long stride(int mode) const {
    long s = 1;
    for (int m = 0; m < mode; ++m) s *= cutoff;
    return s;
  }

  SparseCMatrix annihilation(int mode) const {
    std::vector<Triplet> t;
    const long st = stride(mode);
    for (long i = 0; i < dim; ++i) {
      const int n = occupation(i, mode);
      if (n > 0) t.emplace_back(i - st, i, std::sqrt(static_cast<double>(n)));
    }
    SparseCMatrix a(dim, dim);
    a.setFromTriplets(t.begin(), t.end());
    return a;
  }
};

}  // namespace

RVector fock_oracle_evolve(const CouplingGraph& graph, const PumpConfig& pump, double t, double dt, int cutoff) {
  pump.validate();
  const int n = graph.n_modes();
  if (n > 3) throw std::invalid_argument("fock_oracle_evolve: at most 3 modes");
  if (cutoff < 2) throw std::invalid_argument("fock_oracle_evolve: cutoff must be >= 2");
  if (pump.n_modes() != n) throw std::invalid_argument("fock_oracle_evolve: pump dimension differs from graph");
  if (!(t >= 0.0) || !(dt > 0.0)) throw std::invalid_argument("fock_oracle_evolve: need t >= 0 and dt > 0");
  if (std::pow(static_cast<double>(cutoff), n) > 1e6)
    throw std::invalid_argument("fock_oracle_evolve: cutoff^n_modes exceeds 1e6");

  FockSpace space{n, cutoff, 1};
  for (int m = 0; m < n; ++m) space.dim *= cutoff;

  std::vector<SparseCMatrix> a, adag;
  for (int m = 0; m < n; ++m) {
    a.push_back(space.annihilation(m));
    adag.push_back(SparseCMatrix(a.back().adjoint()));
  }

  SparseCMatrix h_walk(space.dim, space.dim);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (graph.at(j, k) != Complex{}) h_walk += graph.at(j, k) * SparseCMatrix(adag[j] * a[k]);

  // Creation part P of the drive; the Hamiltonian is H_walk + e^{-i wp t} P + e^{i wp t} P^dag.
  SparseCMatrix create(space.dim, space.dim);
  if (pump.drive == DriveType::Lasing) {
    for (int k = 0; k < n; ++k)
      if (pump.lasing_profile[k] != Complex{}) create += (pump.amplitude_scale * pump.lasing_profile[k]) * adag[k];
  } else {
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (pump.squeezing_profile(j, k) != Complex{})
          create += (pump.amplitude_scale * pump.squeezing_profile(j, k)) * SparseCMatrix(adag[j] * adag[k]);
  }
  const SparseCMatrix destroy = create.adjoint();

  auto apply_h = [&](double time, const CVector& psi) -> CVector {
    const Complex phase = std::exp(-kI * pump.pump_frequency * time);
    CVector out = h_walk * psi;
    out += phase * (create * psi);
    out += std::conj(phase) * (destroy * psi);
    return -kI * out;
  };

  auto top_level_weight = [&](const CVector& psi) {
    double w = 0.0;
    for (long i = 0; i < space.dim; ++i) {
      for (int m = 0; m < n; ++m) {
        if (space.occupation(i, m) == cutoff - 1) {
          w += std::norm(psi[i]);
          break;
        }
      }
    }
    return w;
  };

  CVector psi = CVector::Zero(space.dim);
  psi[0] = 1.0;
  const long steps = t > 0.0 ? static_cast<long>(std::ceil(t / dt - 1e-9)) : 0;
  const double h = steps > 0 ? t / static_cast<double>(steps) : 0.0;
  double leak = 0.0;
  for (long s = 0; s < steps; ++s) {
    const double time = s * h;
    const CVector k1 = apply_h(time, psi);
    const CVector k2 = apply_h(time + 0.5 * h, psi + 0.5 * h * k1);
    const CVector k3 = apply_h(time + 0.5 * h, psi + 0.5 * h * k2);
    const CVector k4 = apply_h(time + h, psi + h * k3);
    psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if ((s + 1) % 100 == 0) leak = std::max(leak, top_level_weight(psi));
  }
  leak = std::max(leak, top_level_weight(psi));
  if (leak > 1e-8) {
    std::ostringstream os;
    os << "fock_oracle_evolve: top Fock level holds probability " << leak << " at cutoff " << cutoff
       << "; increase the cutoff";
    throw CutoffTooSmall(os.str());
  }

  RVector numbers = RVector::Zero(n);
  for (long i = 0; i < space.dim; ++i) {
    const double p = std::norm(psi[i]);
    for (int m = 0; m < n; ++m) numbers[m] += p * space.occupation(i, m);
  }
  return numbers;
}

}  // namespace dqw
