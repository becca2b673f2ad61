// Copyright 2026 The dqw Authors
// SPDX-License-Identifier: Apache-2.0

#include "dqw/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace dqw {

GaussianState GaussianState::vacuum(int n_modes, Basis basis) {
  if (n_modes < 1) throw std::invalid_argument("vacuum: n_modes must be >= 1");
  return GaussianState{CVector::Zero(n_modes), CMatrix::Zero(n_modes, n_modes), CMatrix::Zero(n_modes, n_modes), basis};
}

GaussianState GaussianState::coherent(CVector mean, Basis basis) {
  const auto n = mean.size();
  return GaussianState{std::move(mean), CMatrix::Zero(n, n), CMatrix::Zero(n, n), basis};
}

bool GaussianState::is_vacuum() const {
  return mean.isZero(0.0) && number.isZero(0.0) && anomalous.isZero(0.0);
}

RVector GaussianState::photon_numbers() const {
  return number.diagonal().real() + mean.cwiseAbs2();
}

double GaussianState::total_photons() const { return number.diagonal().real().sum() + mean.squaredNorm(); }

RMatrix quadrature_covariance(const GaussianState& s) {
  const int n = s.n_modes();
  RMatrix sigma(2 * n, 2 * n);
  const RMatrix half = 0.5 * RMatrix::Identity(n, n);
  sigma.topLeftCorner(n, n) = s.anomalous.real() + s.number.real() + half;
  sigma.bottomRightCorner(n, n) = -s.anomalous.real() + s.number.real() + half;
  const RMatrix xp = s.anomalous.imag() + s.number.imag();
  sigma.topRightCorner(n, n) = xp;
  sigma.bottomLeftCorner(n, n) = xp.transpose();
  return 0.5 * (sigma + sigma.transpose());
}

namespace {

RMatrix symplectic_form(int n) {
  RMatrix omega = RMatrix::Zero(2 * n, 2 * n);
  omega.topRightCorner(n, n) = RMatrix::Identity(n, n);
  omega.bottomLeftCorner(n, n) = -RMatrix::Identity(n, n);
  return omega;
}

}  // namespace

RVector symplectic_eigenvalues(const GaussianState& state) {
  const int n = state.n_modes();
  const RMatrix sigma = quadrature_covariance(state);
  Eigen::SelfAdjointEigenSolver<RMatrix> es(sigma);
  const RVector w = es.eigenvalues().cwiseMax(0.0);
  const RMatrix root = es.eigenvectors() * w.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  const RMatrix omega = symplectic_form(n);
  const RMatrix k = root * omega.transpose() * sigma * omega * root;
  Eigen::SelfAdjointEigenSolver<RMatrix> ks(0.5 * (k + k.transpose()), Eigen::EigenvaluesOnly);
  RVector nu(n);
  for (int i = 0; i < n; ++i) nu[i] = std::sqrt(std::max(0.0, 0.5 * (ks.eigenvalues()[2 * i] + ks.eigenvalues()[2 * i + 1])));
  return nu;
}

StateDiagnostics diagnose_state(const GaussianState& s) {
  StateDiagnostics d;
  const CMatrix nh = 0.5 * (s.number + s.number.adjoint());
  d.number_hermiticity = (s.number - s.number.adjoint()).cwiseAbs().maxCoeff();
  d.anomalous_asymmetry = (s.anomalous - s.anomalous.transpose()).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<CMatrix> ns(nh, Eigen::EigenvaluesOnly);
  d.min_number_eigenvalue = ns.eigenvalues().minCoeff();
  const int n = s.n_modes();
  const CMatrix phys = quadrature_covariance(s).cast<Complex>() + kI * 0.5 * symplectic_form(n).cast<Complex>();
  Eigen::SelfAdjointEigenSolver<CMatrix> ps(phys, Eigen::EigenvaluesOnly);
  d.min_physicality_eigenvalue = ps.eigenvalues().minCoeff();
  d.purity_deviation = (symplectic_eigenvalues(s).array() - 0.5).abs().maxCoeff();
  return d;
}

void validate_state(const GaussianState& s) {
  const int n = s.n_modes();
  if (n < 1 || s.number.rows() != n || s.number.cols() != n || s.anomalous.rows() != n || s.anomalous.cols() != n)
    throw ValidationError("Gaussian state moment dimensions are inconsistent");
  const auto d = diagnose_state(s);
  if (d.number_hermiticity > 1e-12) throw ValidationError("number matrix is not Hermitian");
  if (d.anomalous_asymmetry > 1e-12) throw ValidationError("anomalous matrix is not symmetric");
  if (d.min_number_eigenvalue < -1e-10) throw ValidationError("number matrix is not positive semidefinite");
  if (d.min_physicality_eigenvalue < -1e-9) throw ValidationError("state violates the uncertainty relation");
}

GaussianState transform_state(const GaussianState& s, const CMatrix& u, Basis result_basis) {
  GaussianState out;
  out.mean = u * s.mean;
  out.number = u.conjugate() * s.number * u.transpose();
  out.anomalous = u * s.anomalous * u.transpose();
  out.basis = result_basis;
  return out;
}

GaussianState to_eigenbasis(const GaussianState& s, const EigenSystem& eig) {
  if (s.basis == Basis::Eigen) return s;
  if (s.n_modes() != eig.size()) throw std::invalid_argument("to_eigenbasis: dimension mismatch");
  return transform_state(s, eig.transform, Basis::Eigen);
}

GaussianState to_physical_basis(const GaussianState& s, const EigenSystem& eig) {
  if (s.basis == Basis::Physical) return s;
  if (s.n_modes() != eig.size()) throw std::invalid_argument("to_physical_basis: dimension mismatch");
  return transform_state(s, eig.transform.adjoint(), Basis::Physical);
}

double default_time_step(const CouplingGraph& graph) {
  double top = 0.0;
  if (graph.n_modes() <= 2048) {
    top = diagonalize(graph).frequencies.cwiseAbs().maxCoeff();
  } else {
    // Gershgorin bound keeps very large graphs away from a dense eigensolve.
    RVector rows = RVector::Zero(graph.n_modes());
    const auto& c = graph.coupling();
    for (int k = 0; k < c.outerSize(); ++k)
      for (SparseCMatrix::InnerIterator it(c, k); it; ++it) rows[it.row()] += std::abs(it.value());
    top = rows.maxCoeff();
  }
  if (top <= 0.0) top = 1.0;
  return 1e-3 * 2.0 * std::numbers::pi / top;
}

namespace {

struct Moments {
  CVector mean;
  CMatrix number;
  CMatrix anomalous;
};

// Right-hand side of the moment equations. Only the pieces that can be
// nonzero are touched: lasing from vacuum never allocates the second moments.
class MomentEquations {
 public:
  MomentEquations(const CouplingGraph& graph, const PumpConfig& pump, bool second_moments)
      : c_(graph.coupling()), pump_(pump), second_(second_moments) {
    c_conj_ = c_.conjugate();
    if (pump.drive == DriveType::Lasing) {
      drive_vec_ = pump.amplitude_scale * pump.lasing_profile;
    } else {
      const CMatrix g = pump.amplitude_scale * pump.squeezing_profile;
      g_ = g.sparseView(0.0, 0.0);
      g_dense_ = g;
      g_conj_ = g_.conjugate();
      squeezing_ = g_.nonZeros() > 0;
    }
  }

  bool squeezing() const { return squeezing_; }

  void operator()(double t, const Moments& y, Moments& dy) const {
    const Complex phase = std::exp(-kI * pump_.pump_frequency * t);
    dy.mean.noalias() = c_ * y.mean;
    dy.mean *= -kI;
    if (pump_.drive == DriveType::Lasing) {
      dy.mean.noalias() -= kI * phase * drive_vec_;
    } else if (squeezing_) {
      dy.mean.noalias() -= (2.0 * kI * phase) * (g_ * y.mean.conjugate());
    }
    if (!second_) return;

    // dN = i (Z - Z^dag) + 2i (W - W^dag),  Z = C* N,  W = conj(g) G* M
    // dM = -i (X + X^T) - 2i g (Y + Y^T + G),  X = C M,  Y = G N
    z_.noalias() = c_conj_ * y.number;
    dy.number = kI * (z_ - z_.adjoint());
    x_.noalias() = c_ * y.anomalous;
    dy.anomalous = -kI * (x_ + x_.transpose());
    if (squeezing_) {
      w_.noalias() = g_conj_ * y.anomalous;
      w_ *= std::conj(phase);
      dy.number += 2.0 * kI * (w_ - w_.adjoint());
      x_.noalias() = g_ * y.number;
      dy.anomalous -= (2.0 * kI * phase) * (x_ + x_.transpose() + g_dense_);
    }
  }

 private:
  SparseCMatrix c_, c_conj_, g_, g_conj_;
  const PumpConfig& pump_;
  CVector drive_vec_;
  CMatrix g_dense_;
  bool second_;
  bool squeezing_ = false;
  mutable CMatrix z_, x_, w_;
};

void axpy(Moments& out, const Moments& y, double h, const Moments& k, bool second) {
  out.mean = y.mean + h * k.mean;
  if (second) {
    out.number = y.number + h * k.number;
    out.anomalous = y.anomalous + h * k.anomalous;
  }
}

void check_finite(const Moments& y, bool second, double t, double dt) {
  bool ok = y.mean.allFinite();
  double min_diag = 0.0, scale = 1.0;
  if (second) {
    ok = ok && y.number.allFinite() && y.anomalous.allFinite();
    min_diag = y.number.diagonal().real().minCoeff();
    scale = 1.0 + y.number.diagonal().real().cwiseAbs().maxCoeff();
  }
  if (!ok || min_diag < -1e-8 * scale) {
    std::ostringstream os;
    os << "moment integration became unphysical at t = " << t << " (dt = " << dt << "); retry with a smaller dt";
    throw NumericalInstability(os.str());
  }
}

}  // namespace

void evolve_driven_observed(const CouplingGraph& graph, const PumpConfig& pump, double t_final, double dt,
                            const std::optional<GaussianState>& initial, int record_every,
                            const StateObserver& observer) {
  pump.validate();
  const int n = graph.n_modes();
  if (pump.n_modes() != n) throw std::invalid_argument("evolve_driven: pump dimension differs from graph");
  if (!(t_final > 0.0)) throw std::invalid_argument("evolve_driven: t_final must be > 0");
  if (!(dt > 0.0)) throw std::invalid_argument("evolve_driven: dt must be > 0");
  if (dt >= t_final) throw std::invalid_argument("evolve_driven: dt must be smaller than t_final");
  if (record_every < 1) throw std::invalid_argument("evolve_driven: record_every must be >= 1");
  if (initial) {
    if (initial->n_modes() != n) throw std::invalid_argument("evolve_driven: initial state dimension differs from graph");
    if (initial->basis != Basis::Physical) throw std::invalid_argument("evolve_driven: initial state must be in the physical basis");
    validate_state(*initial);
  }

  const GaussianState start = initial ? *initial : GaussianState::vacuum(n);
  const bool second = pump.drive == DriveType::Squeezing ? pump.amplitude_scale > 0.0 || !start.number.isZero(0.0) ||
                                                                   !start.anomalous.isZero(0.0)
                                                             : !start.number.isZero(0.0) || !start.anomalous.isZero(0.0);
  MomentEquations rhs(graph, pump, second);

  const long steps = static_cast<long>(std::ceil(t_final / dt - 1e-9));
  const double h = t_final / static_cast<double>(steps);

  Moments y{start.mean, start.number, start.anomalous};
  Moments k1 = y, k2 = y, k3 = y, k4 = y, tmp = y;
  GaussianState view{start};

  auto emit = [&](double t) {
    view.mean = y.mean;
    if (second) {
      view.number = y.number;
      view.anomalous = y.anomalous;
    }
    observer(t, view);
  };

  emit(0.0);
  for (long s = 0; s < steps; ++s) {
    const double t = s * h;
    rhs(t, y, k1);
    axpy(tmp, y, 0.5 * h, k1, second);
    rhs(t + 0.5 * h, tmp, k2);
    axpy(tmp, y, 0.5 * h, k2, second);
    rhs(t + 0.5 * h, tmp, k3);
    axpy(tmp, y, h, k3, second);
    rhs(t + h, tmp, k4);
    y.mean += (h / 6.0) * (k1.mean + 2.0 * k2.mean + 2.0 * k3.mean + k4.mean);
    if (second) {
      y.number += (h / 6.0) * (k1.number + 2.0 * k2.number + 2.0 * k3.number + k4.number);
      y.anomalous += (h / 6.0) * (k1.anomalous + 2.0 * k2.anomalous + 2.0 * k3.anomalous + k4.anomalous);
      // remove round-off drift from the exact symmetries
      y.number = 0.5 * (y.number + y.number.adjoint()).eval();
      y.anomalous = 0.5 * (y.anomalous + y.anomalous.transpose()).eval();
    }
    const long done = s + 1;
    if (done % record_every == 0 || done == steps) {
      check_finite(y, second, done * h, h);
      emit(done == steps ? t_final : done * h);
    }
  }
}

GaussianTrajectory evolve_driven(const CouplingGraph& graph, const PumpConfig& pump, double t_final, double dt,
                                 const std::optional<GaussianState>& initial, int record_every) {
  GaussianTrajectory traj;
  traj.pump = pump;
  traj.graph = std::make_shared<const CouplingGraph>(graph);
  evolve_driven_observed(graph, pump, t_final, dt, initial, record_every, [&](double t, const GaussianState& s) {
    traj.times.push_back(t);
    traj.states.push_back(s);
  });
  return traj;
}

CMatrix passive_propagator(const EigenSystem& eig, double t) {
  const CVector phases = (-kI * t * eig.frequencies.cast<Complex>()).array().exp();
  return eig.transform.adjoint() * phases.asDiagonal() * eig.transform;
}

GaussianState evolve_passive(const EigenSystem& eig, const GaussianState& state, double t) {
  if (state.n_modes() != eig.size()) throw std::invalid_argument("evolve_passive: state dimension differs from graph");
  if (t == 0.0) return state;
  if (state.basis == Basis::Eigen) {
    const CVector phases = (-kI * t * eig.frequencies.cast<Complex>()).array().exp();
    return transform_state(state, CMatrix(phases.asDiagonal()), Basis::Eigen);
  }
  return transform_state(state, passive_propagator(eig, t), Basis::Physical);
}

GaussianState evolve_passive(const CouplingGraph& graph, const GaussianState& state, double t) {
  if (state.n_modes() != graph.n_modes()) throw std::invalid_argument("evolve_passive: state dimension differs from graph");
  return evolve_passive(diagonalize(graph), state, t);
}

}  // namespace dqw
