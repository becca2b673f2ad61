// Copyright 2026 The dqw Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "dqw/dynamics.hpp"
#include "test_util.hpp"

using namespace dqw;
using dqw::testing::max_abs;

namespace {

CouplingGraph single_mode(double omega) {
  SparseCMatrix c(1, 1);
  c.insert(0, 0) = omega;
  return CouplingGraph(c);
}

GaussianState final_state(const CouplingGraph& g, const PumpConfig& p, double t, double dt,
                          const std::optional<GaussianState>& init = std::nullopt) {
  return evolve_driven(g, p, t, dt, init, 1 << 30).states.back();
}

double moment_distance(const GaussianState& a, const GaussianState& b) {
  return std::max({max_abs(CVector(a.mean - b.mean)), max_abs(CMatrix(a.number - b.number)),
                   max_abs(CMatrix(a.anomalous - b.anomalous))});
}

}  // namespace

TEST_CASE("resonant lasing on one mode grows the amplitude linearly") {
  const auto traj = evolve_driven(single_mode(0.0), PumpConfig::lasing_on(1, 0, 0.0, 1.0), 3.0, 0.01);
  for (std::size_t i = 0; i < traj.times.size(); i += 37) {
    const double t = traj.times[i];
    CHECK(std::abs(traj.states[i].mean[0] - Complex(0.0, -t)) < 1e-12);
    CHECK(traj.states[i].photon_numbers()[0] == doctest::Approx(t * t));
  }
  // a lasing drive from vacuum never creates second moments
  CHECK(traj.states.back().number.isZero(0.0));
  CHECK(traj.states.back().anomalous.isZero(0.0));
}

TEST_CASE("resonant lasing in a rotating frame") {
  const double w = 1.7, t = 4.0;
  const auto s = final_state(single_mode(w), PumpConfig::lasing_on(1, 0, w, 0.5), t, 0.001);
  CHECK(std::abs(s.mean[0] - Complex(0.0, -0.5 * t) * std::exp(Complex(0.0, -w * t))) < 1e-10);
}

TEST_CASE("degenerate parametric amplification") {
  const double w = 1.0, g0 = 0.1;
  const auto traj = evolve_driven(single_mode(w), PumpConfig::squeezing_on(1, 0, 2 * w, g0), 5.0, 0.001, std::nullopt, 500);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double expect = std::pow(std::sinh(2 * g0 * traj.times[i]), 2);
    CHECK(traj.states[i].photon_numbers()[0] == doctest::Approx(expect).epsilon(1e-9));
  }
  CHECK(traj.states.back().total_photons() == doctest::Approx(1.38109).epsilon(1e-5));
  CHECK(traj.states.back().mean.isZero(0.0));
}

TEST_CASE("moments agree with the truncated Fock-space evolution") {
  SUBCASE("lasing on a two-mode chain") {
    const auto g = build_chain(2, 1.0, 0.3);
    const auto p = PumpConfig::lasing_on(2, 0, 1.1, 0.4);
    const RVector fock = fock_oracle_evolve(g, p, 3.0, 0.002, 40);
    CHECK(max_abs(RVector(final_state(g, p, 3.0, 0.002).photon_numbers() - fock)) < 1e-6);
  }
  SUBCASE("squeezing on a two-mode chain") {
    const auto g = build_chain(2, 1.0, 0.3);
    const auto p = PumpConfig::squeezing_on(2, 0, 2.0, 0.1);
    const RVector fock = fock_oracle_evolve(g, p, 3.0, 0.002, 30);
    CHECK(max_abs(RVector(final_state(g, p, 3.0, 0.002).photon_numbers() - fock)) < 1e-4);
  }
  SUBCASE("two-mode squeezing profile on three modes") {
    const auto g = build_chain(3, 0.8, 0.25);
    PumpConfig p;
    p.drive = DriveType::Squeezing;
    p.squeezing_profile = CMatrix::Zero(3, 3);
    p.squeezing_profile(0, 2) = p.squeezing_profile(2, 0) = 0.5;
    p.squeezing_profile(1, 1) = Complex(0.0, 0.3);
    p.pump_frequency = 1.6;
    p.amplitude_scale = 0.15;
    const RVector fock = fock_oracle_evolve(g, p, 2.0, 0.002, 12);
    CHECK(max_abs(RVector(final_state(g, p, 2.0, 0.002).photon_numbers() - fock)) < 1e-4);
  }
  SUBCASE("zero pump keeps the vacuum") {
    const auto g = build_chain(3, 1.0, 0.5);
    CHECK(max_abs(fock_oracle_evolve(g, PumpConfig::squeezing_on(3, 1, 2.0, 0.0), 2.0, 0.01, 6)) < 1e-15);
    CHECK(final_state(g, PumpConfig::squeezing_on(3, 1, 2.0, 0.0), 2.0, 0.01).is_vacuum());
  }
  SUBCASE("cutoff too small") {
    const auto g = single_mode(0.0);
    CHECK_THROWS_AS(fock_oracle_evolve(g, PumpConfig::lasing_on(1, 0, 0.0, 1.0), 3.0, 0.01, 5), CutoffTooSmall);
  }
}

TEST_CASE("passive beamsplitter exchange") {
  const double c = 0.5;
  const auto g = build_chain(2, 0.0, c);
  const CVector a0 = (CVector(2) << Complex(0.3, 0.4), 0.0).finished();
  const auto s = evolve_passive(g, GaussianState::coherent(a0), std::numbers::pi / (2 * c));
  CHECK(std::abs(s.mean[0]) < 1e-14);
  CHECK(std::abs(s.mean[1] - Complex(0.0, -1.0) * a0[0]) < 1e-14);
}

TEST_CASE("passive propagator equals the matrix exponential") {
  std::mt19937 rng(3);
  for (bool real : {true, false}) {
    const CMatrix c = dqw::testing::random_hermitian(8, rng, 0.7, real);
    const auto eig = diagonalize(dqw::testing::graph_from_dense(c));
    for (double t : {0.0, 0.3, 2.5, 11.0}) {
      const CMatrix expected = (Complex(0.0, -t) * c).exp();
      CHECK(max_abs(CMatrix(passive_propagator(eig, t) - expected)) < 1e-10);
      const CMatrix u = passive_propagator(eig, t);
      CHECK(max_abs(CMatrix(u * u.adjoint() - CMatrix::Identity(8, 8))) < 1e-10);
    }
  }
}

TEST_CASE("undriven integration matches the passive walk") {
  std::mt19937 rng(21);
  const auto g = dqw::testing::graph_from_dense(dqw::testing::random_hermitian(5, rng));
  GaussianState init = GaussianState::coherent(dqw::testing::random_vector(5, rng));
  // add squeezed correlations by evolving a short squeezing drive first
  init = final_state(g, PumpConfig::squeezing_on(5, 2, 1.0, 0.2), 1.0, 0.001, init);
  const auto driven = final_state(g, PumpConfig::lasing_on(5, 0, 0.0, 0.0), 2.0, 0.0005, init);
  const auto passive = evolve_passive(g, init, 2.0);
  CHECK(moment_distance(driven, passive) < 1e-9);
  CHECK(driven.total_photons() == doctest::Approx(init.total_photons()).epsilon(1e-10));
}

TEST_CASE("RK4 converges at fourth order") {
  const auto g = build_chain(4, 1.0, 0.5);
  PumpConfig p = PumpConfig::squeezing_on(4, 1, 2.1, 0.3);
  const double t = 3.0;
  const auto a = final_state(g, p, t, 0.04);
  const auto b = final_state(g, p, t, 0.02);
  const auto c = final_state(g, p, t, 0.01);
  const double ratio = moment_distance(a, b) / moment_distance(b, c);
  CHECK(std::log2(ratio) == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("basis changes") {
  std::mt19937 rng(8);
  const auto g = dqw::testing::graph_from_dense(dqw::testing::random_hermitian(6, rng));
  const auto eig = diagonalize(g);
  const auto s = final_state(g, PumpConfig::squeezing_on(6, 0, 0.4, 0.2), 2.0, 0.002,
                             GaussianState::coherent(dqw::testing::random_vector(6, rng)));
  const auto e = to_eigenbasis(s, eig);
  CHECK(e.basis == Basis::Eigen);
  CHECK(e.total_photons() == doctest::Approx(s.total_photons()).epsilon(1e-12));
  CHECK(moment_distance(to_physical_basis(e, eig), s) < 1e-12);
  // the passive walk commutes with the change of basis
  const auto pe = evolve_passive(eig, e, 1.3);
  const auto pp = evolve_passive(eig, s, 1.3);
  CHECK(moment_distance(to_physical_basis(pe, eig), pp) < 1e-11);
  CHECK_THROWS_AS(to_eigenbasis(GaussianState::vacuum(3), eig), std::invalid_argument);
}

TEST_CASE("squeezing from vacuum stays pure and physical") {
  const auto g = build_chain(5, 1.0, 0.5);
  const auto eig = diagonalize(g);
  const auto s = final_state(g, PumpConfig::squeezing_on(5, 2, 2.0 * eig.frequencies[1], 0.15), 6.0, 0.002);
  const auto d = diagnose_state(s);
  CHECK(d.purity_deviation < 1e-8);
  CHECK(d.min_physicality_eigenvalue > -1e-9);
  CHECK(d.min_number_eigenvalue > -1e-10);
  CHECK_NOTHROW(validate_state(s));
  const RVector nu = symplectic_eigenvalues(s);
  for (int k = 0; k < nu.size(); ++k) CHECK(nu[k] == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("state constructors and validation") {
  const auto v = GaussianState::vacuum(3);
  CHECK(v.is_vacuum());
  CHECK(v.total_photons() == 0.0);
  const RMatrix sigma = quadrature_covariance(v);
  CHECK(max_abs(CMatrix((sigma - 0.5 * RMatrix::Identity(6, 6)).cast<Complex>())) < 1e-15);

  const auto c = GaussianState::coherent((CVector(2) << Complex(1, 1), 2.0).finished());
  CHECK(c.total_photons() == doctest::Approx(6.0));
  CHECK(!c.is_vacuum());

  GaussianState bad = GaussianState::vacuum(2);
  bad.number(0, 0) = -0.5;
  CHECK_THROWS_AS(validate_state(bad), ValidationError);
  bad = GaussianState::vacuum(2);
  bad.anomalous(0, 1) = 0.1;
  CHECK_THROWS_AS(validate_state(bad), ValidationError);
  bad = GaussianState::vacuum(2);
  bad.anomalous(0, 0) = 0.5;  // |M| larger than allowed by N = 0
  CHECK_THROWS_AS(validate_state(bad), ValidationError);
  CHECK_THROWS_AS(GaussianState::vacuum(0), std::invalid_argument);
}

TEST_CASE("integrator argument checks") {
  const auto g = build_chain(3, 1.0, 0.5);
  const auto p = PumpConfig::lasing_on(3, 1, 1.0, 1.0);
  CHECK_THROWS_AS(evolve_driven(g, p, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(evolve_driven(g, p, 1.0, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(evolve_driven(g, p, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(evolve_driven(g, p, 0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(evolve_driven(g, PumpConfig::lasing_on(4, 1, 1.0, 1.0), 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(evolve_driven(g, p, 1.0, 0.1, GaussianState::vacuum(3, Basis::Eigen)), std::invalid_argument);
  CHECK_THROWS_AS(evolve_driven(g, p, 1.0, 0.1, std::nullopt, 0), std::invalid_argument);
}

TEST_CASE("runaway integration reports an instability") {
  CHECK_THROWS_AS(evolve_driven(single_mode(1.0), PumpConfig::squeezing_on(1, 0, 2.0, 5.0), 500.0, 0.5),
                  NumericalInstability);
}

TEST_CASE("recording cadence") {
  const auto traj = evolve_driven(build_chain(2, 1.0, 0.5), PumpConfig::lasing_on(2, 0, 1.0, 1.0), 1.0, 0.01,
                                  std::nullopt, 30);
  // 100 steps: t = 0, every 30th step, and the final time
  REQUIRE(traj.times.size() == 5);
  CHECK(traj.times.front() == 0.0);
  CHECK(traj.times[1] == doctest::Approx(0.3));
  CHECK(traj.times.back() == 1.0);
  CHECK(default_time_step(build_chain(2, 1.0, 0.5)) == doctest::Approx(1e-3 * 2 * std::numbers::pi / 1.5));
}
