// Copyright 2026 The dqw Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "dqw/observables.hpp"
#include "test_util.hpp"

using namespace dqw;
using dqw::testing::max_abs;

TEST_CASE("photon numbers of simple states") {
  const auto eig = diagonalize(build_chain(3, 1.0, 0.5));
  CHECK(max_abs(photon_numbers(GaussianState::vacuum(3), Basis::Physical)) == 0.0);
  CHECK(max_abs(photon_numbers(GaussianState::vacuum(3), Basis::Eigen, &eig)) < 1e-15);

  const CVector a = (CVector(3) << Complex(1, 1), 0.0, Complex(0, -2)).finished();
  const auto c = GaussianState::coherent(a);
  const RVector n = photon_numbers(c, Basis::Physical);
  CHECK(n[0] == doctest::Approx(2.0));
  CHECK(n[1] == 0.0);
  CHECK(n[2] == doctest::Approx(4.0));
  // eigenbasis occupations are |T a|^2
  const RVector ne = photon_numbers(c, Basis::Eigen, &eig);
  const CVector ta = eig.transform * a;
  for (int k = 0; k < 3; ++k) CHECK(ne[k] == doctest::Approx(std::norm(ta[k])));
  CHECK(ne.sum() == doctest::Approx(n.sum()));
  CHECK_THROWS_AS(photon_numbers(c, Basis::Eigen), std::invalid_argument);
}

TEST_CASE("total photon number does not depend on the basis") {
  std::mt19937 rng(4);
  const auto g = dqw::testing::graph_from_dense(dqw::testing::random_hermitian(6, rng));
  const auto eig = diagonalize(g);
  const auto traj = evolve_driven(g, PumpConfig::squeezing_on(6, 3, 0.5, 0.2), 3.0, 0.005,
                                  GaussianState::coherent(dqw::testing::random_vector(6, rng)), 100);
  const auto phys = photon_series(traj, Basis::Physical);
  const auto eigs = photon_series(traj, Basis::Eigen, &eig);
  const auto tot = total_series(traj);
  REQUIRE(tot.values.rows() == static_cast<Eigen::Index>(traj.times.size()));
  for (Eigen::Index i = 0; i < tot.values.rows(); ++i) {
    CHECK(phys.values.row(i).sum() == doctest::Approx(tot.values(i, 0)).epsilon(1e-12));
    CHECK(eigs.values.row(i).sum() == doctest::Approx(tot.values(i, 0)).epsilon(1e-12));
  }
  CHECK(phys.kind == SeriesKind::PhotonPhysical);
  CHECK(eigs.kind == SeriesKind::PhotonEigen);
  CHECK(to_string(SeriesKind::VarianceRescaled) == "variance_rescaled");
}

TEST_CASE("position variances") {
  const RVector x = (RVector(3) << -1.0, 0.0, 1.0).finished();
  const auto c = GaussianState::coherent((CVector(3) << 1.0, 0.0, 2.0).finished());
  CHECK(position_variance(c, x) == doctest::Approx(5.0));
  CHECK(position_variance_rescaled(c, x) == doctest::Approx(1.0));
  CHECK(position_variance_central(c, x) == doctest::Approx(0.64));
  CHECK_THROWS_AS(position_variance(c, RVector::Zero(2)), std::invalid_argument);
  auto e = c;
  e.basis = Basis::Eigen;
  CHECK_THROWS_AS(position_variance(e, x), std::invalid_argument);
}

TEST_CASE("variance series uses the chain positions") {
  const auto g = build_chain(11, 1.0, 0.5);
  const auto traj = evolve_driven(g, PumpConfig::lasing_on(11, 5, 2.0, 1.0), 2.0, 0.01, std::nullopt, 20);
  const auto v = variance_series(traj, SeriesKind::Variance);
  const auto r = variance_series(traj, SeriesKind::VarianceRescaled);
  const auto tot = total_series(traj);
  for (Eigen::Index i = 1; i < v.values.rows(); ++i) {
    CHECK(v.values(i, 0) == doctest::Approx(position_variance(traj.states[i], *g.positions())));
    CHECK(r.values(i, 0) == doctest::Approx(v.values(i, 0) / tot.values(i, 0)));
  }
  CHECK_THROWS_AS(variance_series(traj, SeriesKind::Total), std::invalid_argument);
}

TEST_CASE("growth exponent recovers synthetic power laws") {
  std::vector<double> t;
  for (int i = 1; i <= 200; ++i) t.push_back(0.1 * i);
  for (double p : {1.0, 2.0, 3.0, 0.5}) {
    RVector v(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) v[i] = 3.7 * std::pow(t[i], p);
    const auto fit = growth_exponent(t, v, 1.0, 20.0);
    CHECK(std::abs(fit.exponent - p) < 1e-6);
    CHECK(fit.log_prefactor == doctest::Approx(std::log(3.7)));
    CHECK(fit.r2_power == doctest::Approx(1.0));
    CHECK(fit.samples == 191);
  }
  RVector e(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) e[i] = std::exp(0.8 * t[i]);
  const auto fit = growth_exponent(t, e, 1.0, 20.0);
  CHECK(fit.rate == doctest::Approx(0.8));
  CHECK(fit.r2_exponential == doctest::Approx(1.0));
  CHECK(fit.r2_power < fit.r2_exponential);
}

TEST_CASE("growth exponent rejects unusable windows") {
  std::vector<double> t;
  for (int i = 0; i < 30; ++i) t.push_back(i);
  RVector v = RVector::Constant(30, 1.0);
  v[12] = 0.0;
  try {
    growth_exponent(t, v, 1.0, 29.0);
    FAIL("expected an error");
  } catch (const std::invalid_argument& err) {
    CHECK(std::string(err.what()).find("sample 12") != std::string::npos);
  }
  CHECK_THROWS_AS(growth_exponent(t, RVector::Ones(30), 1.0, 5.0), std::invalid_argument);
  CHECK_THROWS_AS(growth_exponent(t, RVector::Ones(29), 1.0, 29.0), std::invalid_argument);
  // the t = 0 sample outside the window is ignored
  CHECK_NOTHROW(growth_exponent(t, RVector::Ones(30), 1.0, 29.0));
}

TEST_CASE("participation ratio") {
  CHECK(participation_ratio(RVector::Ones(7)) == doctest::Approx(7.0));
  CHECK(participation_ratio((RVector(4) << 0.0, 3.0, 0.0, 0.0).finished()) == doctest::Approx(1.0));
  CHECK(participation_ratio((RVector(2) << 1.0, 3.0).finished()) == doctest::Approx(16.0 / 10.0));
}

TEST_CASE("frequency sweep") {
  const auto g = build_chain(9, 1.0, 0.5);
  const auto tmpl = PumpConfig::lasing_on(9, 4, 0.0, 1.0);
  SUBCASE("a single frequency equals a direct run") {
    const RMatrix s = frequency_sweep(g, tmpl, {1.3}, 5.0, 0.01);
    auto p = tmpl;
    p.pump_frequency = 1.3;
    const RVector direct = evolve_driven(g, p, 5.0, 0.01).states.back().photon_numbers();
    CHECK(max_abs(RVector(s.row(0).transpose() - direct)) == 0.0);
  }
  SUBCASE("results do not depend on the thread count") {
    std::vector<double> omegas;
    for (int i = 0; i < 13; ++i) omegas.push_back(0.15 * i);
    const RMatrix a = frequency_sweep(g, tmpl, omegas, 4.0, 0.01, 1);
    const RMatrix b = frequency_sweep(g, tmpl, omegas, 4.0, 0.01, 4);
    CHECK(a.rows() == 13);
    CHECK(a.cols() == 9);
    CHECK((a.array() == b.array()).all());
  }
  CHECK_THROWS_AS(frequency_sweep(g, tmpl, {}, 1.0, 0.01), std::invalid_argument);
}
