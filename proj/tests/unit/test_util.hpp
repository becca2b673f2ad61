// Copyright 2026 The dqw Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <random>
#include <vector>

#include <Eigen/Sparse>

#include "dqw/graphs.hpp"
#include "dqw/pump.hpp"

namespace dqw::testing {

inline double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }
inline double max_abs(const CVector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }
inline double max_abs(const RVector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

inline CouplingGraph graph_from_dense(const CMatrix& c) {
  return CouplingGraph(c.sparseView(0.0, 0.0));
}

/// Dense random Hermitian coupling matrix with entries of order `scale`.
inline CMatrix random_hermitian(int n, std::mt19937& rng, double scale = 1.0, bool real = false) {
  std::normal_distribution<double> d(0.0, scale);
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(d(rng), real ? 0.0 : d(rng));
  return 0.5 * (a + a.adjoint());
}

inline CVector random_vector(int n, std::mt19937& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  CVector v(n);
  for (int i = 0; i < n; ++i) v[i] = Complex(d(rng), d(rng));
  return v;
}

inline CMatrix random_symmetric(int n, std::mt19937& rng) {
  const CMatrix a = CMatrix::NullaryExpr(n, n, [&] {
    std::normal_distribution<double> d(0.0, 1.0);
    return Complex(d(rng), d(rng));
  });
  return 0.5 * (a + a.transpose());
}

}  // namespace dqw::testing
