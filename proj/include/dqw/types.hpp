// Copyright 2026 The dqw Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dqw {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

// Error taxonomy. std::invalid_argument is used for plain argument errors.

/// Input violates a documented invariant (e.g. a non-Hermitian coupling).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed structured document; the message carries the location.
class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed (eigensolver, root bracketing, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// State left its physical manifold during integration; retry with smaller dt.
class NumericalInstability : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Fock-space truncation leaked population into the top level.
class CutoffTooSmall : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

enum class DriveType { Lasing, Squeezing };
enum class Basis { Physical, Eigen };

std::string to_string(DriveType d);
std::string to_string(Basis b);
DriveType drive_type_from_string(const std::string& s);

}  // namespace dqw
