// Copyright 2026 The dqw Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Sparse>

#include "dqw/types.hpp"

namespace dqw {

using SparseCMatrix = Eigen::SparseMatrix<Complex>;

/// Coupled-mode graph: the Hermitian hopping matrix C (on-site terms on the
/// diagonal) plus per-mode metadata. Immutable once constructed; every
/// constructor path runs the invariant checks.
class CouplingGraph {
 public:
  static constexpr double kHermiticityTolerance = 1e-12;

  CouplingGraph(SparseCMatrix coupling, std::vector<std::string> labels = {},
                std::optional<RVector> positions = std::nullopt,
                std::optional<std::vector<int>> multiplicities = std::nullopt);

  int n_modes() const { return static_cast<int>(coupling_.rows()); }
  const SparseCMatrix& coupling() const { return coupling_; }
  CMatrix dense() const { return CMatrix(coupling_); }
  Complex at(int i, int j) const { return coupling_.coeff(i, j); }

  const std::vector<std::string>& labels() const { return labels_; }
  const std::optional<RVector>& positions() const { return positions_; }
  const std::optional<std::vector<int>>& multiplicities() const { return multiplicities_; }

  /// True when every coupling has zero imaginary part.
  bool is_real() const;
  /// Index of the mode carrying `label`; throws std::invalid_argument if absent.
  int index_of(std::string_view label) const;

  friend bool operator==(const CouplingGraph& a, const CouplingGraph& b);

 private:
  SparseCMatrix coupling_;
  std::vector<std::string> labels_;
  std::optional<RVector> positions_;
  std::optional<std::vector<int>> multiplicities_;
};

/// Uniform 1D chain with on-site energy `onsite` and nearest-neighbour
/// coupling `coupling`. Positions are centred integers, -(n-1)/2 ... (n-1)/2.
CouplingGraph build_chain(int n_modes, double onsite, double coupling);

/// Two complete binary trees of the given depth whose leaf columns are glued
/// by a cycle: left leaf i is joined to right leaves i and (i+1) mod 2^depth.
/// Vertices are ordered column by column; labels are "c<m>.<i>", with the
/// roots additionally tagged ":entrance" (index 0) and ":exit" (last index).
CouplingGraph build_glued_trees(int depth, double edge_weight = 1.0);

/// Depth recovered from glued-trees column labels; throws std::invalid_argument
/// when the labels do not describe a glued-trees graph.
int glued_trees_depth(const CouplingGraph& graph);

int entrance_index(const CouplingGraph& graph);
int exit_index(const CouplingGraph& graph);

/// Column-symmetric reduction of a glued-trees graph to a 2*depth+2 chain.
/// Adjacent-column coupling is the summed inter-column coupling divided by
/// sqrt(size_m * size_{m+1}); multiplicities hold the column sizes.
CouplingGraph column_reduce_glued_trees(const CouplingGraph& graph);

/// The column-reduced chain built directly, without the full graph. Equal to
/// column_reduce_glued_trees(build_glued_trees(depth, edge_weight)).
CouplingGraph build_reduced_glued_trees(int depth, double edge_weight = 1.0);

/// JSON graph codec. Each off-diagonal coupling is stored once (i < j).
std::string write_graph(const CouplingGraph& graph);
CouplingGraph read_graph(std::string_view text);

CouplingGraph read_graph_file(const std::string& path);

}  // namespace dqw
