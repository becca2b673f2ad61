// Copyright 2026 The dqw Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "dqw/graphs.hpp"
#include "test_util.hpp"

using namespace dqw;
using dqw::testing::max_abs;

namespace {

double hermiticity(const CouplingGraph& g) {
  const CMatrix c = g.dense();
  return max_abs(CMatrix(c - c.adjoint()));
}

std::vector<int> degrees(const CouplingGraph& g) {
  std::vector<int> deg(g.n_modes(), 0);
  const auto& c = g.coupling();
  for (int k = 0; k < c.outerSize(); ++k)
    for (SparseCMatrix::InnerIterator it(c, k); it; ++it)
      if (it.row() != it.col()) ++deg[it.row()];
  return deg;
}

}  // namespace

TEST_CASE("chain of two modes") {
  const auto g = build_chain(2, 1.0, 0.5);
  CMatrix expect(2, 2);
  expect << 1.0, 0.5, 0.5, 1.0;
  CHECK(max_abs(CMatrix(g.dense() - expect)) == 0.0);
  CHECK(g.positions().has_value());
  CHECK((*g.positions())[0] == -0.5);
  CHECK((*g.positions())[1] == 0.5);
}

TEST_CASE("chain of 51 modes has centred integer positions") {
  const auto g = build_chain(51, 1.0, 0.5);
  REQUIRE(g.n_modes() == 51);
  const RVector& x = *g.positions();
  CHECK(x[0] == -25.0);
  CHECK(x[25] == 0.0);
  CHECK(x[50] == 25.0);
  CHECK(g.at(10, 11) == Complex(0.5));
  CHECK(g.at(10, 12) == Complex(0.0));
  CHECK(g.at(7, 7) == Complex(1.0));
}

TEST_CASE("single-mode chain ignores the coupling") {
  const auto g = build_chain(1, 2.0, 0.3);
  REQUIRE(g.n_modes() == 1);
  CHECK(g.at(0, 0) == Complex(2.0));
  CHECK(g.coupling().nonZeros() == 1);
}

TEST_CASE("chain rejects zero modes") { CHECK_THROWS_AS(build_chain(0, 1.0, 0.5), std::invalid_argument); }

TEST_CASE("glued trees of depth 1") {
  const auto g = build_glued_trees(1);
  REQUIRE(g.n_modes() == 6);
  const auto deg = degrees(g);
  CHECK(deg[entrance_index(g)] == 2);
  CHECK(deg[exit_index(g)] == 2);
  for (int v = 1; v <= 4; ++v) CHECK(deg[v] == 3);
  CHECK(g.labels().front() == "c0.0:entrance");
  CHECK(g.labels().back() == "c3.0:exit");
}

TEST_CASE("glued trees vertex counts") {
  CHECK(build_glued_trees(3).n_modes() == 30);
  CHECK(build_glued_trees(11).n_modes() == 8190);
  CHECK_THROWS_AS(build_glued_trees(0), std::invalid_argument);
}

TEST_CASE("glued trees degrees and edge count") {
  for (int d = 1; d <= 8; ++d) {
    CAPTURE(d);
    const auto g = build_glued_trees(d);
    const auto deg = degrees(g);
    int twos = 0, edges2 = 0;
    for (int x : deg) {
      CHECK((x == 2 || x == 3));
      twos += x == 2;
      edges2 += x;
    }
    CHECK(twos == 2);
    const int leaves = 1 << d;
    CHECK(edges2 / 2 == 2 * (2 * leaves - 2) + 2 * leaves);
    CHECK(hermiticity(g) <= 1e-12);
  }
}

TEST_CASE("gluing joins left leaf i to right leaves i and i+1") {
  const int d = 3, leaves = 1 << d;
  const auto g = build_glued_trees(d);
  for (int i = 0; i < leaves; ++i) {
    const int left = g.index_of("c" + std::to_string(d) + "." + std::to_string(i));
    const int right_a = g.index_of("c" + std::to_string(d + 1) + "." + std::to_string(i));
    const int right_b = g.index_of("c" + std::to_string(d + 1) + "." + std::to_string((i + 1) % leaves));
    CHECK(g.at(left, right_a) == Complex(1.0));
    CHECK(g.at(left, right_b) == Complex(1.0));
  }
}

TEST_CASE("column reduction of depth 1") {
  const auto r = column_reduce_glued_trees(build_glued_trees(1));
  REQUIRE(r.n_modes() == 4);
  CHECK(std::abs(r.at(0, 1) - std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(r.at(1, 2) - 2.0) < 1e-15);
  CHECK(std::abs(r.at(2, 3) - std::sqrt(2.0)) < 1e-15);
  CHECK(*r.multiplicities() == std::vector<int>{1, 2, 2, 1});
}

TEST_CASE("column reduction with edge weight 1/sqrt2 gives unit couplings and a sqrt2 centre") {
  const auto r = column_reduce_glued_trees(build_glued_trees(3, 1.0 / std::sqrt(2.0)));
  REQUIRE(r.n_modes() == 8);
  const double expect[] = {1, 1, 1, std::sqrt(2.0), 1, 1, 1};
  for (int m = 0; m < 7; ++m) CHECK(std::abs(r.at(m, m + 1) - expect[m]) < 1e-14);
  CHECK(*r.multiplicities() == std::vector<int>{1, 2, 4, 8, 8, 4, 2, 1});
}

TEST_CASE("column reduction length and multiplicity sum") {
  for (int d = 1; d <= 9; ++d) {
    CAPTURE(d);
    const auto r = column_reduce_glued_trees(build_glued_trees(d));
    CHECK(r.n_modes() == 2 * d + 2);
    int total = 0;
    for (int s : *r.multiplicities()) total += s;
    CHECK(total == (1 << (d + 2)) - 2);
    const auto direct = build_reduced_glued_trees(d);
    CHECK(max_abs(CMatrix(direct.dense() - r.dense())) <= 1e-14);
  }
}

TEST_CASE("column reduction needs column labels") {
  CHECK_THROWS_AS(column_reduce_glued_trees(build_chain(6, 0.0, 1.0)), std::invalid_argument);
}

TEST_CASE("graph codec roundtrips") {
  SUBCASE("two-mode chain document") {
    const auto g = read_graph(R"({"n_modes": 2, "onsite": [1.0, 1.0], "edges": [{"i": 0, "j": 1, "re": 0.5, "im": 0}],
                                  "positions": [-0.5, 0.5]})");
    CHECK(g == build_chain(2, 1.0, 0.5));
  }
  SUBCASE("glued trees") {
    const auto g = build_glued_trees(2);
    CHECK(read_graph(write_graph(g)) == g);
  }
  SUBCASE("reduced chain keeps multiplicities") {
    const auto g = build_reduced_glued_trees(4, 1.0 / std::sqrt(2.0));
    const auto back = read_graph(write_graph(g));
    CHECK(back == g);
    CHECK(back.multiplicities() == g.multiplicities());
  }
  SUBCASE("complex couplings with awkward doubles") {
    std::mt19937 rng(7);
    const CMatrix c = dqw::testing::random_hermitian(6, rng, 0.3);
    const auto g = dqw::testing::graph_from_dense(c);
    const auto back = read_graph(write_graph(g));
    CHECK(back == g);
    CHECK(max_abs(CMatrix(back.dense() - g.dense())) == 0.0);
  }
}

TEST_CASE("non-Hermitian document names the offending pair") {
  const std::string doc = R"({"n_modes": 2, "edges": [{"i": 0, "j": 1, "re": 0.5}, {"i": 1, "j": 0, "re": 0.4}]})";
  try {
    read_graph(doc);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("(0,1)/(1,0)") != std::string::npos);
  }
}

TEST_CASE("constructor rejects a non-Hermitian matrix") {
  CMatrix c = CMatrix::Zero(2, 2);
  c(0, 1) = 0.5;
  c(1, 0) = 0.4;
  CHECK_THROWS_AS(dqw::testing::graph_from_dense(c), ValidationError);
}

TEST_CASE("malformed documents report a location") {
  auto message = [](const std::string& doc) {
    try {
      read_graph(doc);
    } catch (const ParseError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message(R"({"n_modes": 2, "edges": [)").find("byte") != std::string::npos);
  CHECK(message(R"({"n_modes": 2, "edges": [{"i": 0, "j": 5, "re": 1}]})").find("/edges/0/j") != std::string::npos);
  CHECK(message(R"({"edges": []})").find("/n_modes") != std::string::npos);
  CHECK(message(R"({"n_modes": 2, "onsite": [1]})").find("/onsite") != std::string::npos);
}

TEST_CASE("metadata invariants") {
  SparseCMatrix c(2, 2);
  CHECK_THROWS_AS(CouplingGraph(c, {"a"}), ValidationError);
  CHECK_THROWS_AS(CouplingGraph(c, {}, RVector::Zero(3)), ValidationError);
  CHECK_THROWS_AS(CouplingGraph(c, {}, std::nullopt, std::vector<int>{1, 0}), ValidationError);
  CHECK_THROWS_AS(CouplingGraph(SparseCMatrix(0, 0)), std::invalid_argument);
}
