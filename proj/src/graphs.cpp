// Copyright 2026 The dqw Authors
// SPDX-License-Identifier: Apache-2.0

#include "dqw/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include <json.hpp>

namespace dqw {

using json = nlohmann::json;

std::string to_string(DriveType d) { return d == DriveType::Lasing ? "lasing" : "squeezing"; }
std::string to_string(Basis b) { return b == Basis::Physical ? "physical" : "eigen"; }

DriveType drive_type_from_string(const std::string& s) {
  if (s == "lasing") return DriveType::Lasing;
  if (s == "squeezing") return DriveType::Squeezing;
  throw std::invalid_argument("unknown drive type '" + s + "' (expected lasing|squeezing)");
}

namespace {

using Triplet = Eigen::Triplet<Complex>;

SparseCMatrix from_triplets(int n, const std::vector<Triplet>& t) {
  SparseCMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

}  // namespace

CouplingGraph::CouplingGraph(SparseCMatrix coupling, std::vector<std::string> labels,
                             std::optional<RVector> positions,
                             std::optional<std::vector<int>> multiplicities)
    : coupling_(std::move(coupling)),
      labels_(std::move(labels)),
      positions_(std::move(positions)),
      multiplicities_(std::move(multiplicities)) {
  const auto n = coupling_.rows();
  if (n < 1 || coupling_.cols() != n)
    throw std::invalid_argument("coupling graph needs a square matrix with n_modes >= 1");
  coupling_.makeCompressed();

  for (int k = 0; k < coupling_.outerSize(); ++k) {
    for (SparseCMatrix::InnerIterator it(coupling_, k); it; ++it) {
      const auto i = it.row(), j = it.col();
      if (std::abs(it.value() - std::conj(coupling_.coeff(j, i))) > kHermiticityTolerance) {
        std::ostringstream os;
        os << "coupling matrix is not Hermitian at (" << std::min(i, j) << "," << std::max(i, j)
           << ")/(" << std::max(i, j) << "," << std::min(i, j) << ")";
        throw ValidationError(os.str());
      }
    }
  }

  if (labels_.empty()) {
    labels_.reserve(n);
    for (int i = 0; i < n; ++i) labels_.push_back(std::to_string(i));
  }
  if (static_cast<Eigen::Index>(labels_.size()) != n)
    throw ValidationError("labels length does not match n_modes");
  if (positions_ && positions_->size() != n)
    throw ValidationError("positions length does not match n_modes");
  if (multiplicities_) {
    if (static_cast<Eigen::Index>(multiplicities_->size()) != n)
      throw ValidationError("multiplicities length does not match n_modes");
    for (std::size_t i = 0; i < multiplicities_->size(); ++i)
      if ((*multiplicities_)[i] < 1)
        throw ValidationError("multiplicity at mode " + std::to_string(i) + " must be >= 1");
  }
}

bool CouplingGraph::is_real() const {
  for (int k = 0; k < coupling_.outerSize(); ++k)
    for (SparseCMatrix::InnerIterator it(coupling_, k); it; ++it)
      if (it.value().imag() != 0.0) return false;
  return true;
}

int CouplingGraph::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) return static_cast<int>(i);
  throw std::invalid_argument("no mode labelled '" + std::string(label) + "'");
}

bool operator==(const CouplingGraph& a, const CouplingGraph& b) {
  if (a.n_modes() != b.n_modes() || a.labels_ != b.labels_ ||
      a.multiplicities_ != b.multiplicities_ || a.positions_.has_value() != b.positions_.has_value())
    return false;
  if (a.positions_ && *a.positions_ != *b.positions_) return false;
  auto entries = [](const SparseCMatrix& m) {
    std::vector<std::tuple<Eigen::Index, Eigen::Index, double, double>> out;
    for (int k = 0; k < m.outerSize(); ++k)
      for (SparseCMatrix::InnerIterator it(m, k); it; ++it)
        if (it.value() != Complex{})
          out.emplace_back(it.col(), it.row(), it.value().real(), it.value().imag());
    return out;
  };
  return entries(a.coupling_) == entries(b.coupling_);
}

CouplingGraph build_chain(int n_modes, double onsite, double coupling) {
  if (n_modes < 1) throw std::invalid_argument("build_chain: n_modes must be >= 1");
  std::vector<Triplet> t;
  t.reserve(3 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    t.emplace_back(k, k, onsite);
    if (k + 1 < n_modes) {
      t.emplace_back(k, k + 1, coupling);
      t.emplace_back(k + 1, k, coupling);
    }
  }
  RVector positions(n_modes);
  for (int k = 0; k < n_modes; ++k) positions[k] = k - 0.5 * (n_modes - 1);
  return CouplingGraph(from_triplets(n_modes, t), {}, positions);
}

namespace {

std::vector<int> column_sizes(int depth) {
  std::vector<int> sizes;
  for (int m = 0; m <= depth; ++m) sizes.push_back(1 << m);
  for (int m = depth; m >= 0; --m) sizes.push_back(1 << m);
  return sizes;
}

std::vector<int> column_offsets(const std::vector<int>& sizes) {
  std::vector<int> start(sizes.size() + 1, 0);
  for (std::size_t m = 0; m < sizes.size(); ++m) start[m + 1] = start[m] + sizes[m];
  return start;
}

// Parses "c<m>.<i>" with an optional ":tag" suffix.
std::optional<std::pair<int, int>> parse_column_label(const std::string& label) {
  if (label.size() < 4 || label[0] != 'c') return std::nullopt;
  const auto dot = label.find('.');
  if (dot == std::string::npos) return std::nullopt;
  const auto colon = label.find(':');
  try {
    std::size_t used = 0;
    const int m = std::stoi(label.substr(1, dot - 1), &used);
    if (used != dot - 1) return std::nullopt;
    const auto tail = label.substr(dot + 1, colon == std::string::npos ? std::string::npos : colon - dot - 1);
    const int i = std::stoi(tail, &used);
    if (used != tail.size() || m < 0 || i < 0) return std::nullopt;
    return std::make_pair(m, i);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

CouplingGraph build_glued_trees(int depth, double edge_weight) {
  if (depth < 1) throw std::invalid_argument("build_glued_trees: depth must be >= 1");
  if (depth > 20) throw std::invalid_argument("build_glued_trees: depth > 20 is not supported");
  const auto sizes = column_sizes(depth);
  const auto start = column_offsets(sizes);
  const int n = start.back();
  const int last = 2 * depth + 1;

  std::vector<Triplet> t;
  auto link = [&](int a, int b) {
    t.emplace_back(a, b, edge_weight);
    t.emplace_back(b, a, edge_weight);
  };
  for (int m = 0; m < depth; ++m) {
    for (int i = 0; i < (1 << m); ++i) {
      for (int child : {2 * i, 2 * i + 1}) {
        link(start[m] + i, start[m + 1] + child);
        link(start[last - m] + i, start[last - m - 1] + child);
      }
    }
  }
  const int leaves = 1 << depth;
  for (int i = 0; i < leaves; ++i) {
    link(start[depth] + i, start[depth + 1] + i);
    link(start[depth] + i, start[depth + 1] + (i + 1) % leaves);
  }

  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t m = 0; m < sizes.size(); ++m)
    for (int i = 0; i < sizes[m]; ++i) labels.push_back("c" + std::to_string(m) + "." + std::to_string(i));
  labels.front() += ":entrance";
  labels.back() += ":exit";
  return CouplingGraph(from_triplets(n, t), std::move(labels));
}

int glued_trees_depth(const CouplingGraph& graph) {
  int max_col = -1;
  for (const auto& l : graph.labels()) {
    const auto parsed = parse_column_label(l);
    if (!parsed) throw std::invalid_argument("graph has no glued-trees column label at '" + l + "'");
    max_col = std::max(max_col, parsed->first);
  }
  if (max_col < 3 || max_col % 2 == 0)
    throw std::invalid_argument("column labels do not describe a glued-trees graph");
  const int depth = (max_col - 1) / 2;
  if (graph.n_modes() != (1 << (depth + 2)) - 2)
    throw std::invalid_argument("vertex count does not match glued-trees depth");
  return depth;
}

int entrance_index(const CouplingGraph& graph) {
  for (std::size_t i = 0; i < graph.labels().size(); ++i)
    if (graph.labels()[i].ends_with(":entrance") || graph.labels()[i] == "entrance") return static_cast<int>(i);
  throw std::invalid_argument("graph has no entrance mode");
}

int exit_index(const CouplingGraph& graph) {
  for (std::size_t i = 0; i < graph.labels().size(); ++i)
    if (graph.labels()[i].ends_with(":exit") || graph.labels()[i] == "exit") return static_cast<int>(i);
  throw std::invalid_argument("graph has no exit mode");
}

CouplingGraph column_reduce_glued_trees(const CouplingGraph& graph) {
  const int depth = glued_trees_depth(graph);
  const int n_cols = 2 * depth + 2;
  const auto sizes = column_sizes(depth);

  std::vector<int> column(graph.n_modes());
  std::vector<int> count(n_cols, 0);
  for (int v = 0; v < graph.n_modes(); ++v) {
    column[v] = parse_column_label(graph.labels()[v])->first;
    ++count[column[v]];
  }
  if (count != sizes) throw std::invalid_argument("column sizes do not match a glued-trees graph");

  std::vector<Complex> onsite(n_cols, 0.0), forward(n_cols, 0.0);
  const auto& c = graph.coupling();
  for (int k = 0; k < c.outerSize(); ++k) {
    for (SparseCMatrix::InnerIterator it(c, k); it; ++it) {
      const int a = column[it.row()], b = column[it.col()];
      if (a == b) {
        if (it.row() != it.col())
          throw std::invalid_argument("glued-trees graph has an intra-column edge");
        onsite[a] += it.value();
      } else if (b == a + 1) {
        forward[a] += it.value();
      } else if (a != b + 1) {
        throw std::invalid_argument("glued-trees graph has an edge skipping a column");
      }
    }
  }

  std::vector<Triplet> t;
  for (int m = 0; m < n_cols; ++m) {
    const Complex diag = onsite[m] / static_cast<double>(sizes[m]);
    if (diag != Complex{}) t.emplace_back(m, m, diag);
    if (m + 1 < n_cols) {
      const Complex w = forward[m] / std::sqrt(static_cast<double>(sizes[m]) * sizes[m + 1]);
      t.emplace_back(m, m + 1, w);
      t.emplace_back(m + 1, m, std::conj(w));
    }
  }
  std::vector<std::string> labels;
  for (int m = 0; m < n_cols; ++m) labels.push_back("c" + std::to_string(m) + ".0");
  labels.front() += ":entrance";
  labels.back() += ":exit";
  return CouplingGraph(from_triplets(n_cols, t), std::move(labels), std::nullopt, sizes);
}

CouplingGraph build_reduced_glued_trees(int depth, double edge_weight) {
  if (depth < 1) throw std::invalid_argument("build_reduced_glued_trees: depth must be >= 1");
  if (depth > 28) throw std::invalid_argument("build_reduced_glued_trees: depth > 28 is not supported");
  const auto sizes = column_sizes(depth);
  const int n_cols = 2 * depth + 2;
  std::vector<Triplet> t;
  for (int m = 0; m + 1 < n_cols; ++m) {
    const double edges = (m == depth) ? 2.0 * sizes[m] : static_cast<double>(std::max(sizes[m], sizes[m + 1]));
    const double w = edge_weight * edges / std::sqrt(static_cast<double>(sizes[m]) * sizes[m + 1]);
    t.emplace_back(m, m + 1, w);
    t.emplace_back(m + 1, m, w);
  }
  std::vector<std::string> labels;
  for (int m = 0; m < n_cols; ++m) labels.push_back("c" + std::to_string(m) + ".0");
  labels.front() += ":entrance";
  labels.back() += ":exit";
  return CouplingGraph(from_triplets(n_cols, t), std::move(labels), std::nullopt, sizes);
}

std::string write_graph(const CouplingGraph& graph) {
  const int n = graph.n_modes();
  json doc;
  doc["n_modes"] = n;
  json onsite = json::array();
  std::map<std::pair<int, int>, Complex> upper;
  const auto& c = graph.coupling();
  for (int k = 0; k < c.outerSize(); ++k)
    for (SparseCMatrix::InnerIterator it(c, k); it; ++it)
      if (it.row() < it.col() && it.value() != Complex{})
        upper[{static_cast<int>(it.row()), static_cast<int>(it.col())}] = it.value();
  for (int i = 0; i < n; ++i) {
    const Complex d = graph.at(i, i);
    if (d.imag() == 0.0)
      onsite.push_back(d.real());
    else
      onsite.push_back(json::array({d.real(), d.imag()}));
  }
  doc["onsite"] = onsite;
  json edges = json::array();
  for (const auto& [ij, v] : upper)
    edges.push_back({{"i", ij.first}, {"j", ij.second}, {"re", v.real()}, {"im", v.imag()}});
  doc["edges"] = edges;
  if (graph.positions())
    doc["positions"] = std::vector<double>(graph.positions()->data(), graph.positions()->data() + n);
  doc["labels"] = graph.labels();
  if (graph.multiplicities()) doc["multiplicities"] = *graph.multiplicities();
  return doc.dump(2);
}

namespace {

double number_at(const json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError("graph document: " + where + ": expected a number");
  return v.get<double>();
}

int index_at(const json& v, const std::string& where, int n) {
  if (!v.is_number_integer()) throw ParseError("graph document: " + where + ": expected an integer");
  const auto i = v.get<long long>();
  if (i < 0 || i >= n) throw ParseError("graph document: " + where + ": index out of range");
  return static_cast<int>(i);
}

}  // namespace

CouplingGraph read_graph(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("graph document: malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError("graph document: top level must be an object");
  if (!doc.contains("n_modes")) throw ParseError("graph document: missing field /n_modes");
  if (!doc["n_modes"].is_number_integer() || doc["n_modes"].get<long long>() < 1)
    throw ParseError("graph document: /n_modes must be a positive integer");
  const int n = doc["n_modes"].get<int>();

  std::map<std::pair<int, int>, Complex> entries;
  auto put = [&](int i, int j, Complex v) {
    const auto key = std::make_pair(i, j);
    if (auto it = entries.find(key); it != entries.end() && it->second != v) {
      std::ostringstream os;
      os << "coupling matrix is not Hermitian at (" << std::min(i, j) << "," << std::max(i, j) << ")/("
         << std::max(i, j) << "," << std::min(i, j) << ")";
      throw ValidationError(os.str());
    }
    entries[key] = v;
  };

  if (doc.contains("onsite")) {
    const auto& on = doc["onsite"];
    if (!on.is_array() || static_cast<int>(on.size()) != n)
      throw ParseError("graph document: /onsite must be an array of length n_modes");
    for (int i = 0; i < n; ++i) {
      const std::string where = "/onsite/" + std::to_string(i);
      Complex v;
      if (on[i].is_array()) {
        if (on[i].size() != 2) throw ParseError("graph document: " + where + ": expected [re, im]");
        v = {number_at(on[i][0], where + "/0"), number_at(on[i][1], where + "/1")};
      } else {
        v = number_at(on[i], where);
      }
      if (std::abs(v.imag()) > CouplingGraph::kHermiticityTolerance)
        throw ValidationError("coupling matrix is not Hermitian at (" + std::to_string(i) + "," +
                              std::to_string(i) + "): on-site term must be real");
      if (v != Complex{}) entries[{i, i}] = v;
    }
  }

  if (doc.contains("edges")) {
    const auto& edges = doc["edges"];
    if (!edges.is_array()) throw ParseError("graph document: /edges must be an array");
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const std::string where = "/edges/" + std::to_string(e);
      const auto& ed = edges[e];
      if (!ed.is_object() || !ed.contains("i") || !ed.contains("j") || !ed.contains("re"))
        throw ParseError("graph document: " + where + ": expected {i, j, re, im}");
      const int i = index_at(ed["i"], where + "/i", n);
      const int j = index_at(ed["j"], where + "/j", n);
      if (i == j) throw ParseError("graph document: " + where + ": self-loops belong in /onsite");
      const Complex v{number_at(ed["re"], where + "/re"), ed.contains("im") ? number_at(ed["im"], where + "/im") : 0.0};
      put(i, j, v);
      put(j, i, std::conj(v));
    }
  }

  std::vector<Triplet> t;
  for (const auto& [ij, v] : entries) t.emplace_back(ij.first, ij.second, v);

  std::vector<std::string> labels;
  if (doc.contains("labels")) {
    if (!doc["labels"].is_array()) throw ParseError("graph document: /labels must be an array of strings");
    for (std::size_t i = 0; i < doc["labels"].size(); ++i) {
      if (!doc["labels"][i].is_string())
        throw ParseError("graph document: /labels/" + std::to_string(i) + ": expected a string");
      labels.push_back(doc["labels"][i].get<std::string>());
    }
  }
  std::optional<RVector> positions;
  if (doc.contains("positions")) {
    const auto& p = doc["positions"];
    if (!p.is_array()) throw ParseError("graph document: /positions must be an array");
    positions = RVector(static_cast<Eigen::Index>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i) (*positions)[i] = number_at(p[i], "/positions/" + std::to_string(i));
  }
  std::optional<std::vector<int>> mult;
  if (doc.contains("multiplicities")) {
    const auto& m = doc["multiplicities"];
    if (!m.is_array()) throw ParseError("graph document: /multiplicities must be an array");
    mult.emplace();
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (!m[i].is_number_integer())
        throw ParseError("graph document: /multiplicities/" + std::to_string(i) + ": expected an integer");
      mult->push_back(m[i].get<int>());
    }
  }
  return CouplingGraph(from_triplets(n, t), std::move(labels), std::move(positions), std::move(mult));
}

CouplingGraph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open graph file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return read_graph(ss.str());
}

}  // namespace dqw
