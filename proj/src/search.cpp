// Copyright 2026 The dqw Authors
// SPDX-License-Identifier: Apache-2.0

#include "dqw/search.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "dqw/dynamics.hpp"
#include "dqw/parallel.hpp"

namespace dqw {

namespace {

constexpr double kDegeneracyTolerance = 1e-9;
constexpr double kTieTolerance = 1e-9;
constexpr double kDrivenOverlap = 1e-10;

double frequency_scale(const EigenSystem& eig) {
  return std::max(eig.frequencies.cwiseAbs().maxCoeff(), 1.0);
}

void check_index(int i, int n, const char* what) {
  if (i < 0 || i >= n) throw std::invalid_argument(std::string(what) + " index out of range");
}

}  // namespace

TargetMode find_target_eigenmode(const EigenSystem& eig, int entrance, int exit,
                                 const std::optional<std::vector<int>>& multiplicities) {
  const int n = eig.size();
  check_index(entrance, n, "entrance");
  check_index(exit, n, "exit");
  double se = 1.0, sx = 1.0;
  if (multiplicities) {
    if (static_cast<int>(multiplicities->size()) != n) throw std::invalid_argument("multiplicities length differs");
    se = std::sqrt(static_cast<double>((*multiplicities)[entrance]));
    sx = std::sqrt(static_cast<double>((*multiplicities)[exit]));
  }
  const double centre = 0.5 * (eig.frequencies.minCoeff() + eig.frequencies.maxCoeff());
  const double degenerate = kDegeneracyTolerance * frequency_scale(eig);

  TargetMode best;
  double best_score = -1.0;
  for (int start = 0; start < n;) {
    int end = start + 1;
    while (end < n && eig.frequencies[end] - eig.frequencies[end - 1] <= degenerate) ++end;
    const int size = end - start;

    TargetMode cand;
    cand.cluster_size = size;
    double score = 0.0;
    if (size == 1) {
      cand.index = start;
      cand.entrance_weight = std::abs(eig.transform(start, entrance)) / se;
      cand.exit_weight = std::abs(eig.transform(start, exit)) / sx;
      score = cand.entrance_weight * cand.entrance_weight + cand.exit_weight * cand.exit_weight;
    } else {
      // Best unit combination u of the cluster rows: top eigenvector of B B^dag,
      // where B holds the entrance and exit components.
      CMatrix b(size, 2);
      for (int r = 0; r < size; ++r) {
        b(r, 0) = eig.transform(start + r, entrance) / se;
        b(r, 1) = eig.transform(start + r, exit) / sx;
      }
      Eigen::SelfAdjointEigenSolver<CMatrix> es(b * b.adjoint());
      const CVector u = es.eigenvectors().col(size - 1);
      const Eigen::Matrix<Complex, 1, 2> w = u.adjoint() * b;
      cand.entrance_weight = std::abs(w(0));
      cand.exit_weight = std::abs(w(1));
      score = es.eigenvalues()(size - 1);
      Eigen::Index lead = 0;
      u.cwiseAbs().maxCoeff(&lead);
      cand.index = start + static_cast<int>(lead);
      cand.rotated = score > 0.0;
    }
    cand.frequency = eig.frequencies[cand.index];

    bool take = false;
    if (score > best_score + kTieTolerance) {
      take = true;
    } else if (score >= best_score - kTieTolerance) {
      const double dc = std::abs(cand.frequency - centre), db = std::abs(best.frequency - centre);
      take = dc < db - degenerate || (dc <= db + degenerate && cand.frequency > best.frequency);
    }
    if (take) {
      best = cand;
      best_score = std::max(score, best_score);
    }
    start = end;
  }
  return best;
}

double min_driven_mismatch(const EigenSystem& eig, const TargetMode& target, int entrance) {
  const double degenerate = kDegeneracyTolerance * frequency_scale(eig);
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < eig.size(); ++k) {
    if (std::abs(eig.transform(k, entrance)) <= kDrivenOverlap) continue;
    const double d = std::abs(eig.frequencies[k] - target.frequency);
    if (d > degenerate) best = std::min(best, d);
  }
  // No other driven mode: nothing to wait for, reported as a degenerate drive.
  return std::isfinite(best) ? best : 0.0;
}

CouplingGraph search_graph(const SearchSpec& spec) {
  if (spec.depth < 1) throw std::invalid_argument("search: depth must be >= 1");
  if (!(spec.edge_weight > 0.0)) throw std::invalid_argument("search: edge_weight must be > 0");
  return spec.use_reduced_chain ? build_reduced_glued_trees(spec.depth, spec.edge_weight)
                                : build_glued_trees(spec.depth, spec.edge_weight);
}

SearchResult run_driven_search(const SearchSpec& spec) {
  if (spec.record_every < 1) throw std::invalid_argument("search: record_every must be >= 1");
  if (!(spec.gamma0 >= 0.0)) throw std::invalid_argument("search: gamma0 must be >= 0");
  const CouplingGraph graph = search_graph(spec);
  const int n = graph.n_modes();
  const int entrance = spec.entrance.value_or(entrance_index(graph));
  const int exit = spec.exit.value_or(exit_index(graph));
  check_index(entrance, n, "entrance");
  check_index(exit, n, "exit");
  if (entrance == exit) throw std::invalid_argument("search: entrance and exit coincide");

  const EigenSystem eig = diagonalize(graph);
  SearchResult r;
  r.depth = spec.depth;
  r.n_modes = n;
  r.use_reduced_chain = spec.use_reduced_chain;
  r.gamma0 = spec.gamma0;
  r.target = find_target_eigenmode(eig, entrance, exit, graph.multiplicities());
  r.min_mismatch = min_driven_mismatch(eig, r.target, entrance);
  r.wait_time_estimate = r.min_mismatch > 0.0 ? 1.0 / r.min_mismatch : std::numeric_limits<double>::infinity();
  r.t_final = spec.t_final > 0.0 ? spec.t_final : 3.0 * r.wait_time_estimate;
  if (!std::isfinite(r.t_final)) throw std::invalid_argument("search: t_final is required when the drive is degenerate");
  r.dt = spec.dt > 0.0 ? spec.dt : default_time_step(graph);

  RVector per_vertex = RVector::Ones(n);
  if (graph.multiplicities())
    for (int m = 0; m < n; ++m) per_vertex[m] = 1.0 / (*graph.multiplicities())[m];

  const PumpConfig pump = PumpConfig::lasing_on(n, entrance, r.target.frequency, spec.gamma0);
  std::vector<std::array<double, 3>> rows;
  evolve_driven_observed(graph, pump, r.t_final, r.dt, std::nullopt, spec.record_every,
                         [&](double t, const GaussianState& s) {
                           const RVector pop = s.photon_numbers().cwiseProduct(per_vertex);
                           double other = 0.0;
                           int rank = 1;
                           const double ex = pop[exit];
                           for (int m = 0; m < n; ++m) {
                             if (m == entrance) continue;
                             if (m != exit) other = std::max(other, pop[m]);
                             if (m != exit && pop[m] > ex * (1.0 + 1e-12) + 1e-300) ++rank;
                           }
                           r.series.times.push_back(t);
                           rows.push_back({pop[entrance], ex, other});
                           r.exit_rank_over_time.push_back(rank);
                         });
  r.series.kind = SeriesKind::PhotonPhysical;
  r.series.values.resize(static_cast<Eigen::Index>(rows.size()), 3);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int c = 0; c < 3; ++c) r.series.values(static_cast<Eigen::Index>(i), c) = rows[i][c];

  const auto& ranks = r.exit_rank_over_time;
  if (!ranks.empty() && ranks.back() == 1) {
    std::size_t i = ranks.size() - 1;
    while (i > 0 && ranks[i - 1] == 1) --i;
    r.rank1_threshold_time = r.series.times[i];
  }
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i][1] < rows[i - 1][1]) r.transient_time = r.series.times[i];
  return r;
}

PassiveOscillation passive_oscillation(int depth, double t_final, double dt, bool use_reduced_chain,
                                       double edge_weight) {
  if (depth < 1) throw std::invalid_argument("passive_oscillation: depth must be >= 1");
  if (!(t_final > 0.0) || !(dt > 0.0)) throw std::invalid_argument("passive_oscillation: t_final and dt must be > 0");
  const CouplingGraph graph = use_reduced_chain ? build_reduced_glued_trees(depth, edge_weight)
                                                : build_glued_trees(depth, edge_weight);
  const int entrance = entrance_index(graph), exit = exit_index(graph);
  const EigenSystem eig = diagonalize(graph);
  const double ne = graph.multiplicities() ? (*graph.multiplicities())[entrance] : 1.0;
  const double nx = graph.multiplicities() ? (*graph.multiplicities())[exit] : 1.0;

  // psi(t) = T^dag e^{-i Omega t} T e_entrance
  const CVector c0 = eig.transform.col(entrance);
  const CVector row_exit = eig.transform.col(exit).conjugate();
  const CVector row_entr = eig.transform.col(entrance).conjugate();
  const long steps = static_cast<long>(std::floor(t_final / dt + 1e-9));
  PassiveOscillation out;
  out.entrance_probability.resize(steps + 1);
  out.exit_probability.resize(steps + 1);
  out.total_probability.resize(steps + 1);
  for (long i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    CVector ck(c0.size());
    for (Eigen::Index k = 0; k < c0.size(); ++k) ck[k] = std::exp(-kI * (eig.frequencies[k] * t)) * c0[k];
    out.times.push_back(t);
    out.entrance_probability[i] = std::norm((row_entr.transpose() * ck).value()) / ne;
    out.exit_probability[i] = std::norm((row_exit.transpose() * ck).value()) / nx;
    out.total_probability[i] = ck.squaredNorm();
  }
  return out;
}

int count_local_maxima(const RVector& v) {
  int count = 0;
  for (Eigen::Index i = 1; i + 1 < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) continue;
    Eigen::Index j = i + 1;
    while (j < v.size() && v[j] == v[i]) ++j;  // flat tops count once
    if (j < v.size() && v[j] < v[i]) ++count;
  }
  return count;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
  if (x.size() < 2) throw std::invalid_argument("fit_line: need at least 2 points for a fit");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: need at least 2 distinct x values");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    ss += r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - ss / syy : 1.0;
  return f;
}

ScalingStudy weight_scaling_study(const std::vector<int>& depths, bool use_reduced_chain, double edge_weight,
                                  int threads) {
  if (depths.empty()) throw std::invalid_argument("weight_scaling_study: depths must be non-empty");
  for (int d : depths) {
    if (d < 1) throw std::invalid_argument("weight_scaling_study: depths must be >= 1");
    if (!use_reduced_chain && d > 11)
      throw std::invalid_argument("weight_scaling_study: full-graph mode is limited to depth <= 11");
  }
  ScalingStudy study;
  study.use_reduced_chain = use_reduced_chain;
  study.edge_weight = edge_weight;
  study.points.resize(depths.size());
  parallel_for(depths.size(), threads, [&](std::size_t i) {
    SearchSpec spec;
    spec.depth = depths[i];
    spec.use_reduced_chain = use_reduced_chain;
    spec.edge_weight = edge_weight;
    const CouplingGraph graph = search_graph(spec);
    const int entrance = entrance_index(graph), exit = exit_index(graph);
    const EigenSystem eig = diagonalize(graph);
    const TargetMode target = find_target_eigenmode(eig, entrance, exit, graph.multiplicities());
    ScalingPoint& p = study.points[i];
    p.depth = depths[i];
    p.n_modes = graph.n_modes();
    p.weight = target.entrance_weight;
    p.exit_weight = target.exit_weight;
    p.inverse_square = 1.0 / (p.weight * p.weight);
    p.min_mismatch = min_driven_mismatch(eig, target, entrance);
  });
  if (depths.size() >= 2) {
    std::vector<double> x, y;
    for (const auto& p : study.points) {
      x.push_back(p.depth);
      y.push_back(p.inverse_square);
    }
    study.fit = fit_line(x, y);
  }
  return study;
}

namespace {

struct ClassicalSpectrum {
  RVector rates;    // lambda_k - 1
  RMatrix vectors;  // row k: eigenvector k of D^-1/2 A D^-1/2
  RVector sqrt_degree;
  int entrance = 0;
  int exit = 0;
};

ClassicalSpectrum classical_spectrum(int depth) {
  if (depth < 1) throw std::invalid_argument("classical_hitting_baseline: depth must be >= 1");
  if (depth > 9) throw std::invalid_argument("classical_hitting_baseline: depth must be <= 9");
  const CouplingGraph g = build_glued_trees(depth, 1.0);
  const int n = g.n_modes();
  RMatrix a = RMatrix::Zero(n, n);
  for (int k = 0; k < g.coupling().outerSize(); ++k)
    for (SparseCMatrix::InnerIterator it(g.coupling(), k); it; ++it)
      if (it.row() != it.col()) a(it.row(), it.col()) = 1.0;
  ClassicalSpectrum s;
  s.sqrt_degree = a.rowwise().sum().cwiseSqrt();
  const RMatrix sym = s.sqrt_degree.cwiseInverse().asDiagonal() * a * s.sqrt_degree.cwiseInverse().asDiagonal();
  const EigenSystem eig = diagonalize_matrix(sym.cast<Complex>());
  s.rates = eig.frequencies.array() - 1.0;
  s.vectors = eig.transform.real();
  s.entrance = entrance_index(g);
  s.exit = exit_index(g);
  return s;
}

}  // namespace

RVector classical_distribution(int depth, double t) {
  const ClassicalSpectrum s = classical_spectrum(depth);
  RVector c = s.vectors.col(s.entrance) / s.sqrt_degree[s.entrance];
  c.array() *= (s.rates.array() * t).exp();
  return s.sqrt_degree.asDiagonal() * (s.vectors.transpose() * c);
}

ClassicalWalk classical_hitting_baseline(int depth, double t_final, double dt) {
  if (!(t_final > 0.0) || !(dt > 0.0)) throw std::invalid_argument("classical_hitting_baseline: t_final and dt must be > 0");
  const ClassicalSpectrum s = classical_spectrum(depth);
  const RVector weights =
      s.vectors.col(s.entrance).cwiseProduct(s.vectors.col(s.exit)) * (s.sqrt_degree[s.exit] / s.sqrt_degree[s.entrance]);
  auto exit_at = [&](double t) { return (weights.array() * (s.rates.array() * t).exp()).sum(); };

  ClassicalWalk w;
  w.depth = depth;
  w.stationary_exit = s.sqrt_degree[s.exit] * s.sqrt_degree[s.exit] / s.sqrt_degree.squaredNorm();
  const long steps = static_cast<long>(std::floor(t_final / dt + 1e-9));
  w.exit_occupation.resize(steps + 1);
  const double half = 0.5 * w.stationary_exit;
  for (long i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    w.times.push_back(t);
    w.exit_occupation[i] = exit_at(t);
    if (std::isnan(w.half_stationary_time) && i > 0 && w.exit_occupation[i] >= half) {
      double lo = w.times[i - 1], hi = t;
      while (hi - lo > 1e-10 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        (exit_at(mid) >= half ? hi : lo) = mid;
      }
      w.half_stationary_time = hi;
    }
  }
  return w;
}

}  // namespace dqw
