// Copyright 2026 The MGCLP Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mgclp/errors.hpp"

namespace mgclp {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double init = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, init) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// An undirected weighted graph in the layout of the OR-library p-median
// files: a header "n m p" followed by m edge lines "u v cost" (1-based ids).
struct RawGraph {
  struct Edge {
    int u = 0;  // 1-based
    int v = 0;  // 1-based
    double cost = 0.0;
  };

  int n_vertices = 0;
  std::vector<Edge> edges;
  int p = 0;  // the file's median count, used as the default facility budget
};

// Distance-to-coverage conversion thresholds. Full coverage up to r, linear
// decline on (r, R), none from R on.
struct CoverageParams {
  double r = 0.0;
  double R = 0.0;
  double theta = 0.0;

  void validate() const {
    if (!(r >= 0.0)) throw ParameterError("coverage radius r must be nonnegative");
    if (!(R > r)) throw ParameterError("coverage radius R must exceed r");
    if (!(theta >= 0.0 && theta <= 1.0)) throw ParameterError("theta must lie in [0, 1]");
  }
};

// A problem instance: coverage fractions f (locations x customers),
// customer weights w, facility budget K and the mixing parameter theta.
struct Instance {
  Matrix f;
  std::vector<double> w;
  int K = 1;
  double theta = 0.0;

  int num_locations() const { return f.rows(); }
  int num_customers() const { return f.cols(); }

  double total_weight() const {
    double s = 0.0;
    for (double x : w) s += x;
    return s;
  }

  // Number of matrix entries with full coverage (f = 1).
  int count_full() const {
    int c = 0;
    for (int i = 0; i < f.rows(); ++i)
      for (int j = 0; j < f.cols(); ++j)
        if (f(i, j) == 1.0) ++c;
    return c;
  }

  // Number of matrix entries with strictly partial coverage (0 < f < 1).
  int count_partial() const {
    int c = 0;
    for (int i = 0; i < f.rows(); ++i)
      for (int j = 0; j < f.cols(); ++j)
        if (f(i, j) > 0.0 && f(i, j) < 1.0) ++c;
    return c;
  }
};

namespace detail {

inline bool blank_line(const std::string& s) {
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace detail

// Parses the OR-library p-median text format. Trailing whitespace and blank
// trailing lines are tolerated; anything else malformed reports its line.
inline RawGraph parse_pmed(std::istream& in) {
  RawGraph g;
  std::string line;
  int lineno = 0;

  auto next_line = [&](std::string& out) -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (!detail::blank_line(line)) {
        out = line;
        return true;
      }
    }
    return false;
  };

  std::string header;
  if (!next_line(header)) throw ParseError("empty input, expected header 'n m p'", lineno);
  long long n = 0, m = 0, p = 0;
  {
    std::istringstream ss(header);
    if (!(ss >> n >> m >> p)) throw ParseError("header must hold three integers 'n m p'", lineno);
    std::string rest;
    if (ss >> rest) throw ParseError("unexpected token '" + rest + "' after header", lineno);
  }
  if (n < 1) throw ValidationError("vertex count must be positive");
  if (m < 0) throw ValidationError("edge count must be nonnegative");
  if (p < 1 || p > n) throw ValidationError("median count p must lie in [1, n]");
  g.n_vertices = static_cast<int>(n);
  g.p = static_cast<int>(p);
  g.edges.reserve(static_cast<size_t>(m));

  for (long long e = 0; e < m; ++e) {
    std::string row;
    if (!next_line(row))
      throw ParseError("unexpected end of input, expected " + std::to_string(m) + " edges", lineno);
    std::istringstream ss(row);
    long long u = 0, v = 0;
    double cost = 0.0;
    if (!(ss >> u >> v >> cost)) throw ParseError("edge line must hold 'u v cost'", lineno);
    std::string rest;
    if (ss >> rest) throw ParseError("unexpected token '" + rest + "' after edge", lineno);
    if (u < 1 || u > n || v < 1 || v > n)
      throw ValidationError("vertex id out of range on line " + std::to_string(lineno));
    if (u == v) throw ValidationError("self-loop on line " + std::to_string(lineno));
    if (!(cost >= 0.0)) throw ValidationError("negative edge cost on line " + std::to_string(lineno));
    g.edges.push_back({static_cast<int>(u), static_cast<int>(v), cost});
  }

  std::string extra;
  if (next_line(extra)) throw ParseError("unexpected data after edge list", lineno);
  return g;
}

inline RawGraph parse_pmed(const std::string& text) {
  std::istringstream in(text);
  return parse_pmed(in);
}

// Canonical serialization of a RawGraph (re-parsing reproduces the graph).
inline void write_pmed(const RawGraph& g, std::ostream& out) {
  out << g.n_vertices << ' ' << g.edges.size() << ' ' << g.p << '\n';
  for (const auto& e : g.edges) {
    out << e.u << ' ' << e.v << ' ';
    if (e.cost == std::floor(e.cost) && std::abs(e.cost) < 1e15)
      out << static_cast<long long>(e.cost);
    else
      out << e.cost;
    out << '\n';
  }
}

// All-pairs shortest paths by Floyd-Warshall over the undirected edges.
// Unreachable pairs keep the +infinity sentinel.
inline Matrix all_pairs_shortest_paths(const RawGraph& g) {
  const int n = g.n_vertices;
  Matrix d(n, n, kInfinity);
  for (int i = 0; i < n; ++i) d(i, i) = 0.0;
  for (const auto& e : g.edges) {
    const int u = e.u - 1, v = e.v - 1;
    if (e.cost < d(u, v)) {
      d(u, v) = e.cost;
      d(v, u) = e.cost;
    }
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      const double dik = d(i, k);
      if (dik == kInfinity) continue;
      for (int j = 0; j < n; ++j) {
        const double via = dik + d(k, j);
        if (via < d(i, j)) d(i, j) = via;
      }
    }
  return d;
}

// Piecewise-linear decline from full coverage at distance <= r to none at R.
inline double coverage_fraction(double dist, const CoverageParams& params) {
  if (dist <= params.r) return 1.0;
  if (dist >= params.R) return 0.0;
  return 1.0 - (dist - params.r) / (params.R - params.r);
}

// Builds an instance over I = J = vertex set from a distance matrix.
// Weights default to 1 when omitted.
inline Instance build_coverage(const Matrix& d, const CoverageParams& params, int K,
                               std::vector<double> w = {}) {
  params.validate();
  if (K < 1) throw ParameterError("facility budget K must be positive");
  if (d.rows() != d.cols()) throw ParameterError("distance matrix must be square");
  const int n = d.rows();
  if (w.empty()) w.assign(n, 1.0);
  if (static_cast<int>(w.size()) != n) throw ParameterError("weight vector size mismatch");
  for (double x : w)
    if (!(x >= 0.0)) throw ValidationError("customer weights must be nonnegative");

  Instance inst;
  inst.f = Matrix(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inst.f(i, j) = coverage_fraction(d(i, j), params);
  inst.w = std::move(w);
  inst.K = K;
  inst.theta = params.theta;
  return inst;
}

}  // namespace mgclp
