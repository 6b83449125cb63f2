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

#include "mgclp/instance.hpp"

#include <catch2/catch.hpp>
#include <random>
#include <sstream>

using namespace mgclp;

TEST_CASE("pmed parsing accepts well-formed input", "[instance]") {
  const RawGraph g = parse_pmed("3 2 1\n1 2 5\n2 3 7\n");
  REQUIRE(g.n_vertices == 3);
  REQUIRE(g.p == 1);
  REQUIRE(g.edges.size() == 2);
  CHECK(g.edges[0].u == 1);
  CHECK(g.edges[0].v == 2);
  CHECK(g.edges[0].cost == 5.0);
  CHECK(g.edges[1].cost == 7.0);
}

TEST_CASE("pmed parsing tolerates blank lines and zero-cost edges", "[instance]") {
  const RawGraph g = parse_pmed("\n 2 1 1 \n\n1 2 0\n\n");
  REQUIRE(g.n_vertices == 2);
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0].cost == 0.0);
}

TEST_CASE("pmed parsing rejects malformed input", "[instance]") {
  CHECK_THROWS_AS(parse_pmed(""), ParseError);
  CHECK_THROWS_AS(parse_pmed("3 2\n"), ParseError);
  CHECK_THROWS_AS(parse_pmed("3 2 1 9\n1 2 5\n2 3 7\n"), ParseError);
  CHECK_THROWS_AS(parse_pmed("3 2 1\n1 2 5\n"), ParseError);
  CHECK_THROWS_AS(parse_pmed("3 1 1\n1 2 5\n2 3 7\n"), ParseError);
  CHECK_THROWS_AS(parse_pmed("3 2 1\n1 2 5\n2 3 7 4\n"), ParseError);
  CHECK_THROWS_AS(parse_pmed("3 2 1\n1 2 five\n2 3 7\n"), ParseError);
  CHECK_THROWS_AS(parse_pmed("3 2 0\n1 2 5\n2 3 7\n"), ValidationError);
  CHECK_THROWS_AS(parse_pmed("3 2 4\n1 2 5\n2 3 7\n"), ValidationError);
  CHECK_THROWS_AS(parse_pmed("0 0 1\n"), ValidationError);
  CHECK_THROWS_AS(parse_pmed("3 2 1\n1 4 5\n2 3 7\n"), ValidationError);
  CHECK_THROWS_AS(parse_pmed("3 2 1\n2 2 5\n2 3 7\n"), ValidationError);
  CHECK_THROWS_AS(parse_pmed("3 2 1\n1 2 -5\n2 3 7\n"), ValidationError);
}

TEST_CASE("parse errors report the offending line", "[instance]") {
  try {
    parse_pmed("3 2 1\n1 2 5\nbad edge\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("serialization round-trips through the parser", "[instance]") {
  RawGraph g;
  g.n_vertices = 4;
  g.p = 2;
  g.edges = {{1, 2, 5.0}, {2, 3, 7.5}, {1, 4, 0.0}};
  std::ostringstream out;
  write_pmed(g, out);
  const RawGraph h = parse_pmed(out.str());
  REQUIRE(h.n_vertices == g.n_vertices);
  REQUIRE(h.p == g.p);
  REQUIRE(h.edges.size() == g.edges.size());
  for (size_t e = 0; e < g.edges.size(); ++e) {
    CHECK(h.edges[e].u == g.edges[e].u);
    CHECK(h.edges[e].v == g.edges[e].v);
    CHECK(h.edges[e].cost == g.edges[e].cost);
  }
}

TEST_CASE("shortest paths on a chain add up", "[instance]") {
  const RawGraph g = parse_pmed("3 2 1\n1 2 5\n2 3 7\n");
  const Matrix d = all_pairs_shortest_paths(g);
  CHECK(d(0, 2) == 12.0);
  CHECK(d(2, 0) == 12.0);
  CHECK(d(0, 1) == 5.0);
  for (int i = 0; i < 3; ++i) CHECK(d(i, i) == 0.0);
}

TEST_CASE("shortest paths prefer the two-hop route over a heavy edge", "[instance]") {
  const RawGraph g = parse_pmed("3 3 1\n1 2 10\n2 3 10\n1 3 50\n");
  const Matrix d = all_pairs_shortest_paths(g);
  CHECK(d(0, 2) == 20.0);
}

TEST_CASE("shortest paths keep infinity across components", "[instance]") {
  const RawGraph g = parse_pmed("4 1 1\n1 2 3\n");
  const Matrix d = all_pairs_shortest_paths(g);
  CHECK(d(0, 1) == 3.0);
  CHECK(d(0, 2) == kInfinity);
  CHECK(d(3, 3) == 0.0);
}

TEST_CASE("shortest paths collapse parallel edges to the cheapest", "[instance]") {
  RawGraph g;
  g.n_vertices = 2;
  g.p = 1;
  g.edges = {{1, 2, 9.0}, {1, 2, 4.0}};
  const Matrix d = all_pairs_shortest_paths(g);
  CHECK(d(0, 1) == 4.0);
}

namespace {

// Cheapest walk cost by brute-force enumeration of simple paths.
double enumerate_shortest(const RawGraph& g, int s, int t) {
  const int n = g.n_vertices;
  std::vector<std::vector<double>> adj(n, std::vector<double>(n, kInfinity));
  for (const auto& e : g.edges) {
    adj[e.u - 1][e.v - 1] = std::min(adj[e.u - 1][e.v - 1], e.cost);
    adj[e.v - 1][e.u - 1] = std::min(adj[e.v - 1][e.u - 1], e.cost);
  }
  std::vector<bool> used(n, false);
  double best = s == t ? 0.0 : kInfinity;
  auto dfs = [&](auto&& self, int v, double cost) -> void {
    if (cost >= best) return;
    if (v == t) {
      best = cost;
      return;
    }
    used[v] = true;
    for (int w = 0; w < n; ++w)
      if (!used[w] && adj[v][w] < kInfinity) self(self, w, cost + adj[v][w]);
    used[v] = false;
  };
  dfs(dfs, s, 0.0);
  return best;
}

}  // namespace

TEST_CASE("shortest paths agree with path enumeration on random graphs", "[instance]") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> cost(0.0, 10.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    RawGraph g;
    g.n_vertices = 6;
    g.p = 1;
    for (int u = 1; u <= 6; ++u)
      for (int v = u + 1; v <= 6; ++v)
        if (unit(rng) < 0.5) g.edges.push_back({u, v, cost(rng)});
    const Matrix d = all_pairs_shortest_paths(g);
    for (int s = 0; s < 6; ++s)
      for (int t = 0; t < 6; ++t) {
        const double ref = enumerate_shortest(g, s, t);
        if (ref == kInfinity)
          CHECK(d(s, t) == kInfinity);
        else
          CHECK(d(s, t) == Approx(ref).margin(1e-9));
      }
  }
}

TEST_CASE("distance matrix satisfies the triangle inequality", "[instance]") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> cost(0.1, 10.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RawGraph g;
  g.n_vertices = 8;
  g.p = 1;
  for (int u = 1; u <= 8; ++u)
    for (int v = u + 1; v <= 8; ++v)
      if (unit(rng) < 0.6) g.edges.push_back({u, v, cost(rng)});
  const Matrix d = all_pairs_shortest_paths(g);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      for (int k = 0; k < 8; ++k)
        CHECK(d(i, j) <= d(i, k) + d(k, j) + 1e-9);
}

TEST_CASE("coverage fraction follows the piecewise-linear decline", "[instance]") {
  const CoverageParams params{5.0, 20.0, 0.2};
  CHECK(coverage_fraction(0.0, params) == 1.0);
  CHECK(coverage_fraction(3.0, params) == 1.0);
  CHECK(coverage_fraction(5.0, params) == 1.0);
  CHECK(coverage_fraction(12.5, params) == Approx(0.5).margin(1e-12));
  CHECK(coverage_fraction(20.0, params) == 0.0);
  CHECK(coverage_fraction(25.0, params) == 0.0);
  CHECK(coverage_fraction(kInfinity, params) == 0.0);
}

TEST_CASE("coverage fraction is continuous and monotone in distance", "[instance]") {
  const CoverageParams params{5.0, 20.0, 0.5};
  CHECK(coverage_fraction(5.0 + 1e-9, params) == Approx(1.0).margin(1e-9));
  CHECK(coverage_fraction(20.0 - 1e-9, params) == Approx(0.0).margin(1e-9));
  double prev = 1.0;
  for (double dist = 0.0; dist <= 25.0; dist += 0.05) {
    const double f = coverage_fraction(dist, params);
    CHECK(f <= prev + 1e-12);
    prev = f;
  }
}

TEST_CASE("coverage parameters are validated", "[instance]") {
  CHECK_THROWS_AS((CoverageParams{-1.0, 20.0, 0.2}.validate()), ParameterError);
  CHECK_THROWS_AS((CoverageParams{5.0, 5.0, 0.2}.validate()), ParameterError);
  CHECK_THROWS_AS((CoverageParams{5.0, 4.0, 0.2}.validate()), ParameterError);
  CHECK_THROWS_AS((CoverageParams{5.0, 20.0, -0.1}.validate()), ParameterError);
  CHECK_THROWS_AS((CoverageParams{5.0, 20.0, 1.1}.validate()), ParameterError);
  CHECK_NOTHROW((CoverageParams{0.0, 1.0, 0.0}.validate()));
  CHECK_NOTHROW((CoverageParams{5.0, 20.0, 1.0}.validate()));
}

TEST_CASE("instance construction from distances", "[instance]") {
  const RawGraph g = parse_pmed("3 2 1\n1 2 5\n2 3 7\n");
  const Matrix d = all_pairs_shortest_paths(g);
  const Instance inst = build_coverage(d, {5.0, 10.0, 0.2}, 2);
  REQUIRE(inst.num_locations() == 3);
  REQUIRE(inst.num_customers() == 3);
  CHECK(inst.K == 2);
  CHECK(inst.theta == 0.2);
  CHECK(inst.f(0, 0) == 1.0);
  CHECK(inst.f(0, 1) == 1.0);
  CHECK(inst.f(0, 2) == 0.0);
  CHECK(inst.f(1, 2) == Approx(0.6).margin(1e-12));
  CHECK(inst.total_weight() == 3.0);
}

TEST_CASE("full and partial coverage entries are counted separately", "[instance]") {
  Instance inst;
  inst.f = Matrix(2, 3);
  inst.f(0, 0) = 1.0;
  inst.f(0, 1) = 0.5;
  inst.f(1, 1) = 1.0;
  inst.f(1, 2) = 1e-9;
  inst.w = {1.0, 1.0, 1.0};
  CHECK(inst.count_full() == 2);
  CHECK(inst.count_partial() == 2);
}

TEST_CASE("build_coverage validates inputs", "[instance]") {
  const Matrix d(2, 2, 1.0);
  CHECK_THROWS_AS(build_coverage(d, {5.0, 20.0, 0.2}, 0), ParameterError);
  CHECK_THROWS_AS(build_coverage(Matrix(2, 3), {5.0, 20.0, 0.2}, 1), ParameterError);
  CHECK_THROWS_AS(build_coverage(d, {5.0, 20.0, 0.2}, 1, {1.0}), ParameterError);
  CHECK_THROWS_AS(build_coverage(d, {5.0, 20.0, 0.2}, 1, {1.0, -1.0}), ValidationError);
  CHECK_NOTHROW(build_coverage(d, {5.0, 20.0, 0.2}, 1, {0.0, 2.0}));
}
