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
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mgclp/evaluator.hpp"
#include "mgclp/instance.hpp"

namespace mgclp {

enum class SolveStatus { optimal, time_limit };

inline const char* to_string(SolveStatus s) {
  return s == SolveStatus::optimal ? "optimal" : "time_limit";
}

// Everything a solve produces. Heuristic fields are NaN when the
// configuration runs without heuristics; they print as "-".
struct SolveReport {
  SolveStatus status = SolveStatus::optimal;
  double z_star = 0.0;
  double ub = 0.0;
  double gap_pct = 0.0;
  long nodes = 0;  // branch-and-bound nodes processed after the root
  double t_total = 0.0;
  double t_root = 0.0;
  double t_heur = std::numeric_limits<double>::quiet_NaN();
  double ub_root = 0.0;
  double gap_root_pct = 0.0;
  double z_heur = std::numeric_limits<double>::quiet_NaN();
  double gap_heur_pct = std::numeric_limits<double>::quiet_NaN();
  int n_coloc_locations = 0;  // locations opened at least twice
  int max_coloc = 0;          // largest multiplicity over opened locations
  OpenPlan opened;
};

struct Gaps {
  double g = 0.0;
  double g_r = 0.0;
  double g_h = std::numeric_limits<double>::quiet_NaN();
};

// Percent gaps against the best solution found. A zero best solution gets a
// zero gap only when the bound also closed to zero; otherwise the gap is
// reported as infinite.
inline Gaps compute_gaps(double ub, double z_star, double ub_root,
                         double z_heur) {
  auto upper_gap = [&](double bound) {
    if (z_star != 0.0) return 100.0 * (bound - z_star) / z_star;
    return bound == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  };
  Gaps gaps;
  gaps.g = upper_gap(ub);
  gaps.g_r = upper_gap(ub_root);
  if (std::isnan(z_heur)) return gaps;
  if (z_star != 0.0)
    gaps.g_h = 100.0 * (z_star - z_heur) / z_star;
  else
    gaps.g_h = z_heur == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return gaps;
}

// One output row: the solve result plus the instance context it ran on.
// `spec` is the originating run restated in batch-line form; it travels in
// the JSON output only, the CSV schema being fixed.
struct ReportRow {
  std::string id;
  int n_vertices = 0;
  int K = 0;
  long count_full = 0;
  long count_partial = 0;
  std::string spec;
  SolveReport report;
};

inline ReportRow make_report_row(std::string id, const Instance& inst,
                                 SolveReport report) {
  ReportRow row;
  row.id = std::move(id);
  row.n_vertices = inst.num_locations();
  row.K = inst.K;
  row.count_full = inst.count_full();
  row.count_partial = inst.count_partial();
  row.report = std::move(report);
  return row;
}

namespace detail {

inline std::string fixed_or_dash(double v, int decimals) {
  if (std::isnan(v)) return "-";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << std::fixed << std::setprecision(decimals) << v;
  return out.str();
}

}  // namespace detail

inline std::string csv_header() {
  return "id,|V|,K,#C1,#CP,t,UB,z*,g%,#BBn,t_r,UB_r,g_r%,t_H,z_H,g_H%,#CL,mCL";
}

// Objective columns use 5 decimals, gap columns 3, time columns 2, matching
// the precision the result tables are stated in.
inline std::string csv_row(const ReportRow& row) {
  using detail::fixed_or_dash;
  const SolveReport& r = row.report;
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << row.id << ',' << row.n_vertices << ',' << row.K << ','
      << row.count_full << ',' << row.count_partial << ','
      << fixed_or_dash(r.t_total, 2) << ',' << fixed_or_dash(r.ub, 5) << ','
      << fixed_or_dash(r.z_star, 5) << ',' << fixed_or_dash(r.gap_pct, 3)
      << ',' << r.nodes << ',' << fixed_or_dash(r.t_root, 2) << ','
      << fixed_or_dash(r.ub_root, 5) << ',' << fixed_or_dash(r.gap_root_pct, 3)
      << ',' << fixed_or_dash(r.t_heur, 2) << ',' << fixed_or_dash(r.z_heur, 5)
      << ',' << fixed_or_dash(r.gap_heur_pct, 3) << ',' << r.n_coloc_locations
      << ',' << r.max_coloc;
  return out.str();
}

inline void write_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << csv_header() << '\n';
  for (const ReportRow& row : rows) out << csv_row(row) << '\n';
}

// JSON mirror of a CSV row plus the opened multiset (1-based location ids).
// NaN and infinities map to null since JSON numbers cannot carry them.
inline nlohmann::json json_report(const ReportRow& row) {
  auto number_or_null = [](double v) -> nlohmann::json {
    if (std::isnan(v) || std::isinf(v)) return nullptr;
    return v;
  };
  const SolveReport& r = row.report;
  nlohmann::json opened = nlohmann::json::array();
  for (int loc : r.opened.sorted_sequence()) opened.push_back(loc + 1);
  nlohmann::json out{{"id", row.id},
                     {"n_vertices", row.n_vertices},
                     {"K", row.K},
                     {"count_full", row.count_full},
                     {"count_partial", row.count_partial},
                     {"status", to_string(r.status)},
                     {"t", r.t_total},
                     {"UB", r.ub},
                     {"z_star", r.z_star},
                     {"gap_pct", number_or_null(r.gap_pct)},
                     {"nodes", r.nodes},
                     {"t_root", r.t_root},
                     {"UB_root", r.ub_root},
                     {"gap_root_pct", number_or_null(r.gap_root_pct)},
                     {"t_heur", number_or_null(r.t_heur)},
                     {"z_heur", number_or_null(r.z_heur)},
                     {"gap_heur_pct", number_or_null(r.gap_heur_pct)},
                     {"n_coloc_locations", r.n_coloc_locations},
                     {"max_coloc", r.max_coloc},
                     {"opened", opened}};
  if (!row.spec.empty()) out["spec"] = row.spec;
  return out;
}

inline void write_json(std::ostream& out, const std::vector<ReportRow>& rows) {
  if (rows.size() == 1) {
    out << json_report(rows.front()).dump(2) << '\n';
    return;
  }
  nlohmann::json arr = nlohmann::json::array();
  for (const ReportRow& row : rows) arr.push_back(json_report(row));
  out << arr.dump(2) << '\n';
}

}  // namespace mgclp
