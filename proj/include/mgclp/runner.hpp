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

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mgclp/bnc.hpp"
#include "mgclp/errors.hpp"
#include "mgclp/instance.hpp"
#include "mgclp/report.hpp"

namespace mgclp {

enum class OutputFormat { csv, json };

inline OutputFormat parse_format(const std::string& token) {
  if (token == "csv") return OutputFormat::csv;
  if (token == "json") return OutputFormat::json;
  throw ParameterError("unknown output format '" + token + "'");
}

// One solve request. K <= 0 selects the p value stored in the instance file,
// which is how the published instance/budget pairings are encoded.
struct RunSpec {
  std::string instance_path;
  std::string id;  // row label; defaults to the file stem
  double r = 5.0;
  double R = 20.0;
  double theta = 0.2;
  int K = 0;
  Formulation formulation = Formulation::F4;
  SolveMode mode = SolveMode::full;
  double time_limit = 600.0;
  bool dominance = true;
  bool binary_rule = true;
  bool position_caps = true;
};

namespace detail {

// Shortest decimal text that parses back to exactly the same double.
inline std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string file_stem(const std::string& path) {
  const size_t slash = path.find_last_of("/\\");
  const size_t start = slash == std::string::npos ? 0 : slash + 1;
  size_t dot = path.find_last_of('.');
  if (dot == std::string::npos || dot <= start) dot = path.size();
  return path.substr(start, dot - start);
}

inline double parse_double_token(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ParameterError("bad numeric value '" + value + "' for " + key);
  }
}

inline bool parse_switch(const std::string& key, const std::string& value) {
  if (value == "on") return true;
  if (value == "off") return false;
  throw ParameterError("bad switch value '" + value + "' for " + key +
                       ", expected on or off");
}

inline int parse_int_token(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ParameterError("bad integer value '" + value + "' for " + key);
  }
}

}  // namespace detail

// Reads the instance file and expands it into a coverage instance. The
// returned budget already reflects the K override rule in RunSpec.
inline Instance load_instance(const RunSpec& spec) {
  std::ifstream in(spec.instance_path);
  if (!in) throw ParameterError("cannot open instance file '" + spec.instance_path + "'");
  const RawGraph graph = parse_pmed(in);
  const Matrix dist = all_pairs_shortest_paths(graph);
  CoverageParams params;
  params.r = spec.r;
  params.R = spec.R;
  params.theta = spec.theta;
  const int budget = spec.K > 0 ? spec.K : graph.p;
  return build_coverage(dist, params, budget);
}

// Batch-line serialization of a spec; parse_batch_line reads it back
// unchanged, so every report can state the exact run it came from.
inline std::string spec_tokens(const RunSpec& spec) {
  std::string out = "instance=" + spec.instance_path;
  if (!spec.id.empty()) out += " id=" + spec.id;
  out += " r=" + detail::shortest(spec.r) + " R=" + detail::shortest(spec.R) +
         " theta=" + detail::shortest(spec.theta) +
         " K=" + std::to_string(spec.K) + " formulation=" +
         to_string(spec.formulation) + " mode=" + to_string(spec.mode) +
         " time-limit=" + detail::shortest(spec.time_limit);
  if (!spec.dominance) out += " dominance=off";
  if (!spec.binary_rule) out += " binary-rule=off";
  if (!spec.position_caps) out += " position-caps=off";
  return out;
}

inline ReportRow run_single(const RunSpec& spec, std::ostream* log = nullptr) {
  const Instance inst = load_instance(spec);
  SolverConfig cfg;
  cfg.formulation = spec.formulation;
  cfg.mode = spec.mode;
  cfg.time_limit = spec.time_limit;
  cfg.dominance = spec.dominance;
  cfg.binary_rule = spec.binary_rule;
  cfg.position_caps = spec.position_caps;
  cfg.log = log;
  const std::string id = spec.id.empty() ? detail::file_stem(spec.instance_path) : spec.id;
  if (log)
    *log << id << ": |V|=" << inst.num_locations() << " K=" << inst.K << " r=" << spec.r
         << " R=" << spec.R << " theta=" << spec.theta << " " << to_string(spec.formulation)
         << "/" << to_string(spec.mode) << '\n';
  ReportRow row = make_report_row(id, inst, solve(inst, cfg));
  row.spec = spec_tokens(spec);
  return row;
}

// One batch line is a whitespace-separated list of key=value tokens; keys
// mirror the command line flags. Unset keys inherit from the defaults, so a
// line usually only names what varies. '#' starts a comment.
inline RunSpec parse_batch_line(const std::string& line, const RunSpec& defaults) {
  RunSpec spec = defaults;
  spec.id.clear();
  std::istringstream tokens(line);
  std::string token;
  while (tokens >> token) {
    const size_t eq = token.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ParameterError("batch token '" + token + "' is not key=value");
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    if (key == "instance")
      spec.instance_path = value;
    else if (key == "id")
      spec.id = value;
    else if (key == "r")
      spec.r = detail::parse_double_token(key, value);
    else if (key == "R")
      spec.R = detail::parse_double_token(key, value);
    else if (key == "theta")
      spec.theta = detail::parse_double_token(key, value);
    else if (key == "K")
      spec.K = detail::parse_int_token(key, value);
    else if (key == "formulation")
      spec.formulation = parse_formulation(value);
    else if (key == "mode")
      spec.mode = parse_mode(value);
    else if (key == "time-limit")
      spec.time_limit = detail::parse_double_token(key, value);
    else if (key == "dominance")
      spec.dominance = detail::parse_switch(key, value);
    else if (key == "binary-rule")
      spec.binary_rule = detail::parse_switch(key, value);
    else if (key == "position-caps")
      spec.position_caps = detail::parse_switch(key, value);
    else
      throw ParameterError("unknown batch key '" + key + "'");
  }
  if (spec.instance_path.empty())
    throw ParameterError("batch line is missing an instance path");
  return spec;
}

inline std::vector<RunSpec> parse_batch(std::istream& in, const RunSpec& defaults) {
  std::vector<RunSpec> specs;
  std::string line;
  while (std::getline(in, line)) {
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    specs.push_back(parse_batch_line(line, defaults));
  }
  return specs;
}

// Environment override so scripted sweeps can cap runtimes without editing
// batch files.
inline std::optional<double> env_time_limit() {
  const char* raw = std::getenv("MGCLP_TIME_LIMIT");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  return detail::parse_double_token("MGCLP_TIME_LIMIT", raw);
}

constexpr int kExitOptimal = 0;
constexpr int kExitTimeLimit = 2;
constexpr int kExitResource = 3;
constexpr int kExitInput = 4;

// Runs every spec, then writes the collected rows in one piece so failed
// batches leave no partial output. Returns the process exit code.
inline int run_specs(const std::vector<RunSpec>& specs, std::ostream& out,
                     OutputFormat format, std::ostream* log = nullptr) {
  const std::optional<double> cap = env_time_limit();
  std::vector<ReportRow> rows;
  rows.reserve(specs.size());
  bool hit_time_limit = false;
  for (RunSpec spec : specs) {
    if (cap) spec.time_limit = *cap;
    ReportRow row = run_single(spec, log);
    hit_time_limit = hit_time_limit || row.report.status == SolveStatus::time_limit;
    rows.push_back(std::move(row));
  }
  if (format == OutputFormat::csv)
    write_csv(out, rows);
  else
    write_json(out, rows);
  return hit_time_limit ? kExitTimeLimit : kExitOptimal;
}

}  // namespace mgclp
