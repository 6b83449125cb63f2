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

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <boost/program_options.hpp>

#include "mgclp/bnc.hpp"
#include "mgclp/errors.hpp"
#include "mgclp/lp.hpp"
#include "mgclp/runner.hpp"

namespace po = boost::program_options;

namespace {

// Writes the root relaxation in LP text format, including the cuts the
// initialization step would add, so models can be inspected or fed to an
// external solver.
void dump_root_relaxation(const mgclp::RunSpec& spec, const std::string& path) {
  const mgclp::Instance inst = mgclp::load_instance(spec);
  const mgclp::FixingMask mask = mgclp::FixingMask::all_open(inst);
  const bool with_init = spec.mode == mgclp::SolveMode::full;
  const mgclp::LpProblem problem =
      mgclp::lp_build(inst, spec.formulation, mask, with_init);
  std::ofstream out(path);
  if (!out) throw mgclp::ParameterError("cannot open dump file '" + path + "'");
  mgclp::lp_dump(problem.model, problem.layout.col_names, out);
}

int run(int argc, char** argv) {
  mgclp::RunSpec defaults;
  std::string formulation = "f4";
  std::string mode = "fhp";
  std::string format = "csv";
  std::string out_path;
  std::string batch_path;
  std::string dump_path;

  po::options_description visible("mgclp options");
  visible.add_options()                                                  //
      ("help,h", "show this help text")                                  //
      ("instance,i", po::value<std::string>(&defaults.instance_path),
       "p-median instance file (header 'n m p', then weighted edges)")   //
      ("id", po::value<std::string>(&defaults.id),
       "row label in reports (default: instance file stem)")             //
      ("r", po::value<double>(&defaults.r)->default_value(5.0),
       "full coverage radius")                                           //
      ("R", po::value<double>(&defaults.R)->default_value(20.0),
       "zero coverage radius, must exceed r")                            //
      ("theta", po::value<double>(&defaults.theta)->default_value(0.2),
       "weight of the best facility in the joint coverage, in [0, 1]")   //
      ("K", po::value<int>(&defaults.K)->default_value(0),
       "facility budget; 0 takes the p value from the instance file")    //
      ("formulation", po::value<std::string>(&formulation)->default_value("f4"),
       "cut formulation: f1, f2, f3 or f4")                              //
      ("mode", po::value<std::string>(&mode)->default_value("fhp"),
       "solver features: b, f, fh or fhp")                               //
      ("time-limit", po::value<double>(&defaults.time_limit)->default_value(600.0),
       "wall clock budget per solve in seconds")                         //
      ("out,o", po::value<std::string>(&out_path),
       "report file (default: standard output)")                         //
      ("format", po::value<std::string>(&format)->default_value("csv"),
       "report format: csv or json")                                     //
      ("batch", po::value<std::string>(&batch_path),
       "file of key=value run lines; flags above act as defaults")       //
      ("dump-lp", po::value<std::string>(&dump_path),
       "write the root relaxation in LP text format and exit")           //
      ("no-dominance", "keep dominated locations (fhp mode)")            //
      ("no-binary-rule", "skip the single-copy colocation cap (fhp mode)")  //
      ("no-position-caps", "skip incumbent-based copy caps (fhp mode)")  //
      ("quiet,q", "suppress progress output");

  po::variables_map parms;
  po::store(po::parse_command_line(argc, argv, visible), parms);
  po::notify(parms);

  if (parms.count("help") != 0) {
    std::cout << "usage: mgclp --instance FILE [options]\n"
              << "       mgclp --batch FILE [options]\n\n"
              << visible << '\n';
    return mgclp::kExitOptimal;
  }

  defaults.formulation = mgclp::parse_formulation(formulation);
  defaults.mode = mgclp::parse_mode(mode);
  defaults.dominance = parms.count("no-dominance") == 0;
  defaults.binary_rule = parms.count("no-binary-rule") == 0;
  defaults.position_caps = parms.count("no-position-caps") == 0;
  const mgclp::OutputFormat out_format = mgclp::parse_format(format);

  std::vector<mgclp::RunSpec> specs;
  if (!batch_path.empty()) {
    std::ifstream in(batch_path);
    if (!in) throw mgclp::ParameterError("cannot open batch file '" + batch_path + "'");
    specs = mgclp::parse_batch(in, defaults);
    if (specs.empty()) throw mgclp::ParameterError("batch file has no run lines");
  } else {
    if (defaults.instance_path.empty())
      throw mgclp::ParameterError("either --instance or --batch is required");
    specs.push_back(defaults);
  }

  if (!dump_path.empty()) {
    if (specs.size() != 1)
      throw mgclp::ParameterError("--dump-lp expects a single run");
    dump_root_relaxation(specs.front(), dump_path);
    std::cerr << "wrote " << dump_path << '\n';
    return mgclp::kExitOptimal;
  }

  std::ostream* log = parms.count("quiet") != 0 ? nullptr : &std::cerr;
  if (out_path.empty()) return mgclp::run_specs(specs, std::cout, out_format, log);
  std::ofstream out(out_path);
  if (!out) throw mgclp::ParameterError("cannot open output file '" + out_path + "'");
  return mgclp::run_specs(specs, out, out_format, log);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const mgclp::ResourceError& e) {
    std::cerr << "mgclp: resource limit: " << e.what() << '\n';
    return mgclp::kExitResource;
  } catch (const mgclp::Error& e) {
    std::cerr << "mgclp: " << e.what() << '\n';
    return mgclp::kExitInput;
  } catch (const po::error& e) {
    std::cerr << "mgclp: " << e.what() << '\n';
    return mgclp::kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "mgclp: unexpected error: " << e.what() << '\n';
    return mgclp::kExitInput;
  }
}
