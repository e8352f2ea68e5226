// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "coverif/bv_json.hpp"
#include "coverif/sim.hpp"
#include "coverif/unwind.hpp"
#include "coverif/verify.hpp"

namespace {

constexpr int kExitSafe = 0;
constexpr int kExitUnsafe = 10;
constexpr int kExitError = 1;
constexpr int kExitVacuous = 2;

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw coverif::Error("cannot write " + path);
  os << text;
}

struct CommonArgs {
  std::vector<std::string> design_files;
  std::string top;
  std::string fw_path;
};

void add_design_args(CLI::App* cmd, CommonArgs& args, bool with_fw) {
  cmd->add_option("design", args.design_files, "Verilog source files (.v)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--top", args.top, "top module name")->required();
  if (with_fw)
    cmd->add_option("--fw", args.fw_path, "firmware/driver program (.fw)")
        ->required()
        ->check(CLI::ExistingFile);
}

int run_translate(const CommonArgs& args, const std::string& emit_c_path,
                  const std::string& emit_ir_path) {
  auto design = coverif::load_design_files(args.design_files, args.top);
  auto program = coverif::synth::synthesize(design);
  if (emit_c_path.empty() && emit_ir_path.empty()) {
    std::cout << coverif::synth::emit_c(program);
    return kExitSafe;
  }
  if (!emit_c_path.empty()) write_file(emit_c_path, coverif::synth::emit_c(program));
  if (!emit_ir_path.empty())
    write_file(emit_ir_path, coverif::synth::program_to_json(program).dump(2) + "\n");
  std::cout << "translated " << args.top << ": " << program.state_vars.size()
            << " state variables, " << program.inputs.size() << " inputs, "
            << program.step.size() << " step statements\n";
  return kExitSafe;
}

int run_verify(const CommonArgs& args, coverif::VerifyOptions opts,
               const std::string& stats_path, const std::string& trace_path) {
  auto design = coverif::load_design_files(args.design_files, args.top);
  auto model = coverif::load_model(design, args.fw_path);
  coverif::VerifyResult res = coverif::verify_model(model, opts);
  print_warnings(res.warnings);

  const auto& v = res.verdict;
  if (v.safe) {
    std::cout << "VERDICT: Safe\n";
  } else {
    std::cout << "VERDICT: Unsafe (assert '" << v.trace->violated_assert
              << "' violated at cycle " << v.trace->violation_cycle << ")\n";
  }
  std::cout << std::fixed << std::setprecision(2);
  std::cout << "paths: " << v.stats.branch_attempts << " attempted, "
            << v.stats.pruned << " pruned, " << v.stats.completed_paths
            << " completed (" << v.stats.pruning_percent() << "% pruning)\n";
  std::cout << "solver: " << v.stats.solver_calls << " calls, "
            << v.stats.solver_instances << " instances, " << v.stats.solve_time_ms
            << " ms\n";

  if (!stats_path.empty()) {
    nlohmann::json j = v.stats.to_json();
    j["verdict"] = v.safe ? "safe" : "unsafe";
    j["engine"] = opts.engine == coverif::EngineKind::Symex
                      ? "symex"
                      : opts.engine == coverif::EngineKind::Mono ? "mono" : "enum";
    j["mode"] = opts.mode == coverif::symex::Mode::PartialIncremental ? "pi" : "fi";
    j["prune"] = opts.prune;
    j["slice"] = opts.slice;
    j["unwind"] = opts.unwind;
    j["sliced_stmts"] = res.sliced_stmts;
    j["original_stmts"] = res.original_stmts;
    if (!v.safe) j["violated_assert"] = v.trace->violated_assert;
    write_file(stats_path, j.dump(2) + "\n");
  }
  if (!trace_path.empty() && !v.safe)
    write_file(trace_path, v.trace->to_json().dump(2) + "\n");

  return v.safe ? kExitSafe : kExitUnsafe;
}

int run_simulate(const CommonArgs& args, unsigned unwind,
                 const std::string& trace_path) {
  auto design = coverif::load_design_files(args.design_files, args.top);
  auto model = coverif::load_model(design, args.fw_path);
  std::vector<std::string> warnings = model.warnings;
  coverif::ir::Program program = coverif::harness::unwind(model.program, unwind, &warnings);
  print_warnings(warnings);

  std::ifstream in(trace_path);
  if (!in) throw coverif::Error("cannot open trace file: " + trace_path);
  nlohmann::json j;
  in >> j;
  coverif::Trace trace = coverif::Trace::from_json(j);

  coverif::sim::TraceSource source(trace);
  coverif::sim::SimOptions sopts;
  sopts.hw = &model.hw;
  for (const auto& [n, w] : model.hw.state_vars) sopts.snapshot_vars.push_back(n);
  coverif::sim::SimResult r = coverif::sim::simulate(program, source, sopts);

  if (r.defaulted)
    std::cerr << "note: " << r.defaulted
              << " havoc(s) had no trace value and defaulted to 0\n";
  if (r.vacuous) {
    std::cout << "SIMULATION: vacuous (assume violated in cycle " << r.vacuous_cycle
              << ")\n";
    return kExitVacuous;
  }
  if (r.violated) {
    std::cout << "SIMULATION: assert '" << *r.violated << "' violated at cycle "
              << r.violation_cycle << "\n";
    if (!trace.violated_assert.empty() && trace.violated_assert != *r.violated)
      std::cerr << "note: trace names '" << trace.violated_assert << "'\n";
    return kExitUnsafe;
  }
  std::cout << "SIMULATION: no violation\n";
  return kExitSafe;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coverif: bounded hardware/software co-verification"};
  app.require_subcommand(1);

  CommonArgs targs, vargs, sargs;
  std::string emit_c_path, emit_ir_path;
  std::string stats_path, trace_out, trace_in, dimacs_path;
  std::string engine = "symex", mode = "pi";
  unsigned unwind_v = 1, unwind_s = 1, enum_bits = 20;
  bool no_prune = false;

  auto* translate = app.add_subcommand(
      "translate", "translate Verilog into the software netlist model");
  add_design_args(translate, targs, false);
  translate->add_option("--emit-c", emit_c_path, "write the C rendering here");
  translate->add_option("--emit-ir", emit_ir_path, "write the IR JSON here");

  auto* verify = app.add_subcommand("verify", "prove or refute the assertions");
  add_design_args(verify, vargs, true);
  verify->add_option("--engine", engine, "symex | mono | enum")
      ->check(CLI::IsMember({"symex", "mono", "enum"}));
  verify->add_option("--mode", mode, "incremental solving: pi | fi")
      ->check(CLI::IsMember({"pi", "fi"}));
  verify->add_option("--unwind", unwind_v, "harness loop bound k");
  verify->add_flag("--no-prune", no_prune, "disable eager infeasibility pruning");
  bool slice_on = true;
  verify->add_flag("--slice,!--no-slice", slice_on, "property-driven slicing (default on)");
  verify->add_option("--stats", stats_path, "write statistics JSON here");
  verify->add_option("--trace", trace_out, "write the counterexample trace JSON here");
  verify->add_option("--dump-dimacs", dimacs_path, "write the monolithic CNF here");
  verify->add_option("--enum-max-bits", enum_bits,
                     "enumeration engine: input bit budget");

  auto* simulate = app.add_subcommand("simulate", "replay a trace concretely");
  add_design_args(simulate, sargs, true);
  simulate->add_option("--unwind", unwind_s, "harness loop bound k");
  simulate->add_option("--trace", trace_in, "trace JSON to replay")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (translate->parsed()) return run_translate(targs, emit_c_path, emit_ir_path);
    if (verify->parsed()) {
      coverif::VerifyOptions opts;
      opts.engine = engine == "symex"  ? coverif::EngineKind::Symex
                    : engine == "mono" ? coverif::EngineKind::Mono
                                       : coverif::EngineKind::Enumerate;
      opts.mode = mode == "fi" ? coverif::symex::Mode::FullIncremental
                               : coverif::symex::Mode::PartialIncremental;
      opts.prune = !no_prune;
      opts.slice = slice_on;
      opts.unwind = unwind_v;
      opts.dump_dimacs = dimacs_path;
      opts.enum_max_bits = enum_bits;
      return run_verify(vargs, opts, stats_path, trace_out);
    }
    if (simulate->parsed()) return run_simulate(sargs, unwind_s, trace_in);
  } catch (const coverif::SolverLimit& e) {
    std::cerr << "engine error: " << e.what() << "\n";
    return kExitError;
  } catch (const coverif::Error& e) {
    std::cerr << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
