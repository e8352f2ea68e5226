// Copyright coverif contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "coverif/bitblast.hpp"
#include "coverif/bmc.hpp"
#include "coverif/rtl_parse.hpp"
#include "coverif/symex.hpp"
#include "coverif/synth.hpp"
#include "coverif/unwind.hpp"
#include "coverif/verify.hpp"

#ifndef COVERIF_DESIGNS_DIR
#define COVERIF_DESIGNS_DIR "designs"
#endif

namespace {

using namespace coverif;

std::string path(const char* f) { return std::string(COVERIF_DESIGNS_DIR) + "/" + f; }

harness::ComposedModel uart_model(const char* fw) {
  auto design = rtl::elaborate(rtl::parse_files({path("mini_uart.v")}), "mini_uart");
  return harness::compose(fw::parse_fw_file(path(fw)), synth::synthesize(design));
}

void BM_synthesize_uart(benchmark::State& state) {
  auto design = rtl::elaborate(rtl::parse_files({path("mini_uart.v")}), "mini_uart");
  for (auto _ : state) {
    auto p = synth::synthesize(design);
    benchmark::DoNotOptimize(p.step.size());
  }
}
BENCHMARK(BM_synthesize_uart);

void BM_symex_loopback(benchmark::State& state) {
  auto model = uart_model("uart_loopback.fw");
  ir::Program p = harness::unwind(model.program, static_cast<unsigned>(state.range(0)));
  for (auto _ : state) {
    symex::Config cfg;
    Verdict v = symex::run(p, cfg);
    benchmark::DoNotOptimize(v.safe);
  }
}
BENCHMARK(BM_symex_loopback)->Arg(6)->Arg(10)->Arg(16);

void BM_mono_loopback(benchmark::State& state) {
  auto model = uart_model("uart_loopback.fw");
  ir::Program p = harness::unwind(model.program, static_cast<unsigned>(state.range(0)));
  for (auto _ : state) {
    Verdict v = bmc::check(bmc::encode_ssa(p));
    benchmark::DoNotOptimize(v.safe);
  }
}
BENCHMARK(BM_mono_loopback)->Arg(6)->Arg(10)->Arg(16);

void BM_bitblast_adder(benchmark::State& state) {
  unsigned w = static_cast<unsigned>(state.range(0));
  bv::ExprRef cond = bv::eq(bv::add(bv::var("x", 1, w), bv::var("y", 1, w)),
                            bv::mul(bv::var("x", 1, w), bv::constant(3, w)));
  for (auto _ : state) {
    blast::CnfInstance inst;
    inst.assert_true(cond);
    benchmark::DoNotOptimize(inst.solve());
  }
}
BENCHMARK(BM_bitblast_adder)->Arg(8)->Arg(16)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
