// Copyright 2026 The zkleak Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <random>

#include "testing/program_gen.h"
#include "zkleak/defect_patterns.h"
#include "zkleak/pipeline.h"
#include "zkleak/token_stream.h"

namespace zkleak {
namespace {

std::string JoinedCorpus(int loc) {
  std::mt19937 rng(7);
  std::string out;
  for (const SourceText& s : testing::SyntheticCorpus(rng, loc)) out += s.text;
  return out;
}

void BM_Tokenize(benchmark::State& state) {
  const std::string text = JoinedCorpus(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Tokenize(text, "bench.c"));
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Tokenize)->Arg(1000)->Arg(10000);

// Linear in stream length: each doubling should roughly double the time.
void BM_MatchAll(benchmark::State& state) {
  const Program program = Program::FromText(testing::LinearSource(static_cast<int>(state.range(0))));
  const TokenStream& ts = program.stream(0);
  const PatternCatalog catalog = BuiltinPatterns();
  for (auto _ : state) {
    std::size_t hits = 0;
    for (const DefectPattern& p : catalog.patterns()) hits += MatchAll(ts, p).size();
    benchmark::DoNotOptimize(hits);
  }
  state.counters["tokens"] = static_cast<double>(ts.size());
  state.SetComplexityN(static_cast<int64_t>(ts.size()));
}
BENCHMARK(BM_MatchAll)->RangeMultiplier(2)->Range(100, 1600)->Complexity(benchmark::oN);

void BM_Pipeline(benchmark::State& state) {
  std::mt19937 rng(11);
  const auto sources = testing::SyntheticCorpus(rng, static_cast<int>(state.range(0)));
  int loc = 0;
  for (auto _ : state) {
    PipelineConfig config;
    config.jobs = 1;
    const Analysis a = AnalyzeSources(sources, config);
    loc = 0;
    for (const FileStat& f : a.report.files) loc += f.loc;
    benchmark::DoNotOptimize(a.report.defects.size());
  }
  state.counters["loc_per_s"] =
      benchmark::Counter(static_cast<double>(loc), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_Pipeline)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace zkleak

BENCHMARK_MAIN();
