// Serial versus OpenMP candidate scoring on desk-scale models.
#include <benchmark/benchmark.h>

#include "mmerge/kernels.hpp"
#include "mmerge/model_io.hpp"
#include "mmerge/search.hpp"

namespace {

const char* kClauseGrammar = R"(start: S
S -> NP VP # 1
VP -> Verb NP # 1
NP -> Art Noun # 1
NP -> Art Noun RC # 1
RC -> Rel VP # 1
Verb => 'saw' # 1
Verb => 'heard' # 1
Noun => 'cat' # 1
Noun => 'dog' # 1
Noun => 'mouse' # 1
Art => 'a' # 1
Art => 'the' # 1
Rel => 'that' # 1
)";

mmerge::Corpus clause_corpus(std::size_t n) {
  return mmerge::sample_strings(mmerge::parse_scfg(kClauseGrammar), {n, 7, 200, true});
}

struct ScfgFixture {
  mmerge::Scfg grammar;
  std::vector<mmerge::ScfgOp> ops;
  explicit ScfgFixture(std::size_t n) : grammar(mmerge::incorporate_scfg(clause_corpus(n))) {
    ops = mmerge::search_candidates(grammar, mmerge::SearchConfig{});
  }
};

struct HmmFixture {
  mmerge::Hmm hmm;
  std::vector<mmerge::HmmOp> ops;
  explicit HmmFixture(std::size_t n) : hmm(mmerge::incorporate_hmm(clause_corpus(n))) {
    ops = mmerge::search_candidates(hmm, mmerge::SearchConfig{});
  }
};

void BM_ScfgSerial(benchmark::State& state) {
  ScfgFixture f(static_cast<std::size_t>(state.range(0)));
  mmerge::ScfgScorer scorer(f.grammar, {});
  for (auto _ : state) benchmark::DoNotOptimize(mmerge::score_candidates_serial(scorer, f.ops));
  state.counters["candidates"] = static_cast<double>(f.ops.size());
}

void BM_ScfgParallel(benchmark::State& state) {
  ScfgFixture f(static_cast<std::size_t>(state.range(0)));
  mmerge::ScfgScorer scorer(f.grammar, {});
  for (auto _ : state) benchmark::DoNotOptimize(mmerge::score_candidates_parallel(scorer, f.ops));
  state.counters["candidates"] = static_cast<double>(f.ops.size());
  state.counters["threads"] = mmerge::kernel_threads();
}

void BM_HmmSerial(benchmark::State& state) {
  HmmFixture f(static_cast<std::size_t>(state.range(0)));
  mmerge::HmmScorer scorer(f.hmm, {});
  for (auto _ : state) benchmark::DoNotOptimize(mmerge::score_candidates_serial(scorer, f.ops));
  state.counters["candidates"] = static_cast<double>(f.ops.size());
}

void BM_HmmParallel(benchmark::State& state) {
  HmmFixture f(static_cast<std::size_t>(state.range(0)));
  mmerge::HmmScorer scorer(f.hmm, {});
  for (auto _ : state) benchmark::DoNotOptimize(mmerge::score_candidates_parallel(scorer, f.ops));
  state.counters["candidates"] = static_cast<double>(f.ops.size());
  state.counters["threads"] = mmerge::kernel_threads();
}

}  // namespace

BENCHMARK(BM_ScfgSerial)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScfgParallel)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HmmSerial)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HmmParallel)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
