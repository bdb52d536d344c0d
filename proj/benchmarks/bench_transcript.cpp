#include <benchmark/benchmark.h>

#include "gbcert/cs/compile.hpp"
#include "gbcert/dataset.hpp"
#include "gbcert/train.hpp"

namespace {

using namespace gbcert;

void BM_CompileCert(benchmark::State& state) {
  LoadedCsv csv = make_synthetic(static_cast<std::size_t>(state.range(0)), 3,
                                 11, 2.0, FxpConfig{16});
  Hyperparams hp = default_hyperparams(csv.ds.cfg);
  hp.trees = 2;
  hp.depth = 2;
  hp.bins = 8;
  TrainResult r = train(csv.ds, hp);
  std::array<std::uint8_t, 32> stmt{};
  for (auto _ : state)
    benchmark::DoNotOptimize(
        cs::compile_cert(csv.ds, r.model, &r.assignment, stmt));
}
BENCHMARK(BM_CompileCert)->Arg(16)->Arg(32);

void BM_VerifyTranscript(benchmark::State& state) {
  LoadedCsv csv = make_synthetic(32, 3, 11, 2.0, FxpConfig{16});
  Hyperparams hp = default_hyperparams(csv.ds.cfg);
  hp.trees = 2;
  hp.depth = 2;
  hp.bins = 8;
  TrainResult r = train(csv.ds, hp);
  std::array<std::uint8_t, 32> stmt{};
  cs::Transcript tr = cs::compile_cert(csv.ds, r.model, &r.assignment, stmt);
  gbcert::Felt challenge = 1234567;
  for (auto _ : state)
    benchmark::DoNotOptimize(cs::verify_transcript(tr, challenge));
}
BENCHMARK(BM_VerifyTranscript);

}  // namespace
