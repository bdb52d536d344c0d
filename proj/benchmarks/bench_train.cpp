#include <benchmark/benchmark.h>

#include "gbcert/cert.hpp"
#include "gbcert/dataset.hpp"
#include "gbcert/train.hpp"

namespace {

using namespace gbcert;

Dataset bench_data(std::size_t rows) {
  LoadedCsv csv = make_synthetic(rows, 8, 7, 2.0, FxpConfig{});
  return csv.ds;
}

void BM_Train(benchmark::State& state) {
  Dataset ds = bench_data(static_cast<std::size_t>(state.range(0)));
  Hyperparams hp = default_hyperparams(ds.cfg);
  hp.trees = 10;
  hp.depth = 4;
  hp.bins = 32;
  for (auto _ : state) benchmark::DoNotOptimize(train(ds, hp));
}
BENCHMARK(BM_Train)->Arg(200)->Arg(1000);

void BM_Certify(benchmark::State& state) {
  Dataset ds = bench_data(static_cast<std::size_t>(state.range(0)));
  Hyperparams hp = default_hyperparams(ds.cfg);
  hp.trees = 10;
  hp.depth = 4;
  hp.bins = 32;
  TrainResult r = train(ds, hp);
  for (auto _ : state)
    benchmark::DoNotOptimize(certify(ds, r.model, &r.assignment));
}
BENCHMARK(BM_Certify)->Arg(200)->Arg(1000);

}  // namespace
