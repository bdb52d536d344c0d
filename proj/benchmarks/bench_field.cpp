#include <benchmark/benchmark.h>

#include "gbcert/field.hpp"
#include "gbcert/rng.hpp"

namespace {

void BM_FieldMul(benchmark::State& state) {
  gbcert::Rng rng(1);
  gbcert::Felt a = rng.next() % gbcert::kPrime;
  gbcert::Felt b = rng.next() % gbcert::kPrime;
  for (auto _ : state) {
    a = gbcert::f_mul(a, b);
    benchmark::DoNotOptimize(a);
  }
}
BENCHMARK(BM_FieldMul);

void BM_FieldInv(benchmark::State& state) {
  gbcert::Rng rng(2);
  gbcert::Felt a = 1 + rng.next() % (gbcert::kPrime - 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gbcert::f_inv(a));
    if (++a >= gbcert::kPrime) a = 1;
  }
}
BENCHMARK(BM_FieldInv);

}  // namespace

BENCHMARK_MAIN();
