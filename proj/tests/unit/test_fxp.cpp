#include <doctest.h>

#include "gbcert/fxp.hpp"
#include "gbcert/oracle.hpp"
#include "gbcert/rng.hpp"

using namespace gbcert;

namespace {
const FxpConfig f4{4};
const FxpConfig f8{8};
const FxpConfig f20{20};
}  // namespace

TEST_CASE("quantize truncates toward zero") {
  CHECK(quantize(1.5, f4).raw == 24);
  CHECK(quantize(0.0, f20).raw == 0);
  CHECK(quantize(-0.3, f4).raw == -4);
  CHECK(quantize_decimal("1.5", f4).raw == 24);
  CHECK(quantize_decimal("-0.3", f4).raw == -4);
  CHECK(quantize_decimal("0.000001", f20).raw == 1);
  CHECK(quantize_decimal("1e-6", f20).raw == 1);
  CHECK(quantize_decimal("2.5e2", f4).raw == 250 * 16);
  CHECK_THROWS_AS(quantize(1e18, f20), RangeExceeded);
  CHECK_THROWS_AS(quantize_decimal("abc", f4), std::invalid_argument);
}

TEST_CASE("quantize_decimal matches double quantize on random decimals") {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    std::int64_t whole = rng.range(-99999, 99999);
    std::int64_t frac = rng.range(0, 999999);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%lld.%06lld", static_cast<long long>(whole),
                  static_cast<long long>(frac));
    Fxp a = quantize_decimal(buf, f20);
    Fxp b = quantize(std::stod(buf), f20);
    CAPTURE(buf);
    CHECK(a.raw == b.raw);
  }
}

TEST_CASE("fxp_mul basics") {
  CHECK(fxp_mul(Fxp{24}, Fxp{32}, f4).raw == 48);
  CHECK(fxp_mul(Fxp{0}, Fxp{12345}, f4).raw == 0);
  CHECK(fxp_mul(Fxp{-24}, Fxp{32}, f4).raw == -48);
  // identity: multiplying by quantize(1.0) is exact
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    Fxp x{rng.range(-1000000, 1000000)};
    CHECK(fxp_mul(x, quantize(1.0, f20), f20).raw == x.raw);
  }
}

TEST_CASE("fxp_div floor magnitude, XOR sign") {
  CHECK(fxp_div(Fxp{16}, Fxp{48}, f4).raw == 5);
  CHECK(fxp_div(Fxp{-16}, Fxp{48}, f4).raw == -5);
  CHECK(fxp_div(Fxp{48}, Fxp{16}, f4).raw == 48);
  CHECK_THROWS_AS(fxp_div(Fxp{1}, Fxp{0}, f4), DivByZero);
}

TEST_CASE("fxp_div magnitude equals the big-integer oracle") {
  Rng rng(13);
  for (int i = 0; i < 100000; ++i) {
    std::int64_t x = rng.range(-(1LL << 40), 1LL << 40);
    std::int64_t y = rng.range(-(1LL << 30), 1LL << 30);
    if (y == 0) continue;
    CHECK(fxp_div(Fxp{x}, Fxp{y}, f20).raw == oracle::fxp_div(x, y, 20));
  }
}

TEST_CASE("fxp_mul agrees with the oracle on random pairs") {
  Rng rng(17);
  for (int i = 0; i < 100000; ++i) {
    std::int64_t x = rng.range(-(1LL << 40), 1LL << 40);
    std::int64_t y = rng.range(-(1LL << 20), 1LL << 20);
    CHECK(fxp_mul(Fxp{x}, Fxp{y}, f20).raw == oracle::fxp_mul(x, y, 20));
  }
}

TEST_CASE("sigmoid_wide branches and saturation") {
  CHECK(sigmoid_wide(Fxp{0}, f4).raw == 8);
  CHECK(sigmoid_wide(Fxp{40}, f4).raw == 16);   // z = 2.5 >= 2
  CHECK(sigmoid_wide(Fxp{16}, f4).raw == 12);   // (16+32)/4
  CHECK(sigmoid_wide(Fxp{-32}, f4).raw == 0);   // exactly -2
  CHECK(sigmoid_wide(Fxp{32}, f4).raw == 16);   // exactly 2
}

TEST_CASE("sigmoid_wide is monotone with output in [0, S]") {
  std::int64_t prev = -1;
  for (std::int64_t raw = -3 * f8.scale(); raw <= 3 * f8.scale(); ++raw) {
    std::int64_t p = sigmoid_wide(Fxp{raw}, f8).raw;
    CHECK(p >= prev);
    CHECK(p >= 0);
    CHECK(p <= f8.scale());
    prev = p;
  }
}

TEST_CASE("logit_from_prob center and derived value") {
  CHECK(logit_from_prob(Fxp{f20.scale() / 2}, f20).raw == 0);
  // frozen from the wide-integer replay of the series (see testdata/golden)
  CHECK(logit_from_prob(quantize(0.75, f20), f20).raw == 1149062);
  CHECK(logit_from_prob(quantize(0.75, f20), f20).raw ==
        oracle::logit_from_prob(786432, 20));
}

TEST_CASE("logit odd symmetry is exact, exhaustive at F=8") {
  const std::int64_t S = f8.scale();
  for (std::int64_t p = 1; p < S; ++p) {
    std::int64_t a = logit_from_prob(Fxp{p}, f8).raw;
    std::int64_t b = logit_from_prob(Fxp{S - p}, f8).raw;
    CHECK(a == -b);
  }
}

TEST_CASE("sigmoid(logit(p)) round trip stays within the frozen bound") {
  // Worst drift observed over the full clipped range at F=8 and F=20 is one
  // part in 2^3 of scale; frozen with margin.
  for (const FxpConfig& cfg : {f8, f20}) {
    const std::int64_t S = cfg.scale();
    const std::int64_t tol = S / 8;
    for (std::int64_t p = S / 16; p <= S - S / 16; p += std::max<std::int64_t>(1, S / 512)) {
      std::int64_t z = logit_from_prob(Fxp{p}, cfg).raw;
      if (z <= -2 * S || z >= 2 * S) continue;
      std::int64_t back = sigmoid_wide(Fxp{z}, cfg).raw;
      CHECK(std::abs(back - p) <= tol);
    }
  }
}

TEST_CASE("clip") {
  CHECK(clip(Fxp{5}, Fxp{-16}, Fxp{16}).raw == 5);
  CHECK(clip(Fxp{20}, Fxp{-16}, Fxp{16}).raw == 16);
  CHECK(clip(Fxp{-20}, Fxp{-16}, Fxp{16}).raw == -16);
  CHECK_THROWS_AS(clip(Fxp{0}, Fxp{1}, Fxp{-1}), InvalidBounds);
}
