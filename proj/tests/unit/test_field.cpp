#include <doctest.h>

#include "gbcert/field.hpp"
#include "gbcert/oracle.hpp"
#include "gbcert/rng.hpp"

using namespace gbcert;

TEST_CASE("field constants and wraparound") {
  CHECK(kPrime == 2305843009213693951ULL);
  CHECK(f_add(kPrime - 1, 1) == 0);
  CHECK(f_mul(2, 1ULL << 60) == 1);  // 2^61 = p + 1
  CHECK(f_sub(0, 1) == kPrime - 1);
}

TEST_CASE("Mersenne reduction equals naive 128-bit mod") {
  Rng rng(101);
  for (int i = 0; i < 1000000; ++i) {
    Felt a = rng.next() % kPrime;
    Felt b = rng.next() % kPrime;
    CHECK(f_mul(a, b) == oracle::f_mul_naive(a, b));
  }
}

TEST_CASE("inverse") {
  CHECK(f_inv(1) == 1);
  CHECK(f_inv(2) == 1ULL << 60);
  CHECK_THROWS_AS(f_inv(0), ZeroInverse);
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    Felt a = 1 + rng.next() % (kPrime - 1);
    Felt inv = f_inv(a);
    CHECK(f_mul(a, inv) == 1);
    CHECK(inv == oracle::f_inv_egcd(a));
  }
}

TEST_CASE("field axioms on random triples") {
  Rng rng(23);
  for (int i = 0; i < 20000; ++i) {
    Felt a = rng.next() % kPrime, b = rng.next() % kPrime, c = rng.next() % kPrime;
    CHECK(f_mul(f_mul(a, b), c) == f_mul(a, f_mul(b, c)));
    CHECK(f_add(f_add(a, b), c) == f_add(a, f_add(b, c)));
    CHECK(f_mul(a, f_add(b, c)) == f_add(f_mul(a, b), f_mul(a, c)));
  }
}

TEST_CASE("signed encoding round trip and gap bounds") {
  CHECK(encode_signed(-1) == kPrime - 1);
  CHECK(encode_signed(0) == 0);
  for (std::int64_t x = -(1 << 20); x <= (1 << 20); x += 997)
    CHECK(decode_signed(encode_signed(x)) == x);
  CHECK_THROWS_AS(encode_signed(static_cast<std::int64_t>(kGapBound) + 1),
                  OutOfGapRange);
  CHECK_THROWS_AS(decode_signed(1ULL << 60), OutOfGapRange);
}

TEST_CASE("msb semantics equal the sign") {
  CHECK(msb_semantic(5) == 0);
  CHECK(msb_semantic(kPrime - 3) == 1);
  CHECK(msb_semantic(0) == 0);
  Rng rng(31);
  for (int i = 0; i < 100000; ++i) {
    std::int64_t x = rng.range(-static_cast<std::int64_t>(kGapBound),
                               static_cast<std::int64_t>(kGapBound));
    CHECK(msb_semantic(encode_signed(x)) == (x < 0 ? 1 : 0));
    CHECK(oracle::msb_bit(encode_signed(x)) == (x < 0 ? 1 : 0));
  }
}

TEST_CASE("subtraction MSB decides x < y") {
  // exhaustive on a small grid, randomized across the full gap range
  for (std::int64_t x = -64; x <= 64; ++x)
    for (std::int64_t y = -64; y <= 64; ++y) {
      Felt diff = f_sub(encode_signed(x), encode_signed(y));
      CHECK(((diff >> 60) & 1) == (x < y ? 1 : 0));
    }
  Rng rng(37);
  const std::int64_t half = static_cast<std::int64_t>(kGapBound);
  for (int i = 0; i < 200000; ++i) {
    std::int64_t x = rng.range(-half, half);
    std::int64_t y = rng.range(-half, half);
    Felt diff = f_sub(encode_signed(x), encode_signed(y));
    CHECK(((diff >> 60) & 1) == (x < y ? 1 : 0));
  }
}

TEST_CASE("gadget params") {
  GadgetParams p;
  CHECK(p.valid());
  CHECK(p.group_bits * p.group_count == 60);
  p.max_denominator = 1ULL << 31;
  p.max_quotient = 1ULL << 31;
  CHECK_FALSE(p.valid());  // 2^62 >= p/2
  p = GadgetParams{};
  p.group_bits = 10;
  CHECK_FALSE(p.valid());  // 10 * 5 != 60
}
