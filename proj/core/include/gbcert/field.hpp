#pragma once

#include <cstdint>
#include <stdexcept>

namespace gbcert {

/// Arithmetic in F_p for the Mersenne prime p = 2^61 - 1, plus the signed
/// encoding with a one-bit gap used by the MSB/comparison gadgets.

using Felt = std::uint64_t;

inline constexpr Felt kPrime = 0x1FFFFFFFFFFFFFFFULL;  // 2^61 - 1
inline constexpr int kFieldBits = 61;
// Signed values live in [0, 2^59-1] u [p-(2^59-1), p-1] so that one
// subtraction cannot wrap past the sign bit.
inline constexpr std::uint64_t kGapBound = 576460752303423487ULL;  // floor(p/4)

class OutOfGapRange : public std::out_of_range {
 public:
  OutOfGapRange() : std::out_of_range("value outside one-bit-gap range") {}
};

class ZeroInverse : public std::domain_error {
 public:
  ZeroInverse() : std::domain_error("inverse of zero") {}
};

inline Felt f_add(Felt a, Felt b) {
  Felt s = a + b;  // < 2^62, no u64 overflow
  if (s >= kPrime) s -= kPrime;
  return s;
}

inline Felt f_sub(Felt a, Felt b) { return a >= b ? a - b : a + kPrime - b; }

inline Felt f_neg(Felt a) { return a == 0 ? 0 : kPrime - a; }

inline Felt f_mul(Felt a, Felt b) {
  __uint128_t z = static_cast<__uint128_t>(a) * b;
  Felt lo = static_cast<Felt>(z) & kPrime;
  Felt hi = static_cast<Felt>(z >> 61);
  Felt r = lo + hi;
  if (r >= kPrime) r -= kPrime;
  return r;
}

inline Felt f_pow(Felt a, std::uint64_t e) {
  Felt acc = 1;
  while (e) {
    if (e & 1) acc = f_mul(acc, a);
    a = f_mul(a, a);
    e >>= 1;
  }
  return acc;
}

inline Felt f_inv(Felt a) {
  if (a == 0) throw ZeroInverse{};
  return f_pow(a, kPrime - 2);
}

inline Felt encode_signed(std::int64_t x) {
  std::uint64_t mag = x < 0 ? static_cast<std::uint64_t>(-x) : static_cast<std::uint64_t>(x);
  if (mag > kGapBound) throw OutOfGapRange{};
  return x < 0 ? kPrime - mag : mag;
}

inline bool in_gap_range(Felt v) {
  return v <= kGapBound || (v >= kPrime - kGapBound && v < kPrime);
}

inline std::int64_t decode_signed(Felt v) {
  if (v <= kGapBound) return static_cast<std::int64_t>(v);
  if (v >= kPrime - kGapBound && v < kPrime)
    return -static_cast<std::int64_t>(kPrime - v);
  throw OutOfGapRange{};
}

/// Bit 60 of the representative; for gap-range values this is the sign of
/// decode_signed(v).
inline int msb_semantic(Felt v) {
  if (!in_gap_range(v)) throw OutOfGapRange{};
  return static_cast<int>((v >> 60) & 1);
}

/// Parameters of the bit-decomposition gadgets: 60 low bits split into t
/// groups of d bits, plus default denominator/quotient bounds for division.
struct GadgetParams {
  int group_bits = 12;   // d; lookup table size 2^d
  int group_count = 5;   // t; d*t = 60
  std::uint64_t max_denominator = (1ULL << 30) - 1;  // m_d
  std::uint64_t max_quotient = (1ULL << 30) - 1;     // m_q

  bool valid() const {
    if (group_bits < 1 || group_count < 1) return false;
    if (group_bits * group_count != kFieldBits - 1) return false;
    __uint128_t prod = static_cast<__uint128_t>(max_denominator) * max_quotient;
    return prod < static_cast<__uint128_t>(kPrime) / 2;
  }
};

}  // namespace gbcert
