#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gbcert {

/// Signed fixed-point arithmetic with an implicit global scale of 2^frac_bits.
/// Every operation rounds by truncation toward zero and is a pure function of
/// the raw integers, so results are bit-identical across platforms.

// Largest raw magnitude that stays encodable with a one-bit gap in the
// 61-bit prime field used by the constraint layer: floor((2^61-1)/4) = 2^59-1.
inline constexpr std::int64_t kRawRangeMax = 576460752303423487LL;

struct FxpConfig {
  int frac_bits = 20;

  constexpr std::int64_t scale() const { return std::int64_t{1} << frac_bits; }
  constexpr bool valid() const { return frac_bits >= 4 && frac_bits <= 28; }
};

struct Fxp {
  std::int64_t raw = 0;

  friend constexpr bool operator==(Fxp a, Fxp b) { return a.raw == b.raw; }
  friend constexpr bool operator!=(Fxp a, Fxp b) { return a.raw != b.raw; }
  friend constexpr bool operator<(Fxp a, Fxp b) { return a.raw < b.raw; }
  friend constexpr bool operator<=(Fxp a, Fxp b) { return a.raw <= b.raw; }
};

class RangeExceeded : public std::overflow_error {
 public:
  explicit RangeExceeded(const std::string& what) : std::overflow_error(what) {}
};

class DivByZero : public std::domain_error {
 public:
  DivByZero() : std::domain_error("fixed-point division by zero") {}
};

class InvalidBounds : public std::invalid_argument {
 public:
  InvalidBounds() : std::invalid_argument("clip bounds out of order") {}
};

/// raw = sign(real) * floor(|real| * 2^F). Throws RangeExceeded past 2^59-1.
Fxp quantize(double real, FxpConfig cfg);

/// Exact decimal-string quantization ("-12.375", "1e-3", "0.000001").
/// The CSV/config path so that ingestion never depends on binary rounding.
Fxp quantize_decimal(std::string_view text, FxpConfig cfg);

inline Fxp fxp_mul(Fxp x, Fxp y, FxpConfig cfg) {
  __int128 prod = static_cast<__int128>(x.raw) * y.raw;
  __int128 q = prod / cfg.scale();  // native / truncates toward zero
  if (q > kRawRangeMax || q < -kRawRangeMax)
    throw RangeExceeded("fxp_mul result exceeds representable range");
  return Fxp{static_cast<std::int64_t>(q)};
}

inline Fxp fxp_div(Fxp x, Fxp y, FxpConfig cfg) {
  if (y.raw == 0) throw DivByZero{};
  // Sign by XOR of operand signs, magnitude floored; matches the division
  // gadget which proves |x|*S = |y|*|z| + r and the sign bit separately.
  __int128 num = static_cast<__int128>(x.raw < 0 ? -x.raw : x.raw) * cfg.scale();
  std::int64_t den = y.raw < 0 ? -y.raw : y.raw;
  __int128 mag = num / den;
  if (mag > kRawRangeMax)
    throw RangeExceeded("fxp_div result exceeds representable range");
  bool neg = (x.raw < 0) != (y.raw < 0);
  return Fxp{neg ? -static_cast<std::int64_t>(mag) : static_cast<std::int64_t>(mag)};
}

/// Piecewise-linear sigmoid: 0 below -2, 1 above 2, (z+2)/4 in between.
inline Fxp sigmoid_wide(Fxp z, FxpConfig cfg) {
  const std::int64_t two = 2 * cfg.scale();
  if (z.raw <= -two) return Fxp{0};
  if (z.raw >= two) return Fxp{cfg.scale()};
  return Fxp{(z.raw + two) / 4};  // numerator positive in this branch
}

/// Truncated atanh series: 2*(u + u^3/3 + u^5/5) with u = 2p-1.
/// Powers go through fxp_mul; /3 and /5 divide the scaled term directly.
/// Caller clips p into [p_min, 1-p_min] first.
inline Fxp logit_from_prob(Fxp p, FxpConfig cfg) {
  const std::int64_t u = 2 * p.raw - cfg.scale();
  const Fxp uf{u};
  const Fxp u2 = fxp_mul(uf, uf, cfg);
  const Fxp u3 = fxp_mul(u2, uf, cfg);
  const Fxp u5 = fxp_mul(u3, u2, cfg);
  const std::int64_t t3 = u3.raw / 3;
  const std::int64_t t5 = u5.raw / 5;
  return Fxp{2 * (u + t3 + t5)};
}

inline Fxp clip(Fxp x, Fxp lo, Fxp hi) {
  if (lo.raw > hi.raw) throw InvalidBounds{};
  if (x.raw < lo.raw) return lo;
  if (x.raw > hi.raw) return hi;
  return x;
}

}  // namespace gbcert
