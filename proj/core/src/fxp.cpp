#include "gbcert/fxp.hpp"

#include <cctype>
#include <cmath>

namespace gbcert {

Fxp quantize(double real, FxpConfig cfg) {
  if (!cfg.valid()) throw std::invalid_argument("frac_bits out of [4,28]");
  // long double keeps the 2^F product exact for every in-range double.
  long double scaled = std::fabs(static_cast<long double>(real)) *
                       static_cast<long double>(cfg.scale());
  if (!(scaled <= static_cast<long double>(kRawRangeMax)))
    throw RangeExceeded("quantize input exceeds representable range");
  auto mag = static_cast<std::int64_t>(scaled);  // truncation toward zero
  return Fxp{real < 0 ? -mag : mag};
}

Fxp quantize_decimal(std::string_view text, FxpConfig cfg) {
  if (!cfg.valid()) throw std::invalid_argument("frac_bits out of [4,28]");
  std::size_t pos = 0;
  auto fail = [&]() -> Fxp {
    throw std::invalid_argument("malformed decimal literal: " + std::string(text));
  };
  if (text.empty()) return fail();

  bool neg = false;
  if (text[pos] == '+' || text[pos] == '-') {
    neg = text[pos] == '-';
    ++pos;
  }

  std::string digits;  // all significant digits, point position tracked apart
  int point_offset = 0;  // digits after the decimal point
  bool seen_digit = false, seen_point = false;
  for (; pos < text.size(); ++pos) {
    char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      if (seen_point) ++point_offset;
      seen_digit = true;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) return fail();

  long exp10 = 0;
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    bool eneg = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      eneg = text[pos] == '-';
      ++pos;
    }
    if (pos >= text.size()) return fail();
    for (; pos < text.size(); ++pos) {
      if (!std::isdigit(static_cast<unsigned char>(text[pos]))) return fail();
      exp10 = exp10 * 10 + (text[pos] - '0');
      if (exp10 > 10000) return fail();
    }
    if (eneg) exp10 = -exp10;
  }
  if (pos != text.size()) return fail();

  // value = digits * 10^(exp10 - point_offset)
  long frac_digits = point_offset - exp10;
  if (frac_digits < 0) {
    digits.append(static_cast<std::size_t>(-frac_digits), '0');
    frac_digits = 0;
  }
  // Digits beyond 27 fractional places cannot move the floor at F <= 28.
  if (frac_digits > 27) {
    digits.resize(digits.size() - (frac_digits - 27));
    frac_digits = 27;
  }
  while (digits.size() > static_cast<std::size_t>(frac_digits) && digits.front() == '0')
    digits.erase(digits.begin());

  std::size_t int_len = digits.size() - static_cast<std::size_t>(frac_digits);
  __int128 int_part = 0;
  for (std::size_t i = 0; i < int_len; ++i) {
    int_part = int_part * 10 + (digits[i] - '0');
    if (int_part > static_cast<__int128>(kRawRangeMax))
      throw RangeExceeded("quantize input exceeds representable range");
  }
  __int128 frac_part = 0;
  __int128 pow10 = 1;
  for (std::size_t i = int_len; i < digits.size(); ++i) {
    frac_part = frac_part * 10 + (digits[i] - '0');
    pow10 *= 10;
  }

  __int128 raw = int_part * cfg.scale();
  if (pow10 > 1) raw += frac_part * cfg.scale() / pow10;
  if (raw > static_cast<__int128>(kRawRangeMax))
    throw RangeExceeded("quantize input exceeds representable range");
  auto mag = static_cast<std::int64_t>(raw);
  return Fxp{neg ? -mag : mag};
}

}  // namespace gbcert
