#include "gbcert/oracle.hpp"

#include <stdexcept>

namespace gbcert::oracle {

namespace {
constexpr std::uint64_t kP = (1ULL << 61) - 1;

__int128 trunc_div(__int128 num, __int128 den) {
  // Spell out toward-zero semantics instead of leaning on the compiler.
  bool neg = (num < 0) != (den < 0);
  __int128 n = num < 0 ? -num : num;
  __int128 d = den < 0 ? -den : den;
  __int128 q = n / d;
  return neg ? -q : q;
}
}  // namespace

std::int64_t fxp_mul(std::int64_t x_raw, std::int64_t y_raw, int frac_bits) {
  __int128 prod = static_cast<__int128>(x_raw) * y_raw;
  return static_cast<std::int64_t>(trunc_div(prod, __int128{1} << frac_bits));
}

std::int64_t fxp_div(std::int64_t x_raw, std::int64_t y_raw, int frac_bits) {
  if (y_raw == 0) throw std::domain_error("oracle: division by zero");
  __int128 num = static_cast<__int128>(x_raw) << frac_bits;
  return static_cast<std::int64_t>(trunc_div(num, y_raw));
}

std::int64_t sigmoid_wide(std::int64_t z_raw, int frac_bits) {
  std::int64_t scale = std::int64_t{1} << frac_bits;
  if (z_raw <= -2 * scale) return 0;
  if (z_raw >= 2 * scale) return scale;
  return (z_raw + 2 * scale) / 4;
}

std::int64_t logit_from_prob(std::int64_t p_raw, int frac_bits) {
  std::int64_t u = 2 * p_raw - (std::int64_t{1} << frac_bits);
  std::int64_t u2 = fxp_mul(u, u, frac_bits);
  std::int64_t u3 = fxp_mul(u2, u, frac_bits);
  std::int64_t u5 = fxp_mul(u3, u2, frac_bits);
  return 2 * (u + u3 / 3 + u5 / 5);
}

std::int64_t clip(std::int64_t x, std::int64_t lo, std::int64_t hi) {
  return x < lo ? lo : (x > hi ? hi : x);
}

std::uint64_t f_mul_naive(std::uint64_t a, std::uint64_t b) {
  return static_cast<std::uint64_t>((static_cast<__uint128_t>(a) * b) % kP);
}

std::uint64_t f_inv_egcd(std::uint64_t a) {
  if (a == 0) throw std::domain_error("oracle: inverse of zero");
  std::int64_t t = 0, new_t = 1;
  std::int64_t r = static_cast<std::int64_t>(kP), new_r = static_cast<std::int64_t>(a % kP);
  while (new_r != 0) {
    std::int64_t q = r / new_r;
    std::int64_t tmp = t - q * new_t;
    t = new_t;
    new_t = tmp;
    tmp = r - q * new_r;
    r = new_r;
    new_r = tmp;
  }
  if (r != 1) throw std::domain_error("oracle: not invertible");
  if (t < 0) t += static_cast<std::int64_t>(kP);
  return static_cast<std::uint64_t>(t);
}

int msb_bit(std::uint64_t v) { return static_cast<int>((v >> 60) & 1); }

std::pair<std::uint64_t, std::uint64_t> divmod(std::uint64_t x, std::uint64_t y) {
  if (y == 0) throw std::domain_error("oracle: divmod by zero");
  return {x / y, x % y};
}

std::int64_t xgb_gain(std::int64_t g_left, std::int64_t h_left,
                      std::int64_t g_right, std::int64_t h_right,
                      std::int64_t lambda_raw, std::int64_t gamma_raw) {
  auto term = [&](std::int64_t g, std::int64_t h) -> __int128 {
    __int128 sq = static_cast<__int128>(g) * g;  // lifted by scale^2 already
    return sq / (static_cast<__int128>(h) + lambda_raw);
  };
  __int128 sum = term(g_left, h_left) + term(g_right, h_right) -
                 term(g_left + g_right, h_left + h_right);
  return static_cast<std::int64_t>(trunc_div(sum, 2) - gamma_raw);
}

SplitTable xgb_split_table(const std::vector<std::int64_t>& grads,
                           const std::vector<std::int64_t>& hess,
                           const std::vector<std::uint16_t>& bin_id,
                           const std::vector<std::uint32_t>& node_samples,
                           int features, int bins,
                           std::int64_t lambda_raw, std::int64_t gamma_raw) {
  SplitTable out;
  out.features = features;
  out.bins = bins;
  out.gain.assign(static_cast<std::size_t>(features) * bins, 0);
  bool have_best = false;
  for (int f = 0; f < features; ++f) {
    for (int b = 1; b <= bins; ++b) {
      std::int64_t gl = 0, hl = 0, gr = 0, hr = 0;
      for (std::uint32_t i : node_samples) {
        bool left = bin_id[static_cast<std::size_t>(i) * features + f] < b;
        if (left) {
          gl += grads[i];
          hl += hess[i];
        } else {
          gr += grads[i];
          hr += hess[i];
        }
      }
      std::int64_t g = xgb_gain(gl, hl, gr, hr, lambda_raw, gamma_raw);
      out.gain[static_cast<std::size_t>(f) * bins + (b - 1)] = g;
      if (!have_best || g > out.best_gain) {
        have_best = true;
        out.best_gain = g;
        out.best_feature = f;
        out.best_bin = b;
      }
    }
  }
  return out;
}

std::int64_t gini_gain(std::int64_t c0_left, std::int64_t c1_left,
                       std::int64_t c0_right, std::int64_t c1_right,
                       int frac_bits) {
  const std::int64_t scale = std::int64_t{1} << frac_bits;
  auto impurity = [&](std::int64_t c0, std::int64_t c1) -> std::int64_t {
    std::int64_t tot = c0 + c1;
    if (tot == 0) return 0;
    std::int64_t r0 = static_cast<std::int64_t>(
        static_cast<__int128>(c0) * scale / tot);
    std::int64_t r1 = static_cast<std::int64_t>(
        static_cast<__int128>(c1) * scale / tot);
    std::int64_t s0 = static_cast<std::int64_t>(
        static_cast<__int128>(r0) * r0 / scale);
    std::int64_t s1 = static_cast<std::int64_t>(
        static_cast<__int128>(r1) * r1 / scale);
    return scale - s0 - s1;
  };
  std::int64_t nl = c0_left + c1_left, nr = c0_right + c1_right;
  std::int64_t parent = impurity(c0_left + c0_right, c1_left + c1_right);
  std::int64_t total = nl + nr;
  std::int64_t wl = total == 0 ? 0
                               : static_cast<std::int64_t>(
                                     static_cast<__int128>(nl) * scale / total);
  std::int64_t wr = total == 0 ? 0
                               : static_cast<std::int64_t>(
                                     static_cast<__int128>(nr) * scale / total);
  std::int64_t left_term =
      nl == 0 ? 0
              : static_cast<std::int64_t>(
                    static_cast<__int128>(wl) * impurity(c0_left, c1_left) / scale);
  std::int64_t right_term =
      nr == 0 ? 0
              : static_cast<std::int64_t>(
                    static_cast<__int128>(wr) * impurity(c0_right, c1_right) / scale);
  return parent - left_term - right_term;
}

Recount recount(const std::vector<std::int64_t>& grads,
                const std::vector<std::int64_t>& hess,
                const std::vector<std::uint16_t>& bin_id,
                const std::vector<std::uint32_t>& leaf_of_sample,
                const std::vector<std::uint32_t>& samples,
                int features, int bins, int depth) {
  Recount out;
  const int leaves = 1 << depth;
  out.features = features;
  out.nodes = 2 * leaves;  // heap slots 1..2N-1
  out.bins = bins;
  std::size_t cells =
      static_cast<std::size_t>(features) * out.nodes * (bins + 1);
  out.g_sum.assign(cells, 0);
  out.h_sum.assign(cells, 0);

  auto is_ancestor_or_self = [](std::uint32_t node, std::uint32_t heap_leaf) {
    std::uint32_t v = heap_leaf;
    while (v >= node) {
      if (v == node) return true;
      v >>= 1;
    }
    return false;
  };

  for (int node = 1; node < out.nodes; ++node) {
    for (std::uint32_t i : samples) {
      std::uint32_t heap_leaf = leaf_of_sample[i] + leaves - 1;
      if (!is_ancestor_or_self(static_cast<std::uint32_t>(node), heap_leaf))
        continue;
      for (int f = 0; f < features; ++f) {
        int b = bin_id[static_cast<std::size_t>(i) * features + f];
        std::size_t idx =
            (static_cast<std::size_t>(f) * out.nodes + node) * (bins + 1) + b;
        out.g_sum[idx] += grads[i];
        out.h_sum[idx] += hess[i];
      }
    }
  }
  return out;
}

}  // namespace gbcert::oracle
