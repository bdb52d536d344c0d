#pragma once

#include <cstdint>
#include <utility>
#include <vector>

// Independent reference computations used to mint expected test values.
// Everything here replays the defining formulas with wide integers and is
// deliberately decoupled from the library implementations it checks: this
// header pulls in no other gbcert header and works on primitive spans.

namespace gbcert::oracle {

// ---- fixed point -----------------------------------------------------------

std::int64_t fxp_mul(std::int64_t x_raw, std::int64_t y_raw, int frac_bits);
std::int64_t fxp_div(std::int64_t x_raw, std::int64_t y_raw, int frac_bits);
std::int64_t sigmoid_wide(std::int64_t z_raw, int frac_bits);
std::int64_t logit_from_prob(std::int64_t p_raw, int frac_bits);
std::int64_t clip(std::int64_t x, std::int64_t lo, std::int64_t hi);

// ---- field -----------------------------------------------------------------

std::uint64_t f_mul_naive(std::uint64_t a, std::uint64_t b);  // 128-bit % p
std::uint64_t f_inv_egcd(std::uint64_t a);                    // extended Euclid
int msb_bit(std::uint64_t v);                                 // bit 60

// Floor divmod of nonnegative integers, the witness pair of the division
// gadget: x = q*y + r with 0 <= r < y.
std::pair<std::uint64_t, std::uint64_t> divmod(std::uint64_t x, std::uint64_t y);

// ---- split search ----------------------------------------------------------

// Gain of one candidate from raw gradient/Hessian sums, Hessians pre-lambda.
std::int64_t xgb_gain(std::int64_t g_left, std::int64_t h_left,
                      std::int64_t g_right, std::int64_t h_right,
                      std::int64_t lambda_raw, std::int64_t gamma_raw);

struct SplitTable {
  int features = 0;
  int bins = 0;
  std::vector<std::int64_t> gain;  // [f*bins + (b-1)], b in [1, bins]
  int best_feature = 0;            // 0-based, lexicographically first argmax
  int best_bin = 1;
  std::int64_t best_gain = 0;
};

// Exhaustive (f, b) scan over a node: grads/hess per sample, bin_id row-major
// n x d with bins in [1, B]. Candidates partition by bin_id < b.
SplitTable xgb_split_table(const std::vector<std::int64_t>& grads,
                           const std::vector<std::int64_t>& hess,
                           const std::vector<std::uint16_t>& bin_id,
                           const std::vector<std::uint32_t>& node_samples,
                           int features, int bins,
                           std::int64_t lambda_raw, std::int64_t gamma_raw);

// Gini gain for label-count splits (counts, not scaled values).
std::int64_t gini_gain(std::int64_t c0_left, std::int64_t c1_left,
                       std::int64_t c0_right, std::int64_t c1_right,
                       int frac_bits);

// ---- histogram recount -----------------------------------------------------

struct Recount {
  // [feature][node][bin] with node in [1, 2N-1] (slot 0 unused), bin in [1,B].
  std::vector<std::int64_t> g_sum;
  std::vector<std::int64_t> h_sum;
  int features = 0, nodes = 0, bins = 0;

  std::int64_t g(int f, int node, int b) const {
    return g_sum[(static_cast<std::size_t>(f) * nodes + node) * (bins + 1) + b];
  }
  std::int64_t h(int f, int node, int b) const {
    return h_sum[(static_cast<std::size_t>(f) * nodes + node) * (bins + 1) + b];
  }
};

// Filters samples per node by the ancestor predicate and recounts; leaves are
// heap nodes N..2N-1, a sample in leaf l belongs to every ancestor of l+N-1.
// Independent of the leaf-to-root propagation it cross-checks.
Recount recount(const std::vector<std::int64_t>& grads,
                const std::vector<std::int64_t>& hess,
                const std::vector<std::uint16_t>& bin_id,
                const std::vector<std::uint32_t>& leaf_of_sample,  // 1-based
                const std::vector<std::uint32_t>& samples,
                int features, int bins, int depth);

}  // namespace gbcert::oracle
