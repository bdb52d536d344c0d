#pragma once

#include <cstdint>
#include <vector>

#include "gbcert/dataset.hpp"
#include "gbcert/fxp.hpp"

namespace gbcert {

struct Hyperparams {
  int trees = 1;
  int depth = 1;
  int bins = 16;
  Fxp eta{0};     // learning rate, (0, 1]
  Fxp lambda{0};  // L2 regularizer, raw > 0
  Fxp gamma{0};   // split penalty, raw >= 0
  Fxp p_min{0};   // probability clip, raw >= 1

  Fxp p_max(FxpConfig cfg) const { return Fxp{cfg.scale() - p_min.raw}; }
  void validate(FxpConfig cfg) const;
};

Hyperparams default_hyperparams(FxpConfig cfg);

/// Equal-width bin boundaries. edges[f][0] holds the dummy sentinel used by
/// pruned nodes; slots 1..B hold the left edges. bin_id is in [1, B].
struct BinTable {
  int bins = 0;
  std::size_t cols = 0;
  std::vector<std::int64_t> edges;     // cols x (bins+1)
  std::vector<std::uint16_t> bin_id;   // rows x cols

  std::int64_t edge(std::size_t f, int b) const { return edges[f * (bins + 1) + b]; }
  std::uint16_t bin(std::size_t i, std::size_t f) const { return bin_id[i * cols + f]; }
};

// Pruned nodes carry the first feature and a threshold below every
// representable value, so evaluation sends every sample right.
inline constexpr int kDummyFeature = 0;
inline constexpr std::int64_t kDummyThreshold = -kRawRangeMax;

/// Full binary tree of height h in heap order: internal nodes 1..N-1 (children
/// 2l, 2l+1), leaves N..2N-1 mapped to leaf index l - (N-1) in [1, N].
struct Tree {
  int depth = 0;
  std::vector<std::int32_t> split_feature;  // N-1 entries, node l at [l-1]
  std::vector<std::int64_t> threshold;      // N-1 entries, raw Fxp
  std::vector<std::int64_t> leaf_weight;    // N entries, leaf l at [l-1]

  int leaves() const { return 1 << depth; }
  std::int32_t feature_at(int node) const { return split_feature[node - 1]; }
  std::int64_t threshold_at(int node) const { return threshold[node - 1]; }
  std::int64_t weight_at(int leaf) const { return leaf_weight[leaf - 1]; }
  bool is_dummy(int node) const {
    return split_feature[node - 1] == kDummyFeature &&
           threshold[node - 1] == kDummyThreshold;
  }
};

struct Model {
  FxpConfig cfg;
  Hyperparams hp;
  std::int64_t base_score = 0;  // z0, raw Fxp
  std::vector<Tree> trees;
};

/// Byproduct of training reused by the certifier: reached leaves per
/// (tree, sample) and the score matrix with row 0 = z0 replicated.
struct LeafAssignment {
  std::size_t rows = 0;
  int trees = 0;
  std::vector<std::uint32_t> leaf;   // trees x rows, 1-based leaf index
  std::vector<std::int64_t> score;   // (trees+1) x rows, raw Fxp

  std::uint32_t leaf_of(int k, std::size_t i) const { return leaf[(k - 1) * rows + i]; }
  std::int64_t score_of(int k, std::size_t i) const { return score[k * rows + i]; }
};

struct TrainResult {
  Model model;
  LeafAssignment assignment;
};

// ---- operations ------------------------------------------------------------

BinTable prebin(const Dataset& ds, int bins);

/// z0 from the clipped mean label through the truncated atanh series.
Fxp base_logit(const std::vector<std::uint8_t>& y, const Hyperparams& hp,
               FxpConfig cfg);

/// p = sigmoid(z); returns (p, h) with h = p*(1-p); g = p - y is applied by
/// the caller.
struct GradHess {
  std::int64_t prob;
  std::int64_t hess;
};
GradHess grad_hess(std::int64_t z_raw, FxpConfig cfg);

/// Candidate gain per the fixed-point gain rule. Hessian sums pre-lambda;
/// G^2 is fed to the division already carrying scale^2, no truncation.
/// Shared verbatim between the trainer and the certifier.
std::int64_t split_gain(std::int64_t g_left, std::int64_t h_left,
                        std::int64_t g_right, std::int64_t h_right,
                        std::int64_t lambda_raw, std::int64_t gamma_raw,
                        FxpConfig cfg);

struct SplitChoice {
  int feature = 0;  // 0-based
  int bin = 1;      // in [1, B]
  std::int64_t gain = 0;
};

/// Lexicographically-first argmax over all (feature, bin) candidates,
/// partitioning by bin_id < b. grads/hess are indexed by absolute sample id.
SplitChoice find_split(const std::vector<std::uint32_t>& node_samples,
                       const std::vector<std::int64_t>& grads,
                       const std::vector<std::int64_t>& hess,
                       const BinTable& bins, const Hyperparams& hp,
                       FxpConfig cfg);

TrainResult train(const Dataset& ds, const Hyperparams& hp);

/// Leaf reached by a sample under threshold routing (right iff t <= x).
int evaluate_tree(const Tree& tree, const std::int64_t* row);

/// Margin z = z0 - eta * sum_k w_k for one sample.
std::int64_t predict_margin(const Model& model, const std::int64_t* row);

/// Fraction of samples whose sign(margin) matches the label.
double accuracy(const Model& model, const Dataset& ds);

}  // namespace gbcert
