#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "gbcert/cert.hpp"
#include "gbcert/train.hpp"

namespace gbcert {

/// Random-forest training over subsampled index sets and its certifier.
/// Splits maximize a fixed-point Gini gain; leaves carry the class-1 fraction.
/// Forest trees have no pruning path: every internal node keeps its argmax.

struct ForestSpec {
  int trees = 1;
  int depth = 1;
  int bins = 16;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::uint32_t>> index_sets;  // I_k, each nonempty

  void validate(std::size_t rows) const;
};

/// Seeded subsets without replacement, |I_k| = max(1, rows*subsample_pct/100).
ForestSpec make_forest_spec(std::size_t rows, int trees, int depth, int bins,
                            std::uint64_t seed, int subsample_pct = 70);

struct ForestModel {
  FxpConfig cfg;
  int depth = 0;
  int bins = 0;
  std::vector<Tree> trees;
  std::vector<std::array<std::uint8_t, 32>> index_digests;  // one per I_k
};

/// Per-(feature, node, bin, class) sample counts, leaf-to-root.
struct LabelHistograms {
  int features = 0;
  int nodes = 0;
  int bins = 0;
  std::vector<std::int64_t> c0, c1;

  std::size_t idx(int f, int node, int b) const {
    return (static_cast<std::size_t>(f) * nodes + node) * (bins + 1) + b;
  }
  std::int64_t count(int f, int node, int b, int cls) const {
    return cls ? c1[idx(f, node, b)] : c0[idx(f, node, b)];
  }
};

std::array<std::uint8_t, 32> index_set_digest(const std::vector<std::uint32_t>& set);

/// Weighted-impurity Gini gain in fixed point; empty sides contribute zero.
std::int64_t gini_gain(std::int64_t c0_left, std::int64_t c1_left,
                       std::int64_t c0_right, std::int64_t c1_right,
                       FxpConfig cfg);

ForestModel forest_train(const Dataset& ds, const ForestSpec& spec);

LabelHistograms init_hists_label(const std::vector<std::uint8_t>& y,
                                 const BinTable& bins,
                                 const std::vector<std::uint32_t>& samples,
                                 const std::vector<std::uint32_t>& leaf_of,
                                 int depth);

/// w = H1/(H0+H1) per leaf; empty leaves must carry 0 (noted in the report).
bool validate_leaf_weights_label(const LabelHistograms& hists, const Tree& tree,
                                 FxpConfig cfg, std::int64_t* bad_leaf);

/// Non-strict argmax check: any maximizer is accepted, no tie-breaking.
bool validate_splits_gini(const LabelHistograms& hists, const Tree& tree,
                          const BinTable& bins, FxpConfig cfg,
                          std::int64_t* bad_node);

CertReport forest_certify(const Dataset& ds, const ForestModel& model,
                          const ForestSpec& spec);

}  // namespace gbcert
