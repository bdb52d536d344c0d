#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gbcert/train.hpp"

namespace gbcert {

/// Per-(feature, node, bin) gradient and Hessian sums, built at the leaves
/// and propagated to the root. Nodes are heap-indexed 1..2N-1.
struct NodeHistograms {
  int features = 0;
  int nodes = 0;  // 2N; slot 0 unused
  int bins = 0;   // B; bin slot 0 unused
  std::vector<std::int64_t> g;
  std::vector<std::int64_t> h;

  std::size_t idx(int f, int node, int b) const {
    return (static_cast<std::size_t>(f) * nodes + node) * (bins + 1) + b;
  }
  std::int64_t gsum(int f, int node, int b) const { return g[idx(f, node, b)]; }
  std::int64_t hsum(int f, int node, int b) const { return h[idx(f, node, b)]; }
};

struct CertFailure {
  int tree = 0;        // 1-based; 0 for dataset-level checks
  std::string check;   // "labels", "base_logit", "inference", ...
  std::int64_t index = 0;  // sample, node, or leaf index
};

struct CertReport {
  bool accepted = false;
  std::vector<CertFailure> failures;
  std::vector<std::string> notes;
};

// ---- subroutines (exposed for unit tests and the constraint compiler) ------

/// All labels binary; on failure reports the first offending index.
bool validate_labels(const std::vector<std::uint8_t>& y, std::int64_t* bad_index);

/// Recomputes z0 through the base-logit pipeline and requires exact equality.
bool validate_logit(const std::vector<std::uint8_t>& y, std::int64_t z0_raw,
                    const Hyperparams& hp, FxpConfig cfg);

/// Branch bits along the precomputed root-to-leaf path must recompose the
/// claimed leaf index: l + 2^h - 1 = 2^h + sum a_j 2^(h-j).
bool validate_inference(const Dataset& ds, const Tree& tree,
                        const std::uint32_t* leaf_of, std::int64_t* bad_sample);

/// Leaf accumulation of (g, h) followed by bottom-up child sums.
NodeHistograms init_hists(const std::vector<std::int64_t>& z_prev,
                          const std::vector<std::uint8_t>& y,
                          const BinTable& bins, const std::uint32_t* leaf_of,
                          FxpConfig cfg, int depth);

/// Per leaf: w = clip(G/(H + lambda), -1, 1) exactly, sums taken from the
/// first feature's row (bin sums are feature-independent).
bool validate_leaf_weights(const NodeHistograms& hists, const Tree& tree,
                           const Hyperparams& hp, FxpConfig cfg,
                           std::int64_t* bad_leaf);

/// Recomputes the lexicographically-first argmax per internal node, carries
/// the terminal flag down, and checks the model's split or dummy values.
bool validate_splits(const NodeHistograms& hists, const Tree& tree,
                     const BinTable& bins, const Hyperparams& hp, FxpConfig cfg,
                     std::int64_t* bad_node);

/// Full certification: accepts iff the model is exactly what train() returns
/// on ds. A supplied leaf assignment is checked against the recomputation;
/// pass nullptr to derive it from the model.
CertReport certify(const Dataset& ds, const Model& model,
                   const LeafAssignment* assignment = nullptr, int threads = 1);

/// The recomputed witness trace for a model (tree evaluation is public).
LeafAssignment derive_assignment(const Dataset& ds, const Model& model);

}  // namespace gbcert
