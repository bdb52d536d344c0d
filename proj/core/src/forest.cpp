#include "gbcert/forest.hpp"

#include <algorithm>
#include <stdexcept>

#include "gbcert/commit.hpp"
#include "gbcert/rng.hpp"

namespace gbcert {

void ForestSpec::validate(std::size_t rows) const {
  if (trees < 1 || static_cast<int>(index_sets.size()) != trees)
    throw std::invalid_argument("forest spec: index set count != trees");
  if (depth < 1 || depth > 12) throw std::invalid_argument("depth out of [1,12]");
  if (bins < 2 || bins > 256) throw std::invalid_argument("bins out of [2,256]");
  for (const auto& set : index_sets) {
    if (set.empty()) throw std::invalid_argument("forest spec: empty index set");
    for (std::uint32_t i : set)
      if (i >= rows) throw std::invalid_argument("forest spec: index out of range");
  }
}

ForestSpec make_forest_spec(std::size_t rows, int trees, int depth, int bins,
                            std::uint64_t seed, int subsample_pct) {
  ForestSpec spec;
  spec.trees = trees;
  spec.depth = depth;
  spec.bins = bins;
  spec.seed = seed;
  Rng rng(seed);
  std::size_t take = std::max<std::size_t>(1, rows * subsample_pct / 100);
  for (int k = 0; k < trees; ++k) {
    std::vector<std::uint32_t> idx(rows);
    for (std::size_t i = 0; i < rows; ++i) idx[i] = static_cast<std::uint32_t>(i);
    for (std::size_t i = rows; i > 1; --i)
      std::swap(idx[i - 1], idx[rng.below(i)]);
    idx.resize(take);
    std::sort(idx.begin(), idx.end());
    spec.index_sets.push_back(std::move(idx));
  }
  return spec;
}

std::array<std::uint8_t, 32> index_set_digest(const std::vector<std::uint32_t>& set) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(set.size() * 4);
  for (std::uint32_t v : set)
    for (int s = 0; s < 32; s += 8)
      bytes.push_back(static_cast<std::uint8_t>(v >> s));
  return sha256(bytes.data(), bytes.size());
}

std::int64_t gini_gain(std::int64_t c0_left, std::int64_t c1_left,
                       std::int64_t c0_right, std::int64_t c1_right,
                       FxpConfig cfg) {
  const std::int64_t scale = cfg.scale();
  auto ratio = [&](std::int64_t num, std::int64_t den) {
    return fxp_div(Fxp{num}, Fxp{den}, cfg).raw;  // counts' scales cancel
  };
  auto impurity = [&](std::int64_t c0, std::int64_t c1) -> std::int64_t {
    std::int64_t tot = c0 + c1;
    if (tot == 0) return 0;
    std::int64_t r0 = ratio(c0, tot);
    std::int64_t r1 = ratio(c1, tot);
    std::int64_t s0 = fxp_mul(Fxp{r0}, Fxp{r0}, cfg).raw;
    std::int64_t s1 = fxp_mul(Fxp{r1}, Fxp{r1}, cfg).raw;
    return scale - s0 - s1;
  };
  const std::int64_t nl = c0_left + c1_left;
  const std::int64_t nr = c0_right + c1_right;
  const std::int64_t parent = impurity(c0_left + c0_right, c1_left + c1_right);
  std::int64_t left_term = 0, right_term = 0;
  if (nl > 0) {
    std::int64_t wl = ratio(nl, nl + nr);
    left_term = fxp_mul(Fxp{wl}, Fxp{impurity(c0_left, c1_left)}, cfg).raw;
  }
  if (nr > 0) {
    std::int64_t wr = ratio(nr, nl + nr);
    right_term = fxp_mul(Fxp{wr}, Fxp{impurity(c0_right, c1_right)}, cfg).raw;
  }
  return parent - left_term - right_term;
}

namespace {

struct GiniSplit {
  int feature = 0;
  int bin = 1;
  std::int64_t gain = 0;
};

GiniSplit find_split_gini(const std::vector<std::uint32_t>& samples,
                          const std::vector<std::uint8_t>& y,
                          const BinTable& bins, FxpConfig cfg) {
  GiniSplit best;
  bool have = false;
  const int B = bins.bins;
  std::vector<std::int64_t> cell0(B + 1), cell1(B + 1);
  for (std::size_t f = 0; f < bins.cols; ++f) {
    std::fill(cell0.begin(), cell0.end(), 0);
    std::fill(cell1.begin(), cell1.end(), 0);
    std::int64_t t0 = 0, t1 = 0;
    for (std::uint32_t i : samples) {
      int b = bins.bin(i, f);
      (y[i] ? cell1[b] : cell0[b]) += 1;
      (y[i] ? t1 : t0) += 1;
    }
    std::int64_t l0 = 0, l1 = 0;
    for (int b = 1; b <= B; ++b) {
      l0 += cell0[b - 1];
      l1 += cell1[b - 1];
      std::int64_t gain = gini_gain(l0, l1, t0 - l0, t1 - l1, cfg);
      if (!have || best.gain < gain) {
        have = true;
        best = GiniSplit{static_cast<int>(f), b, gain};
      }
    }
  }
  return best;
}

struct GiniBuilder {
  const Dataset& ds;
  const BinTable& bins;
  int depth;
  Tree& tree;

  void build(int node, std::vector<std::uint32_t>& samples, int level) {
    const int leaves = 1 << depth;
    if (level == depth) {
      std::int64_t c0 = 0, c1 = 0;
      for (std::uint32_t i : samples) (ds.y[i] ? c1 : c0) += 1;
      std::int64_t w = 0;
      if (c0 + c1 > 0) w = fxp_div(Fxp{c1}, Fxp{c0 + c1}, ds.cfg).raw;
      tree.leaf_weight[node - leaves] = w;
      return;
    }
    GiniSplit choice = find_split_gini(samples, ds.y, bins, ds.cfg);
    tree.split_feature[node - 1] = choice.feature;
    tree.threshold[node - 1] =
        bins.edge(static_cast<std::size_t>(choice.feature), choice.bin);
    std::vector<std::uint32_t> left, right;
    for (std::uint32_t i : samples)
      (bins.bin(i, static_cast<std::size_t>(choice.feature)) < choice.bin ? left
                                                                          : right)
          .push_back(i);
    samples.clear();
    build(2 * node, left, level + 1);
    build(2 * node + 1, right, level + 1);
  }
};

}  // namespace

ForestModel forest_train(const Dataset& ds, const ForestSpec& spec) {
  spec.validate(ds.rows);
  ForestModel out;
  out.cfg = ds.cfg;
  out.depth = spec.depth;
  out.bins = spec.bins;

  BinTable bins = prebin(ds, spec.bins);
  const int leaves = 1 << spec.depth;
  for (int k = 0; k < spec.trees; ++k) {
    Tree tree;
    tree.depth = spec.depth;
    tree.split_feature.assign(leaves - 1, 0);
    tree.threshold.assign(leaves - 1, 0);
    tree.leaf_weight.assign(leaves, 0);
    std::vector<std::uint32_t> samples = spec.index_sets[k];
    GiniBuilder{ds, bins, spec.depth, tree}.build(1, samples, 0);
    out.trees.push_back(std::move(tree));
    out.index_digests.push_back(index_set_digest(spec.index_sets[k]));
  }
  return out;
}

LabelHistograms init_hists_label(const std::vector<std::uint8_t>& y,
                                 const BinTable& bins,
                                 const std::vector<std::uint32_t>& samples,
                                 const std::vector<std::uint32_t>& leaf_of,
                                 int depth) {
  LabelHistograms out;
  const int leaves = 1 << depth;
  out.features = static_cast<int>(bins.cols);
  out.nodes = 2 * leaves;
  out.bins = bins.bins;
  out.c0.assign(static_cast<std::size_t>(out.features) * out.nodes * (out.bins + 1), 0);
  out.c1.assign(out.c0.size(), 0);

  for (std::size_t j = 0; j < samples.size(); ++j) {
    const std::uint32_t i = samples[j];
    const int node = static_cast<int>(leaf_of[j]) + leaves - 1;
    for (int f = 0; f < out.features; ++f) {
      int b = bins.bin(i, static_cast<std::size_t>(f));
      (y[i] ? out.c1 : out.c0)[out.idx(f, node, b)] += 1;
    }
  }
  for (int node = leaves - 1; node >= 1; --node)
    for (int f = 0; f < out.features; ++f)
      for (int b = 1; b <= out.bins; ++b) {
        out.c0[out.idx(f, node, b)] =
            out.count(f, 2 * node, b, 0) + out.count(f, 2 * node + 1, b, 0);
        out.c1[out.idx(f, node, b)] =
            out.count(f, 2 * node, b, 1) + out.count(f, 2 * node + 1, b, 1);
      }
  return out;
}

bool validate_leaf_weights_label(const LabelHistograms& hists, const Tree& tree,
                                 FxpConfig cfg, std::int64_t* bad_leaf) {
  const int leaves = tree.leaves();
  for (int l = 1; l <= leaves; ++l) {
    const int node = l + leaves - 1;
    std::int64_t c0 = 0, c1 = 0;
    for (int b = 1; b <= hists.bins; ++b) {
      c0 += hists.count(0, node, b, 0);
      c1 += hists.count(0, node, b, 1);
    }
    std::int64_t expect = 0;
    if (c0 + c1 > 0) expect = fxp_div(Fxp{c1}, Fxp{c0 + c1}, cfg).raw;
    if (tree.weight_at(l) != expect) {
      if (bad_leaf) *bad_leaf = l;
      return false;
    }
  }
  return true;
}

bool validate_splits_gini(const LabelHistograms& hists, const Tree& tree,
                          const BinTable& bins, FxpConfig cfg,
                          std::int64_t* bad_node) {
  const int leaves = tree.leaves();
  const int B = hists.bins;
  for (int node = 1; node <= leaves - 1; ++node) {
    std::vector<std::int64_t> gains(static_cast<std::size_t>(hists.features) * B);
    std::int64_t best = 0;
    bool have = false;
    for (int f = 0; f < hists.features; ++f) {
      std::int64_t t0 = 0, t1 = 0;
      for (int b = 1; b <= B; ++b) {
        t0 += hists.count(f, node, b, 0);
        t1 += hists.count(f, node, b, 1);
      }
      std::int64_t l0 = 0, l1 = 0;
      for (int b = 1; b <= B; ++b) {
        l0 += hists.count(f, node, b - 1, 0);
        l1 += hists.count(f, node, b - 1, 1);
        std::int64_t g = gini_gain(l0, l1, t0 - l0, t1 - l1, cfg);
        gains[static_cast<std::size_t>(f) * B + (b - 1)] = g;
        if (!have || g > best) {
          have = true;
          best = g;
        }
      }
    }
    // Recover b from the threshold value; colliding edges are all admissible.
    const int f_model = tree.feature_at(node);
    const std::int64_t t_model = tree.threshold_at(node);
    bool found = false;
    for (int b = 1; b <= B; ++b) {
      if (bins.edge(static_cast<std::size_t>(f_model), b) != t_model) continue;
      if (gains[static_cast<std::size_t>(f_model) * B + (b - 1)] >= best) {
        found = true;
        break;
      }
    }
    if (!found) {
      if (bad_node) *bad_node = node;
      return false;
    }
  }
  return true;
}

CertReport forest_certify(const Dataset& ds, const ForestModel& model,
                          const ForestSpec& spec) {
  CertReport report;
  spec.validate(ds.rows);
  if (static_cast<int>(model.trees.size()) != spec.trees) {
    report.failures.push_back({0, "model_shape", 0});
    return report;
  }
  for (int k = 0; k < spec.trees; ++k)
    if (model.index_digests.size() != model.trees.size() ||
        model.index_digests[k] != index_set_digest(spec.index_sets[k])) {
      report.failures.push_back({k + 1, "index_digest", 0});
      return report;
    }

  BinTable bins = prebin(ds, spec.bins);
  for (int k = 1; k <= spec.trees; ++k) {
    const Tree& tree = model.trees[k - 1];
    const auto& set = spec.index_sets[k - 1];
    std::vector<std::uint32_t> leaf_of(set.size());
    for (std::size_t j = 0; j < set.size(); ++j)
      leaf_of[j] = static_cast<std::uint32_t>(
          evaluate_tree(tree, &ds.x[set[j] * ds.cols]));

    // Inference bits on the subsampled rows only.
    Dataset view = subset(ds, set);
    std::int64_t where = 0;
    if (!validate_inference(view, tree, leaf_of.data(), &where))
      report.failures.push_back({k, "inference", where});

    LabelHistograms hists = init_hists_label(ds.y, bins, set, leaf_of, tree.depth);
    if (!validate_leaf_weights_label(hists, tree, ds.cfg, &where))
      report.failures.push_back({k, "leaf_weights", where});
    else {
      for (int l = 1; l <= tree.leaves(); ++l) {
        std::int64_t c = 0;
        for (int b = 1; b <= hists.bins; ++b)
          c += hists.count(0, l + tree.leaves() - 1, b, 0) +
               hists.count(0, l + tree.leaves() - 1, b, 1);
        if (c == 0)
          report.notes.push_back("tree " + std::to_string(k) + " leaf " +
                                 std::to_string(l) + " empty, weight fixed at 0");
      }
    }
    if (!validate_splits_gini(hists, tree, bins, ds.cfg, &where))
      report.failures.push_back({k, "splits_gini", where});
  }
  report.accepted = report.failures.empty();
  return report;
}

}  // namespace gbcert
