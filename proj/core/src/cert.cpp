#include "gbcert/cert.hpp"

#include <algorithm>
#include <mutex>
#include <thread>

namespace gbcert {

bool validate_labels(const std::vector<std::uint8_t>& y, std::int64_t* bad_index) {
  for (std::size_t i = 0; i < y.size(); ++i) {
    std::int64_t v = y[i];
    if (v * (1 - v) != 0) {
      if (bad_index) *bad_index = static_cast<std::int64_t>(i);
      return false;
    }
  }
  return true;
}

bool validate_logit(const std::vector<std::uint8_t>& y, std::int64_t z0_raw,
                    const Hyperparams& hp, FxpConfig cfg) {
  return base_logit(y, hp, cfg).raw == z0_raw;
}

bool validate_inference(const Dataset& ds, const Tree& tree,
                        const std::uint32_t* leaf_of, std::int64_t* bad_sample) {
  const int h = tree.depth;
  const int leaves = tree.leaves();
  for (std::size_t i = 0; i < ds.rows; ++i) {
    const std::uint32_t leaf = leaf_of[i];
    if (leaf < 1 || leaf > static_cast<std::uint32_t>(leaves)) {
      if (bad_sample) *bad_sample = static_cast<std::int64_t>(i);
      return false;
    }
    const int heap_leaf = static_cast<int>(leaf) + leaves - 1;
    std::int64_t recombined = leaves;  // 2^h
    for (int j = 1; j <= h; ++j) {
      int node = heap_leaf >> (h + 1 - j);  // ancestor at level j
      std::int64_t t = tree.threshold_at(node);
      std::int64_t x = ds.at(i, static_cast<std::size_t>(tree.feature_at(node)));
      int a = t <= x ? 1 : 0;
      recombined += static_cast<std::int64_t>(a) << (h - j);
    }
    if (recombined != heap_leaf) {
      if (bad_sample) *bad_sample = static_cast<std::int64_t>(i);
      return false;
    }
  }
  return true;
}

NodeHistograms init_hists(const std::vector<std::int64_t>& z_prev,
                          const std::vector<std::uint8_t>& y,
                          const BinTable& bins, const std::uint32_t* leaf_of,
                          FxpConfig cfg, int depth) {
  NodeHistograms out;
  const int leaves = 1 << depth;
  out.features = static_cast<int>(bins.cols);
  out.nodes = 2 * leaves;
  out.bins = bins.bins;
  out.g.assign(static_cast<std::size_t>(out.features) * out.nodes * (out.bins + 1), 0);
  out.h.assign(out.g.size(), 0);

  for (std::size_t i = 0; i < z_prev.size(); ++i) {
    GradHess gh = grad_hess(z_prev[i], cfg);
    std::int64_t g = gh.prob - static_cast<std::int64_t>(y[i]) * cfg.scale();
    int node = static_cast<int>(leaf_of[i]) + leaves - 1;
    for (int f = 0; f < out.features; ++f) {
      int b = bins.bin(i, static_cast<std::size_t>(f));
      out.g[out.idx(f, node, b)] += g;
      out.h[out.idx(f, node, b)] += gh.hess;
    }
  }
  for (int node = leaves - 1; node >= 1; --node)
    for (int f = 0; f < out.features; ++f)
      for (int b = 1; b <= out.bins; ++b) {
        out.g[out.idx(f, node, b)] =
            out.gsum(f, 2 * node, b) + out.gsum(f, 2 * node + 1, b);
        out.h[out.idx(f, node, b)] =
            out.hsum(f, 2 * node, b) + out.hsum(f, 2 * node + 1, b);
      }
  return out;
}

bool validate_leaf_weights(const NodeHistograms& hists, const Tree& tree,
                           const Hyperparams& hp, FxpConfig cfg,
                           std::int64_t* bad_leaf) {
  const int leaves = tree.leaves();
  for (int l = 1; l <= leaves; ++l) {
    const int node = l + leaves - 1;
    std::int64_t g = 0, h = 0;
    for (int b = 1; b <= hists.bins; ++b) {
      g += hists.gsum(0, node, b);
      h += hists.hsum(0, node, b);
    }
    Fxp w = fxp_div(Fxp{g}, Fxp{h + hp.lambda.raw}, cfg);
    w = clip(w, Fxp{-cfg.scale()}, Fxp{cfg.scale()});
    if (w.raw != tree.weight_at(l)) {
      if (bad_leaf) *bad_leaf = l;
      return false;
    }
  }
  return true;
}

bool validate_splits(const NodeHistograms& hists, const Tree& tree,
                     const BinTable& bins, const Hyperparams& hp, FxpConfig cfg,
                     std::int64_t* bad_node) {
  const int leaves = tree.leaves();
  const int B = hists.bins;
  const int d = hists.features;
  std::vector<int> terminal(2 * leaves, 0);  // e_l, parent of root = 0

  for (int node = 1; node <= leaves - 1; ++node) {
    // Recompute every candidate gain from the histograms.
    std::int64_t best_gain = 0;
    int best_f = 0, best_b = 1;
    bool have = false;
    std::vector<std::int64_t> gains(static_cast<std::size_t>(d) * B);
    for (int f = 0; f < d; ++f) {
      std::int64_t g_tot = 0, h_tot = 0;
      for (int b = 1; b <= B; ++b) {
        g_tot += hists.gsum(f, node, b);
        h_tot += hists.hsum(f, node, b);
      }
      std::int64_t gl = 0, hl = 0;
      for (int b = 1; b <= B; ++b) {
        gl += hists.gsum(f, node, b - 1);
        hl += hists.hsum(f, node, b - 1);
        std::int64_t gain = split_gain(gl, hl, g_tot - gl, h_tot - hl,
                                       hp.lambda.raw, hp.gamma.raw, cfg);
        gains[static_cast<std::size_t>(f) * B + (b - 1)] = gain;
        if (!have || best_gain < gain) {
          have = true;
          best_gain = gain;
          best_f = f;
          best_b = b;
        }
      }
    }

    // Tie-breaker: the recomputed argmax must dominate every candidate, with
    // ties resolved by lexicographic (f, b) order exactly as the trainer does.
    for (int f = 0; f < d; ++f)
      for (int b = 1; b <= B; ++b) {
        std::int64_t gain = gains[static_cast<std::size_t>(f) * B + (b - 1)];
        bool ok = best_gain > gain ||
                  (best_gain == gain &&
                   (best_f < f || (best_f == f && best_b <= b)));
        if (!ok) {
          if (bad_node) *bad_node = node;
          return false;
        }
      }

    const int parent = node / 2;
    const bool e = best_gain <= 0 || (parent >= 1 && terminal[parent]);
    terminal[node] = e ? 1 : 0;
    if (e) {
      if (!(tree.feature_at(node) == kDummyFeature &&
            tree.threshold_at(node) == kDummyThreshold)) {
        if (bad_node) *bad_node = node;
        return false;
      }
    } else {
      std::int64_t expect_t = bins.edge(static_cast<std::size_t>(best_f), best_b);
      if (tree.feature_at(node) != best_f || tree.threshold_at(node) != expect_t) {
        if (bad_node) *bad_node = node;
        return false;
      }
    }
  }
  return true;
}

LeafAssignment derive_assignment(const Dataset& ds, const Model& model) {
  LeafAssignment out;
  const std::size_t n = ds.rows;
  const int m = static_cast<int>(model.trees.size());
  out.rows = n;
  out.trees = m;
  out.leaf.assign(static_cast<std::size_t>(m) * n, 0);
  out.score.assign(static_cast<std::size_t>(m + 1) * n, 0);
  for (std::size_t i = 0; i < n; ++i) out.score[i] = model.base_score;
  for (int k = 1; k <= m; ++k) {
    const Tree& tree = model.trees[k - 1];
    for (std::size_t i = 0; i < n; ++i) {
      int leaf = evaluate_tree(tree, &ds.x[i * ds.cols]);
      out.leaf[(k - 1) * n + i] = static_cast<std::uint32_t>(leaf);
      Fxp step = fxp_mul(model.hp.eta, Fxp{tree.weight_at(leaf)}, model.cfg);
      out.score[k * n + i] = out.score[(k - 1) * n + i] - step.raw;
    }
  }
  return out;
}

CertReport certify(const Dataset& ds, const Model& model,
                   const LeafAssignment* assignment, int threads) {
  CertReport report;
  const std::size_t n = ds.rows;
  const int m = static_cast<int>(model.trees.size());

  std::int64_t bad = 0;
  if (!validate_labels(ds.y, &bad)) {
    report.failures.push_back({0, "labels", bad});
    return report;
  }
  if (static_cast<int>(model.trees.size()) != model.hp.trees)
    report.failures.push_back({0, "model_shape", 0});
  for (const Tree& t : model.trees)
    if (t.depth != model.hp.depth ||
        t.split_feature.size() + 1 != static_cast<std::size_t>(t.leaves()) ||
        t.leaf_weight.size() != static_cast<std::size_t>(t.leaves()))
      report.failures.push_back({0, "model_shape", 0});
  if (!report.failures.empty()) return report;

  BinTable bins = prebin(ds, model.hp.bins);

  if (!validate_logit(ds.y, model.base_score, model.hp, model.cfg))
    report.failures.push_back({0, "base_logit", 0});

  // Score recurrence: recompute the full trace, then check any supplied one.
  LeafAssignment derived = derive_assignment(ds, model);
  if (assignment) {
    bool same = assignment->rows == derived.rows &&
                assignment->trees == derived.trees &&
                assignment->leaf == derived.leaf &&
                assignment->score == derived.score;
    if (!same) report.failures.push_back({0, "leaf_assignment", 0});
  }

  std::vector<std::vector<CertFailure>> per_tree(static_cast<std::size_t>(m));
  auto check_tree = [&](int k) {
    const Tree& tree = model.trees[k - 1];
    auto& fails = per_tree[k - 1];
    const std::uint32_t* leaf_of = &derived.leaf[(k - 1) * n];
    std::int64_t where = 0;
    if (!validate_inference(ds, tree, leaf_of, &where))
      fails.push_back({k, "inference", where});
    std::vector<std::int64_t> z_prev(derived.score.begin() + (k - 1) * n,
                                     derived.score.begin() + k * n);
    try {
      NodeHistograms hists =
          init_hists(z_prev, ds.y, bins, leaf_of, model.cfg, tree.depth);
      if (!validate_leaf_weights(hists, tree, model.hp, model.cfg, &where))
        fails.push_back({k, "leaf_weights", where});
      if (!validate_splits(hists, tree, bins, model.hp, model.cfg, &where))
        fails.push_back({k, "splits", where});
    } catch (const RangeExceeded&) {
      fails.push_back({k, "range_bounds", 0});
    }
  };

  if (threads <= 1 || m <= 1) {
    for (int k = 1; k <= m; ++k) check_tree(k);
  } else {
    std::vector<std::thread> pool;
    std::mutex next_mu;
    int next = 1;
    int workers = std::min(threads, m);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&]() {
        for (;;) {
          int k;
          {
            std::lock_guard<std::mutex> lock(next_mu);
            if (next > m) return;
            k = next++;
          }
          check_tree(k);
        }
      });
    for (auto& th : pool) th.join();
  }
  // Deterministic merge by tree index regardless of scheduling.
  for (auto& fails : per_tree)
    report.failures.insert(report.failures.end(), fails.begin(), fails.end());

  report.accepted = report.failures.empty();
  return report;
}

}  // namespace gbcert
