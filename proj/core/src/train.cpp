#include "gbcert/train.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace gbcert {

namespace {

// Appendix-style overflow guards: |G| must stay below both p/(2*scale)
// (leaf-weight numerator lift) and sqrt(p/2) (gain squaring).
std::int64_t grad_sum_bound(FxpConfig cfg) {
  const std::int64_t lift_bound =
      static_cast<std::int64_t>((((__int128{1} << 61) - 1) / 2) >> cfg.frac_bits);
  const std::int64_t square_bound = (std::int64_t{1} << 30) - 1;
  return std::min(lift_bound, square_bound);
}

void check_grad_bound(std::int64_t g, FxpConfig cfg) {
  std::int64_t bound = grad_sum_bound(cfg);
  if (g > bound || g < -bound)
    throw RangeExceeded("gradient sum exceeds field soundness bound");
}

}  // namespace

void Hyperparams::validate(FxpConfig cfg) const {
  if (!cfg.valid()) throw std::invalid_argument("frac_bits out of [4,28]");
  if (trees < 1) throw std::invalid_argument("trees must be >= 1");
  if (depth < 1 || depth > 12) throw std::invalid_argument("depth out of [1,12]");
  if (bins < 2 || bins > 256) throw std::invalid_argument("bins out of [2,256]");
  if (lambda.raw <= 0) throw std::invalid_argument("lambda must be positive");
  if (gamma.raw < 0) throw std::invalid_argument("gamma must be nonnegative");
  if (eta.raw <= 0 || eta.raw > cfg.scale())
    throw std::invalid_argument("eta must be in (0, 1]");
  if (p_min.raw < 1 || 2 * p_min.raw > cfg.scale())
    throw std::invalid_argument("p_min must be at least one raw unit");
}

Hyperparams default_hyperparams(FxpConfig cfg) {
  Hyperparams hp;
  hp.trees = 50;
  hp.depth = 4;
  hp.bins = 128;
  hp.eta = quantize_decimal("0.3", cfg);
  hp.lambda = quantize_decimal("1", cfg);
  hp.gamma = quantize_decimal("0", cfg);
  hp.p_min = quantize_decimal("0.000001", cfg);
  if (hp.p_min.raw < 1) hp.p_min.raw = 1;
  return hp;
}

BinTable prebin(const Dataset& ds, int bins) {
  if (ds.rows == 0) throw std::invalid_argument("prebin: empty dataset");
  BinTable out;
  out.bins = bins;
  out.cols = ds.cols;
  out.edges.assign(ds.cols * (bins + 1), 0);
  out.bin_id.assign(ds.rows * ds.cols, 0);

  const Fxp bins_fxp = Fxp{static_cast<std::int64_t>(bins) * ds.cfg.scale()};
  for (std::size_t f = 0; f < ds.cols; ++f) {
    std::int64_t lo = ds.at(0, f), hi = ds.at(0, f);
    for (std::size_t i = 1; i < ds.rows; ++i) {
      lo = std::min(lo, ds.at(i, f));
      hi = std::max(hi, ds.at(i, f));
    }
    Fxp delta = fxp_div(Fxp{hi - lo}, bins_fxp, ds.cfg);
    out.edges[f * (bins + 1)] = kDummyThreshold;
    for (int b = 1; b <= bins; ++b)
      out.edges[f * (bins + 1) + b] = lo + (b - 1) * delta.raw;

    for (std::size_t i = 0; i < ds.rows; ++i) {
      std::int64_t x = ds.at(i, f);
      int count = 0;
      for (int b = 1; b <= bins; ++b)
        if (out.edge(f, b) <= x) ++count;
      out.bin_id[i * ds.cols + f] = static_cast<std::uint16_t>(count);
    }
  }
  return out;
}

Fxp base_logit(const std::vector<std::uint8_t>& y, const Hyperparams& hp,
               FxpConfig cfg) {
  std::int64_t sum = 0;
  for (std::uint8_t v : y) sum += v;
  const std::int64_t n = static_cast<std::int64_t>(y.size());
  Fxp p = fxp_div(Fxp{sum * cfg.scale()}, Fxp{n * cfg.scale()}, cfg);
  Fxp clipped = clip(p, hp.p_min, hp.p_max(cfg));
  return logit_from_prob(clipped, cfg);
}

GradHess grad_hess(std::int64_t z_raw, FxpConfig cfg) {
  Fxp p = sigmoid_wide(Fxp{z_raw}, cfg);
  Fxp h = fxp_mul(p, Fxp{cfg.scale() - p.raw}, cfg);
  return GradHess{p.raw, h.raw};
}

std::int64_t split_gain(std::int64_t g_left, std::int64_t h_left,
                        std::int64_t g_right, std::int64_t h_right,
                        std::int64_t lambda_raw, std::int64_t gamma_raw,
                        FxpConfig cfg) {
  check_grad_bound(g_left, cfg);
  check_grad_bound(g_right, cfg);
  check_grad_bound(g_left + g_right, cfg);
  auto term = [&](std::int64_t g, std::int64_t h) {
    __int128 sq = static_cast<__int128>(g) * g;
    return static_cast<std::int64_t>(sq / (h + lambda_raw));
  };
  std::int64_t sum = term(g_left, h_left) + term(g_right, h_right) -
                     term(g_left + g_right, h_left + h_right);
  return sum / 2 - gamma_raw;
}

SplitChoice find_split(const std::vector<std::uint32_t>& node_samples,
                       const std::vector<std::int64_t>& grads,
                       const std::vector<std::int64_t>& hess,
                       const BinTable& bins, const Hyperparams& hp,
                       FxpConfig cfg) {
  const int B = bins.bins;
  const std::size_t d = bins.cols;

  SplitChoice best;
  bool have = false;
  std::vector<std::int64_t> gcell(B + 1), hcell(B + 1);
  for (std::size_t f = 0; f < d; ++f) {
    std::fill(gcell.begin(), gcell.end(), 0);
    std::fill(hcell.begin(), hcell.end(), 0);
    std::int64_t g_tot = 0, h_tot = 0;
    for (std::uint32_t i : node_samples) {
      int b = bins.bin(i, f);
      gcell[b] += grads[i];
      hcell[b] += hess[i];
      g_tot += grads[i];
      h_tot += hess[i];
    }
    std::int64_t gl = 0, hl = 0;
    for (int b = 1; b <= B; ++b) {
      // left side takes bins strictly below b
      gl += gcell[b - 1];
      hl += hcell[b - 1];
      std::int64_t gain = split_gain(gl, hl, g_tot - gl, h_tot - hl,
                                     hp.lambda.raw, hp.gamma.raw, cfg);
      if (!have || best.gain < gain) {
        have = true;
        best = SplitChoice{static_cast<int>(f), b, gain};
      }
    }
  }
  return best;
}

namespace {

struct Builder {
  const Dataset& ds;
  const Hyperparams& hp;
  const BinTable& bins;
  const std::vector<std::int64_t>& grads;
  const std::vector<std::int64_t>& hess;
  Tree& tree;
  std::vector<std::uint32_t>& leaf_of;  // per absolute sample id

  void build(int node, std::vector<std::uint32_t>& samples, int level) {
    const int leaves = tree.leaves();
    if (level == hp.depth) {
      std::int64_t g = 0, h = 0;
      for (std::uint32_t i : samples) {
        g += grads[i];
        h += hess[i];
      }
      check_bound(g);
      Fxp w = fxp_div(Fxp{g}, Fxp{h + hp.lambda.raw}, ds.cfg);
      w = clip(w, Fxp{-ds.cfg.scale()}, Fxp{ds.cfg.scale()});
      tree.leaf_weight[node - leaves] = w.raw;
      for (std::uint32_t i : samples) leaf_of[i] = node - leaves + 1;
      return;
    }

    SplitChoice choice = find_split(samples, grads, hess, bins, hp, ds.cfg);
    int feature;
    int bin;
    if (choice.gain <= 0) {  // prune: dummy split, every sample goes right
      feature = kDummyFeature;
      bin = 0;
    } else {
      feature = choice.feature;
      bin = choice.bin;
    }
    tree.split_feature[node - 1] = feature;
    tree.threshold[node - 1] = bins.edge(feature, bin);

    std::vector<std::uint32_t> left, right;
    for (std::uint32_t i : samples)
      (bins.bin(i, feature) < bin ? left : right).push_back(i);
    samples.clear();
    samples.shrink_to_fit();
    build(2 * node, left, level + 1);
    build(2 * node + 1, right, level + 1);
  }

  void check_bound(std::int64_t g) const { check_grad_bound(g, ds.cfg); }
};

}  // namespace

TrainResult train(const Dataset& ds, const Hyperparams& hp) {
  hp.validate(ds.cfg);
  if (!ds.shape_ok() || ds.rows == 0 || ds.cols == 0)
    throw std::invalid_argument("dataset shape invalid");
  for (std::size_t i = 0; i < ds.rows; ++i)
    if (ds.y[i] > 1)
      throw std::invalid_argument("label not binary at row " + std::to_string(i));

  TrainResult out;
  out.model.cfg = ds.cfg;
  out.model.hp = hp;
  out.model.base_score = base_logit(ds.y, hp, ds.cfg).raw;

  const std::size_t n = ds.rows;
  out.assignment.rows = n;
  out.assignment.trees = hp.trees;
  out.assignment.leaf.assign(static_cast<std::size_t>(hp.trees) * n, 0);
  out.assignment.score.assign(static_cast<std::size_t>(hp.trees + 1) * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    out.assignment.score[i] = out.model.base_score;

  BinTable bins = prebin(ds, hp.bins);
  const int leaves = 1 << hp.depth;

  std::vector<std::int64_t> grads(n), hess(n);
  for (int k = 1; k <= hp.trees; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      GradHess gh = grad_hess(out.assignment.score[(k - 1) * n + i], ds.cfg);
      grads[i] = gh.prob - static_cast<std::int64_t>(ds.y[i]) * ds.cfg.scale();
      hess[i] = gh.hess;
    }

    Tree tree;
    tree.depth = hp.depth;
    tree.split_feature.assign(leaves - 1, kDummyFeature);
    tree.threshold.assign(leaves - 1, kDummyThreshold);
    tree.leaf_weight.assign(leaves, 0);

    std::vector<std::uint32_t> leaf_of(n, 0);
    std::vector<std::uint32_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<std::uint32_t>(i);
    Builder{ds, hp, bins, grads, hess, tree, leaf_of}.build(1, all, 0);

    Fxp eta = hp.eta;
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t l = leaf_of[i];
      out.assignment.leaf[(k - 1) * n + i] = l;
      Fxp step = fxp_mul(eta, Fxp{tree.weight_at(static_cast<int>(l))}, ds.cfg);
      out.assignment.score[k * n + i] =
          out.assignment.score[(k - 1) * n + i] - step.raw;
    }
    out.model.trees.push_back(std::move(tree));
  }
  return out;
}

int evaluate_tree(const Tree& tree, const std::int64_t* row) {
  const int leaves = tree.leaves();
  int node = 1;
  while (node < leaves) {
    std::int32_t f = tree.feature_at(node);
    std::int64_t t = tree.threshold_at(node);
    int go_right = t <= row[f] ? 1 : 0;
    node = 2 * node + go_right;
  }
  return node - (leaves - 1);
}

std::int64_t predict_margin(const Model& model, const std::int64_t* row) {
  std::int64_t z = model.base_score;
  for (const Tree& tree : model.trees) {
    int leaf = evaluate_tree(tree, row);
    Fxp step = fxp_mul(model.hp.eta, Fxp{tree.weight_at(leaf)}, model.cfg);
    z -= step.raw;
  }
  return z;
}

double accuracy(const Model& model, const Dataset& ds) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ds.rows; ++i) {
    std::int64_t z = predict_margin(model, &ds.x[i * ds.cols]);
    int pred = z >= 0 ? 1 : 0;
    if (pred == ds.y[i]) ++hits;
  }
  return ds.rows ? static_cast<double>(hits) / static_cast<double>(ds.rows) : 0.0;
}

}  // namespace gbcert
