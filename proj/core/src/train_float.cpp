#include "gbcert/train_float.hpp"

#include <algorithm>
#include <limits>

namespace gbcert {

double sigmoid_wide_real(double z) {
  if (z <= -2.0) return 0.0;
  if (z >= 2.0) return 1.0;
  return (z + 2.0) / 4.0;
}

double logit_from_prob_real(double p) {
  double u = 2.0 * p - 1.0;
  return 2.0 * (u + u * u * u / 3.0 + u * u * u * u * u / 5.0);
}

namespace {

constexpr double kDummyThresholdReal = -std::numeric_limits<double>::max();

struct FloatBins {
  int bins = 0;
  std::size_t cols = 0;
  std::vector<double> edges;            // cols x (bins+1), slot 0 = dummy
  std::vector<std::uint16_t> bin_id;    // rows x cols

  double edge(std::size_t f, int b) const { return edges[f * (bins + 1) + b]; }
  std::uint16_t bin(std::size_t i, std::size_t f) const { return bin_id[i * cols + f]; }
};

FloatBins prebin_float(const std::vector<double>& x, std::size_t rows,
                       std::size_t cols, int bins) {
  FloatBins out;
  out.bins = bins;
  out.cols = cols;
  out.edges.assign(cols * (bins + 1), 0.0);
  out.bin_id.assign(rows * cols, 0);
  for (std::size_t f = 0; f < cols; ++f) {
    double lo = x[f], hi = x[f];
    for (std::size_t i = 1; i < rows; ++i) {
      lo = std::min(lo, x[i * cols + f]);
      hi = std::max(hi, x[i * cols + f]);
    }
    double delta = (hi - lo) / bins;
    out.edges[f * (bins + 1)] = kDummyThresholdReal;
    for (int b = 1; b <= bins; ++b)
      out.edges[f * (bins + 1) + b] = lo + (b - 1) * delta;
    for (std::size_t i = 0; i < rows; ++i) {
      int count = 0;
      for (int b = 1; b <= bins; ++b)
        if (out.edge(f, b) <= x[i * cols + f]) ++count;
      out.bin_id[i * cols + f] = static_cast<std::uint16_t>(count);
    }
  }
  return out;
}

struct Candidate {
  int feature = 0;
  int bin = 1;
  double gain = 0;
};

double gain_real(double gl, double hl, double gr, double hr, double lambda,
                 double gamma) {
  auto term = [&](double g, double h) { return g * g / (h + lambda); };
  return 0.5 * (term(gl, hl) + term(gr, hr) - term(gl + gr, hl + hr)) - gamma;
}

Candidate find_split_float(const std::vector<std::uint32_t>& samples,
                           const std::vector<double>& grads,
                           const std::vector<double>& hess,
                           const FloatBins& bins, double lambda, double gamma) {
  Candidate best;
  bool have = false;
  std::vector<double> gcell(bins.bins + 1), hcell(bins.bins + 1);
  for (std::size_t f = 0; f < bins.cols; ++f) {
    std::fill(gcell.begin(), gcell.end(), 0.0);
    std::fill(hcell.begin(), hcell.end(), 0.0);
    double gt = 0, ht = 0;
    for (std::uint32_t i : samples) {
      int b = bins.bin(i, f);
      gcell[b] += grads[i];
      hcell[b] += hess[i];
      gt += grads[i];
      ht += hess[i];
    }
    double gl = 0, hl = 0;
    for (int b = 1; b <= bins.bins; ++b) {
      gl += gcell[b - 1];
      hl += hcell[b - 1];
      double gain = gain_real(gl, hl, gt - gl, ht - hl, lambda, gamma);
      if (!have || best.gain < gain) {
        have = true;
        best = Candidate{static_cast<int>(f), b, gain};
      }
    }
  }
  return best;
}

struct FloatBuilder {
  const FloatBins& bins;
  const std::vector<double>& grads;
  const std::vector<double>& hess;
  double lambda, gamma;
  int depth;
  FloatTree& tree;
  std::vector<std::uint32_t>& leaf_of;

  void build(int node, std::vector<std::uint32_t>& samples, int level) {
    const int leaves = 1 << depth;
    if (level == depth) {
      double g = 0, h = 0;
      for (std::uint32_t i : samples) {
        g += grads[i];
        h += hess[i];
      }
      double w = std::clamp(g / (h + lambda), -1.0, 1.0);
      tree.leaf_weight[node - leaves] = w;
      for (std::uint32_t i : samples) leaf_of[i] = node - leaves + 1;
      return;
    }
    Candidate c = find_split_float(samples, grads, hess, bins, lambda, gamma);
    int feature = kDummyFeature, bin = 0;
    if (c.gain > 0) {
      feature = c.feature;
      bin = c.bin;
    }
    tree.split_feature[node - 1] = feature;
    tree.threshold[node - 1] = bins.edge(feature, bin);
    std::vector<std::uint32_t> left, right;
    for (std::uint32_t i : samples)
      (bins.bin(i, feature) < bin ? left : right).push_back(i);
    samples.clear();
    build(2 * node, left, level + 1);
    build(2 * node + 1, right, level + 1);
  }
};

}  // namespace

FloatModel train_float_reference(const std::vector<double>& x,
                                 const std::vector<std::uint8_t>& y,
                                 std::size_t rows, std::size_t cols,
                                 const Hyperparams& hp, FxpConfig cfg) {
  FloatModel out;
  out.hp = hp;
  const double scale = static_cast<double>(cfg.scale());
  out.eta = static_cast<double>(hp.eta.raw) / scale;
  out.lambda = static_cast<double>(hp.lambda.raw) / scale;
  out.gamma = static_cast<double>(hp.gamma.raw) / scale;
  out.p_min = static_cast<double>(hp.p_min.raw) / scale;

  double p = 0;
  for (std::uint8_t v : y) p += v;
  p /= static_cast<double>(rows);
  p = std::clamp(p, out.p_min, 1.0 - out.p_min);
  out.base_score = logit_from_prob_real(p);

  FloatBins bins = prebin_float(x, rows, cols, hp.bins);
  const int leaves = 1 << hp.depth;

  std::vector<double> z(rows, out.base_score);
  std::vector<double> grads(rows), hess(rows);
  for (int k = 1; k <= hp.trees; ++k) {
    for (std::size_t i = 0; i < rows; ++i) {
      double pi = sigmoid_wide_real(z[i]);
      grads[i] = pi - y[i];
      hess[i] = pi * (1.0 - pi);
    }
    FloatTree tree;
    tree.depth = hp.depth;
    tree.split_feature.assign(leaves - 1, kDummyFeature);
    tree.threshold.assign(leaves - 1, kDummyThresholdReal);
    tree.leaf_weight.assign(leaves, 0.0);
    std::vector<std::uint32_t> leaf_of(rows, 0);
    std::vector<std::uint32_t> all(rows);
    for (std::size_t i = 0; i < rows; ++i) all[i] = static_cast<std::uint32_t>(i);
    FloatBuilder{bins, grads, hess, out.lambda, out.gamma,
                 hp.depth, tree, leaf_of}
        .build(1, all, 0);
    for (std::size_t i = 0; i < rows; ++i)
      z[i] -= out.eta * tree.leaf_weight[leaf_of[i] - 1];
    out.trees.push_back(std::move(tree));
  }
  return out;
}

double predict_margin_float(const FloatModel& model, const double* row) {
  double z = model.base_score;
  for (const FloatTree& tree : model.trees) {
    int leaves = 1 << tree.depth;
    int node = 1;
    while (node < leaves) {
      int go_right = tree.threshold[node - 1] <= row[tree.split_feature[node - 1]];
      node = 2 * node + go_right;
    }
    z -= model.eta * tree.leaf_weight[node - leaves];
  }
  return z;
}

double accuracy_float(const FloatModel& model, const std::vector<double>& x,
                      const std::vector<std::uint8_t>& y, std::size_t rows,
                      std::size_t cols) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    double z = predict_margin_float(model, &x[i * cols]);
    int pred = z >= 0 ? 1 : 0;
    if (pred == y[i]) ++hits;
  }
  return rows ? static_cast<double>(hits) / static_cast<double>(rows) : 0.0;
}

}  // namespace gbcert
