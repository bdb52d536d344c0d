#include <doctest.h>

#include "gbcert/dataset.hpp"
#include "gbcert/oracle.hpp"
#include "gbcert/rng.hpp"
#include "gbcert/train.hpp"
#include "gbcert/train_float.hpp"

using namespace gbcert;

namespace {

const FxpConfig f20{20};

Dataset tiny_dataset(std::vector<std::vector<double>> rows,
                     std::vector<std::uint8_t> labels, FxpConfig cfg = f20) {
  Dataset ds;
  ds.cfg = cfg;
  ds.rows = rows.size();
  ds.cols = rows[0].size();
  for (const auto& r : rows)
    for (double v : r) ds.x.push_back(quantize(v, cfg).raw);
  ds.y = std::move(labels);
  return ds;
}

Hyperparams small_hp(FxpConfig cfg, int trees = 1, int depth = 1, int bins = 4) {
  Hyperparams hp = default_hyperparams(cfg);
  hp.trees = trees;
  hp.depth = depth;
  hp.bins = bins;
  return hp;
}

Dataset random_dataset(Rng& rng, std::size_t n, std::size_t d, FxpConfig cfg = f20) {
  Dataset ds;
  ds.cfg = cfg;
  ds.rows = n;
  ds.cols = d;
  for (std::size_t i = 0; i < n * d; ++i)
    ds.x.push_back(rng.range(-50 * cfg.scale(), 50 * cfg.scale()));
  for (std::size_t i = 0; i < n; ++i)
    ds.y.push_back(static_cast<std::uint8_t>(rng.next() & 1));
  return ds;
}

}  // namespace

TEST_CASE("prebin equal-width edges and indicator bin ids") {
  FxpConfig f4{4};
  Dataset ds;
  ds.cfg = f4;
  ds.rows = 4;
  ds.cols = 1;
  ds.x = {0, 4 * 16, 8 * 16, 12 * 16};
  ds.y = {0, 1, 0, 1};
  BinTable bt = prebin(ds, 4);
  CHECK(bt.edge(0, 0) == kDummyThreshold);
  CHECK(bt.edge(0, 1) == 0);
  CHECK(bt.edge(0, 2) == 3 * 16);
  CHECK(bt.edge(0, 3) == 6 * 16);
  CHECK(bt.edge(0, 4) == 9 * 16);
  CHECK(bt.bin(0, 0) == 1);
  CHECK(bt.bin(1, 0) == 2);
  CHECK(bt.bin(2, 0) == 3);
  CHECK(bt.bin(3, 0) == 4);
}

TEST_CASE("prebin constant column puts every row in the top bin") {
  Dataset ds = tiny_dataset({{5.0}, {5.0}, {5.0}}, {0, 1, 0});
  BinTable bt = prebin(ds, 4);
  for (int b = 1; b <= 4; ++b) CHECK(bt.edge(0, b) == quantize(5.0, f20).raw);
  for (std::size_t i = 0; i < 3; ++i) CHECK(bt.bin(i, 0) == 4);
}

TEST_CASE("prebin single row lands in the top bin") {
  Dataset ds = tiny_dataset({{1.25, -3.0}}, {1});
  BinTable bt = prebin(ds, 8);
  CHECK(bt.bin(0, 0) == 8);
  CHECK(bt.bin(0, 1) == 8);
}

TEST_CASE("base_logit balanced, all-ones, and odd symmetry") {
  Hyperparams hp = small_hp(f20);
  CHECK(base_logit({0, 1}, hp, f20).raw == 0);
  std::vector<std::uint8_t> ones(8, 1), zeros(8, 0);
  std::int64_t z_ones = base_logit(ones, hp, f20).raw;
  // p clips to p_max; the oracle replays the same clipped series
  std::int64_t expect =
      oracle::logit_from_prob(f20.scale() - hp.p_min.raw, 20);
  CHECK(z_ones == expect);
  CHECK(base_logit(zeros, hp, f20).raw == -z_ones);
}

TEST_CASE("grad_hess at the center and the saturated tails") {
  GradHess center = grad_hess(0, f20);
  CHECK(center.prob == f20.scale() / 2);
  CHECK(center.prob - f20.scale() == -f20.scale() / 2);  // g with y=1
  CHECK(center.hess == f20.scale() / 4);
  GradHess hi = grad_hess(2 * f20.scale(), f20);
  CHECK(hi.prob - f20.scale() == 0);  // g with y=1
  CHECK(hi.hess == 0);
  GradHess lo = grad_hess(-2 * f20.scale(), f20);
  CHECK(lo.prob == 0);  // g with y=0
  CHECK(lo.hess == 0);
}

TEST_CASE("find_split: all-zero gradients tie everywhere, first candidate wins") {
  Rng rng(3);
  Dataset ds = random_dataset(rng, 12, 3);
  BinTable bt = prebin(ds, 4);
  Hyperparams hp = small_hp(f20);
  std::vector<std::uint32_t> samples;
  for (std::uint32_t i = 0; i < 12; ++i) samples.push_back(i);
  std::vector<std::int64_t> g(12, 0), h(12, 0);
  SplitChoice c = find_split(samples, g, h, bt, hp, f20);
  CHECK(c.feature == 0);
  CHECK(c.bin == 1);
  CHECK(c.gain == -hp.gamma.raw);
}

TEST_CASE("find_split matches the brute-force oracle on random nodes") {
  Rng rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 2 + rng.below(30);
    std::size_t d = 1 + rng.below(4);
    int B = 2 + static_cast<int>(rng.below(12));
    Dataset ds = random_dataset(rng, n, d);
    BinTable bt = prebin(ds, B);
    Hyperparams hp = small_hp(f20, 1, 1, B);
    std::vector<std::uint32_t> samples;
    for (std::uint32_t i = 0; i < n; ++i)
      if (rng.next() & 1) samples.push_back(i);
    if (samples.empty()) samples.push_back(0);
    std::vector<std::int64_t> g(n), h(n);
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = rng.range(-f20.scale(), f20.scale());
      h[i] = rng.range(0, f20.scale() / 4);
    }
    SplitChoice mine = find_split(samples, g, h, bt, hp, f20);
    oracle::SplitTable ref = oracle::xgb_split_table(
        g, h, bt.bin_id, samples, static_cast<int>(d), B, hp.lambda.raw,
        hp.gamma.raw);
    CHECK(mine.feature == ref.best_feature);
    CHECK(mine.bin == ref.best_bin);
    CHECK(mine.gain == ref.best_gain);
  }
}

TEST_CASE("find_split tie-break is lexicographic under forced ties") {
  // duplicate column: candidates (0,b) and (1,b) tie for every b
  Rng rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 4 + rng.below(20);
    Dataset ds;
    ds.cfg = f20;
    ds.rows = n;
    ds.cols = 2;
    for (std::size_t i = 0; i < n; ++i) {
      std::int64_t v = rng.range(-10 * f20.scale(), 10 * f20.scale());
      ds.x.push_back(v);
      ds.x.push_back(v);
      ds.y.push_back(static_cast<std::uint8_t>(rng.next() & 1));
    }
    BinTable bt = prebin(ds, 8);
    Hyperparams hp = small_hp(f20, 1, 1, 8);
    std::vector<std::uint32_t> samples;
    for (std::uint32_t i = 0; i < n; ++i) samples.push_back(i);
    std::vector<std::int64_t> g(n), h(n);
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = rng.range(-f20.scale(), f20.scale());
      h[i] = rng.range(0, f20.scale() / 4);
    }
    SplitChoice c = find_split(samples, g, h, bt, hp, f20);
    CHECK(c.feature == 0);  // never the duplicate
  }
}

TEST_CASE("single-sample node prunes: every candidate gain is -gamma") {
  Dataset ds = tiny_dataset({{1.0, 2.0}}, {1});
  BinTable bt = prebin(ds, 4);
  Hyperparams hp = small_hp(f20);
  hp.gamma = quantize(0.5, f20);
  std::vector<std::int64_t> g{f20.scale() / 3}, h{f20.scale() / 5};
  SplitChoice c = find_split({0}, g, h, bt, hp, f20);
  CHECK(c.gain == -hp.gamma.raw);
}

TEST_CASE("train on two separable samples splits at the root") {
  Dataset ds = tiny_dataset({{-4.0}, {4.0}}, {0, 1});
  Hyperparams hp = small_hp(f20, 1, 1, 4);
  TrainResult r = train(ds, hp);
  const Tree& t = r.model.trees[0];
  CHECK_FALSE(t.is_dummy(1));
  // negative-class leaf gets positive weight (g = p - y > 0), other negative
  std::int64_t w_left = t.weight_at(evaluate_tree(t, &ds.x[0]));
  std::int64_t w_right = t.weight_at(evaluate_tree(t, &ds.x[1]));
  CHECK(w_left > 0);
  CHECK(w_right < 0);
  CHECK(r.assignment.leaf_of(1, 0) != r.assignment.leaf_of(1, 1));
}

TEST_CASE("constant labels produce all-dummy trees and one shared leaf") {
  Rng rng(47);
  Dataset ds = random_dataset(rng, 20, 3);
  for (auto& v : ds.y) v = 1;
  Hyperparams hp = small_hp(f20, 2, 2, 8);
  TrainResult r = train(ds, hp);
  for (const Tree& t : r.model.trees)
    for (int node = 1; node <= t.leaves() - 1; ++node) CHECK(t.is_dummy(node));
  for (std::size_t i = 0; i < ds.rows; ++i)
    CHECK(r.assignment.leaf_of(1, i) == r.assignment.leaf_of(1, 0));
}

TEST_CASE("training is deterministic") {
  Rng rng(53);
  Dataset ds = random_dataset(rng, 40, 4);
  Hyperparams hp = small_hp(f20, 3, 2, 8);
  TrainResult a = train(ds, hp);
  TrainResult b = train(ds, hp);
  CHECK(a.model.base_score == b.model.base_score);
  REQUIRE(a.model.trees.size() == b.model.trees.size());
  for (std::size_t k = 0; k < a.model.trees.size(); ++k) {
    CHECK(a.model.trees[k].split_feature == b.model.trees[k].split_feature);
    CHECK(a.model.trees[k].threshold == b.model.trees[k].threshold);
    CHECK(a.model.trees[k].leaf_weight == b.model.trees[k].leaf_weight);
  }
  CHECK(a.assignment.score == b.assignment.score);
}

TEST_CASE("score recurrence holds exactly") {
  Rng rng(59);
  Dataset ds = random_dataset(rng, 30, 3);
  Hyperparams hp = small_hp(f20, 3, 2, 8);
  TrainResult r = train(ds, hp);
  for (int k = 1; k <= hp.trees; ++k)
    for (std::size_t i = 0; i < ds.rows; ++i) {
      std::int64_t w =
          r.model.trees[k - 1].weight_at(static_cast<int>(r.assignment.leaf_of(k, i)));
      Fxp step = fxp_mul(hp.eta, Fxp{w}, f20);
      CHECK(r.assignment.score_of(k, i) ==
            r.assignment.score_of(k - 1, i) - step.raw);
    }
}

TEST_CASE("dummy subtrees carry zero weights") {
  Dataset ds = tiny_dataset({{1.0}, {1.0}, {1.0}}, {1, 1, 1});
  Hyperparams hp = small_hp(f20, 1, 2, 4);
  TrainResult r = train(ds, hp);
  const Tree& t = r.model.trees[0];
  // all samples go right through dummies; all other leaves are empty -> 0
  for (int l = 1; l < t.leaves(); ++l) CHECK(t.weight_at(l) == 0);
}

TEST_CASE("float reference picks identical splits on well-separated data") {
  FxpConfig f28{28};
  LoadedCsv csv = make_synthetic(50, 3, 99, 3.0, f28);
  Hyperparams hp = small_hp(f28, 2, 2, 8);
  TrainResult fixed = train(csv.ds, hp);
  FloatModel fm = train_float_reference(csv.x_real, csv.ds.y, 50, 3, hp, f28);
  for (int k = 0; k < 2; ++k) {
    CHECK(fixed.model.trees[k].split_feature == fm.trees[k].split_feature);
  }
}

TEST_CASE("hyperparameter validation") {
  Hyperparams hp = small_hp(f20);
  hp.lambda = Fxp{0};
  CHECK_THROWS_AS(hp.validate(f20), std::invalid_argument);
  hp = small_hp(f20);
  hp.eta = Fxp{f20.scale() + 1};
  CHECK_THROWS_AS(hp.validate(f20), std::invalid_argument);
  hp = small_hp(f20);
  hp.p_min = Fxp{0};
  CHECK_THROWS_AS(hp.validate(f20), std::invalid_argument);
}

TEST_CASE("gradient bound violations are hard errors") {
  // direct kernel probe far beyond sqrt(p/2)
  CHECK_THROWS_AS(split_gain(1LL << 31, 0, 0, 0, 1, 0, f20), RangeExceeded);
}
