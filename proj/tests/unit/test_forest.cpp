#include <doctest.h>

#include "gbcert/forest.hpp"
#include "gbcert/oracle.hpp"
#include "instance_helpers.hpp"

using namespace gbcert;
using gbcert::testing::Instance;
using gbcert::testing::random_instance;

namespace {

const FxpConfig f20{20};

ForestSpec spec_for(const Dataset& ds, Rng& rng, int trees = 2, int depth = 2,
                    int bins = 8) {
  return make_forest_spec(ds.rows, trees, depth, bins, rng.next());
}

}  // namespace

TEST_CASE("gini gain: pure node scores zero everywhere") {
  // parent impurity 0 and pure children make every candidate gain 0
  CHECK(gini_gain(3, 0, 2, 0, f20) == 0);
  CHECK(gini_gain(0, 0, 5, 0, f20) == 0);
}

TEST_CASE("gini gain: perfect 2-sample separation equals parent impurity S/2") {
  CHECK(gini_gain(1, 0, 0, 1, f20) == f20.scale() / 2);
}

TEST_CASE("gini gain matches the oracle on random counts") {
  Rng rng(3);
  for (int i = 0; i < 20000; ++i) {
    std::int64_t a = rng.below(50), b = rng.below(50);
    std::int64_t c = rng.below(50), d = rng.below(50);
    CHECK(gini_gain(a, b, c, d, f20) == oracle::gini_gain(a, b, c, d, 20));
  }
}

TEST_CASE("label histograms: counts, conservation, recount") {
  Rng rng(7);
  Instance inst = random_instance(rng, {25, 3, 1, 2, 8});
  ForestSpec spec = spec_for(inst.ds, rng);
  ForestModel model = forest_train(inst.ds, spec);
  BinTable bins = prebin(inst.ds, spec.bins);

  const auto& set = spec.index_sets[0];
  std::vector<std::uint32_t> leaf_of(set.size());
  for (std::size_t j = 0; j < set.size(); ++j)
    leaf_of[j] = static_cast<std::uint32_t>(
        evaluate_tree(model.trees[0], &inst.ds.x[set[j] * inst.ds.cols]));
  LabelHistograms h =
      init_hists_label(inst.ds.y, bins, set, leaf_of, spec.depth);

  const int N = 1 << spec.depth;
  std::int64_t root0 = 0, root1 = 0, expect1 = 0;
  for (int b = 1; b <= h.bins; ++b) {
    root0 += h.count(0, 1, b, 0);
    root1 += h.count(0, 1, b, 1);
  }
  for (std::uint32_t i : set) expect1 += inst.ds.y[i];
  CHECK(root0 + root1 == static_cast<std::int64_t>(set.size()));
  CHECK(root1 == expect1);
  for (int f = 0; f < h.features; ++f)
    for (int node = 1; node < N; ++node)
      for (int b = 1; b <= h.bins; ++b)
        for (int cls = 0; cls < 2; ++cls)
          CHECK(h.count(f, node, b, cls) ==
                h.count(f, 2 * node, b, cls) + h.count(f, 2 * node + 1, b, cls));
}

TEST_CASE("leaf weights: pure, balanced, empty") {
  Dataset ds;
  ds.cfg = f20;
  ds.rows = 4;
  ds.cols = 1;
  ds.x = {quantize(-2.0, f20).raw, quantize(-1.0, f20).raw,
          quantize(1.0, f20).raw, quantize(2.0, f20).raw};
  ds.y = {1, 1, 0, 1};
  ForestSpec spec;
  spec.trees = 1;
  spec.depth = 1;
  spec.bins = 4;
  spec.index_sets = {{0, 1, 2, 3}};
  ForestModel model = forest_train(ds, spec);
  CertReport rep = forest_certify(ds, model, spec);
  CHECK(rep.accepted);
  // all-class-1 leaf carries exactly 1.0
  bool saw_full = false;
  for (std::int64_t w : model.trees[0].leaf_weight)
    if (w == f20.scale()) saw_full = true;
  CHECK(saw_full);
}

TEST_CASE("forest train-certify round trip on random instances") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Instance inst = random_instance(rng, {40, 4, 3, 3, 8});
    ForestSpec spec = make_forest_spec(
        inst.ds.rows, 1 + static_cast<int>(rng.below(3)),
        1 + static_cast<int>(rng.below(3)), 2 + static_cast<int>(rng.below(7)),
        rng.next());
    ForestModel model = forest_train(inst.ds, spec);
    CertReport rep = forest_certify(inst.ds, model, spec);
    CAPTURE(trial);
    CHECK(rep.accepted);
  }
}

TEST_CASE("forest training is deterministic") {
  Rng rng(13);
  Instance inst = random_instance(rng, {30, 3, 2, 2, 8});
  ForestSpec spec = spec_for(inst.ds, rng);
  ForestModel a = forest_train(inst.ds, spec);
  ForestModel b = forest_train(inst.ds, spec);
  REQUIRE(a.trees.size() == b.trees.size());
  for (std::size_t k = 0; k < a.trees.size(); ++k) {
    CHECK(a.trees[k].split_feature == b.trees[k].split_feature);
    CHECK(a.trees[k].threshold == b.trees[k].threshold);
    CHECK(a.trees[k].leaf_weight == b.trees[k].leaf_weight);
  }
}

TEST_CASE("equal-gain alternative split is accepted (non-strict argmax)") {
  // duplicated column: swapping the split feature keeps the gain equal
  Rng rng(17);
  Dataset ds;
  ds.cfg = f20;
  ds.rows = 12;
  ds.cols = 2;
  for (std::size_t i = 0; i < ds.rows; ++i) {
    std::int64_t v = rng.range(-8 * f20.scale(), 8 * f20.scale());
    ds.x.push_back(v);
    ds.x.push_back(v);
    ds.y.push_back(static_cast<std::uint8_t>(rng.next() & 1));
  }
  ForestSpec spec;
  spec.trees = 1;
  spec.depth = 1;
  spec.bins = 8;
  spec.index_sets = {{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}};
  ForestModel model = forest_train(ds, spec);
  REQUIRE(forest_certify(ds, model, spec).accepted);
  Tree& t = model.trees[0];
  t.split_feature[0] = t.split_feature[0] == 0 ? 1 : 0;  // same values
  CHECK(forest_certify(ds, model, spec).accepted);
}

TEST_CASE("weight and split mutations are rejected") {
  Rng rng(19);
  int rejected = 0, total = 0;
  while (total < 30) {
    Instance inst = random_instance(rng, {30, 3, 2, 2, 8});
    ForestSpec spec = spec_for(inst.ds, rng);
    ForestModel model = forest_train(inst.ds, spec);

    ForestModel bad = model;
    std::size_t k = rng.below(bad.trees.size());
    std::size_t l = rng.below(bad.trees[k].leaf_weight.size());
    bad.trees[k].leaf_weight[l] += 1;
    ++total;
    if (!forest_certify(inst.ds, bad, spec).accepted) ++rejected;
  }
  CHECK(rejected == total);
}

TEST_CASE("index-set digest mismatch is rejected") {
  Rng rng(23);
  Instance inst = random_instance(rng, {20, 2, 1, 1, 4});
  ForestSpec spec = spec_for(inst.ds, rng, 1, 1, 4);
  ForestModel model = forest_train(inst.ds, spec);
  ForestSpec other = spec;
  other.index_sets[0].pop_back();
  CertReport rep = forest_certify(inst.ds, model, other);
  REQUIRE_FALSE(rep.accepted);
  CHECK(rep.failures[0].check == "index_digest");
}
