#include "gbcert/mutate.hpp"

#include <stdexcept>

#include "gbcert/rng.hpp"

namespace gbcert {

MutationKind mutation_kind_from_string(const std::string& name) {
  if (name == "z0") return MutationKind::BaseScore;
  if (name == "feat") return MutationKind::Feature;
  if (name == "thresh") return MutationKind::Threshold;
  if (name == "weight") return MutationKind::Weight;
  if (name == "dummy") return MutationKind::DummyToggle;
  throw std::invalid_argument("unknown mutation class: " + name +
                              " (expected z0|feat|thresh|weight|dummy)");
}

std::string to_string(MutationKind kind) {
  switch (kind) {
    case MutationKind::BaseScore: return "z0";
    case MutationKind::Feature: return "feat";
    case MutationKind::Threshold: return "thresh";
    case MutationKind::Weight: return "weight";
    case MutationKind::DummyToggle: return "dummy";
  }
  return "?";
}

namespace {

std::int64_t nonzero_delta(Rng& rng) {
  std::int64_t d = rng.range(1, 10);
  return rng.next() & 1 ? d : -d;
}

}  // namespace

Model mutate_model(const Model& model, const Dataset& ds, MutationKind kind,
                   std::uint64_t seed) {
  Rng rng(seed);
  Model out = model;
  if (out.trees.empty()) throw std::invalid_argument("model has no trees");
  BinTable bins = prebin(ds, model.hp.bins);

  auto pick_tree = [&]() -> Tree& {
    return out.trees[rng.below(out.trees.size())];
  };

  switch (kind) {
    case MutationKind::BaseScore: {
      out.base_score += nonzero_delta(rng);
      return out;
    }
    case MutationKind::Weight: {
      Tree& t = pick_tree();
      std::size_t l = rng.below(t.leaf_weight.size());
      t.leaf_weight[l] += nonzero_delta(rng);
      return out;
    }
    case MutationKind::Feature: {
      if (ds.cols < 2)
        throw std::invalid_argument("feature mutation needs at least 2 columns");
      for (int tries = 0; tries < 4096; ++tries) {
        Tree& t = out.trees[rng.below(out.trees.size())];
        std::size_t node = rng.below(t.split_feature.size());
        std::int32_t alt =
            static_cast<std::int32_t>(rng.below(ds.cols));
        if (alt != t.split_feature[node]) {
          t.split_feature[node] = alt;
          return out;
        }
      }
      throw std::runtime_error("could not synthesize a feature mutation");
    }
    case MutationKind::Threshold: {
      for (int tries = 0; tries < 4096; ++tries) {
        Tree& t = out.trees[rng.below(out.trees.size())];
        std::size_t node = rng.below(t.threshold.size());
        std::size_t f = rng.below(ds.cols);
        int b = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(bins.bins)));
        std::int64_t edge = bins.edge(f, b);
        if (edge != t.threshold[node]) {
          t.threshold[node] = edge;
          return out;
        }
      }
      throw std::runtime_error("could not synthesize a threshold mutation");
    }
    case MutationKind::DummyToggle: {
      for (int tries = 0; tries < 4096; ++tries) {
        Tree& t = out.trees[rng.below(out.trees.size())];
        int node = 1 + static_cast<int>(rng.below(t.split_feature.size()));
        if (t.is_dummy(node)) {
          std::size_t f = rng.below(ds.cols);
          int b = 1 + static_cast<int>(
                          rng.below(static_cast<std::uint64_t>(bins.bins)));
          std::int64_t edge = bins.edge(f, b);
          if (edge == kDummyThreshold) continue;
          t.split_feature[node - 1] = static_cast<std::int32_t>(f);
          t.threshold[node - 1] = edge;
        } else {
          t.split_feature[node - 1] = kDummyFeature;
          t.threshold[node - 1] = kDummyThreshold;
        }
        return out;
      }
      throw std::runtime_error("could not synthesize a dummy toggle");
    }
  }
  throw std::logic_error("unreachable mutation kind");
}

}  // namespace gbcert
