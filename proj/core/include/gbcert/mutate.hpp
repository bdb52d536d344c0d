#pragma once

#include <cstdint>
#include <string>

#include "gbcert/train.hpp"

namespace gbcert {

/// The five model corruptions the soundness suite drives through certify().
enum class MutationKind {
  BaseScore,    // z0 +- small delta
  Feature,      // one real split's feature index changed
  Threshold,    // one split's threshold moved to a different edge value
  Weight,       // one leaf weight +- small delta
  DummyToggle,  // one node flipped between dummy and real
};

MutationKind mutation_kind_from_string(const std::string& name);
std::string to_string(MutationKind kind);

/// Seed-deterministic single mutation; the result always differs from the
/// input model. Edges from the dataset are needed to pick a colliding-free
/// replacement threshold.
Model mutate_model(const Model& model, const Dataset& ds, MutationKind kind,
                   std::uint64_t seed);

}  // namespace gbcert
