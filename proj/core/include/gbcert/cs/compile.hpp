#pragma once

#include <array>
#include <cstdint>

#include "gbcert/cert.hpp"
#include "gbcert/cs/transcript.hpp"

namespace gbcert::cs {

class CompileError : public std::runtime_error {
 public:
  explicit CompileError(const std::string& what) : std::runtime_error(what) {}
};

/// Lowers the full certification of (ds, model) to an arithmetic-constraint
/// transcript: label booleanity, pre-binning, base-logit recomputation, score
/// recurrence, per-tree inference bits, histogram aggregation with
/// lookup-verified placement, leaf-weight and gain divisions with their range
/// checks, and the split argmax sweep with tie-breaker booleans.
///
/// Indexed accesses (path thresholds, sample features, leaf weights) go
/// through packed-pair lookup tables instead of a ZK-RAM; the transcript
/// carries a flag recording that substitution.
///
/// Requires certify(ds, model) to accept, and refuses (CompileError) if any
/// static operand bound would overflow the field's soundness margins.
Transcript compile_cert(const Dataset& ds, const Model& model,
                        const LeafAssignment* assignment,
                        const std::array<std::uint8_t, 32>& statement_digest,
                        GadgetParams params = {});

}  // namespace gbcert::cs
