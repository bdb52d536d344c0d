#pragma once

#include "gbcert/cs/transcript.hpp"

namespace gbcert::cs {

/// Constraint gadgets over the Mersenne field. Builders run on the prover
/// side: they compute honest auxiliary wire values and append the
/// constraints that force them. Soundness is exercised by mutating committed
/// wires and replaying verification.

/// w = 1{x != 0} via the inverse trick: u*x = w and (1-w)*x = 0.
WireId g_nonzero(Transcript& tr, WireId x);

struct MsbWires {
  WireId sign = 0;          // claimed MSB
  WireId nonzero = 0;       // w = 1{z != 0}
  std::vector<WireId> limbs;
};

/// s = bit 60 of z via grouped d-bit limbs, each lookup-constrained, plus the
/// recomposition z = 2^60 s + sum 2^(d i) limb_i and the wraparound fix
/// (1-w)*s = 0 that rules out the all-ones forgery at z = 0.
MsbWires g_msb(Transcript& tr, WireId z);

/// s = 1{x < y} for gap-range signed encodings: MSB(x - y).
WireId g_compare(Transcript& tr, WireId x, WireId y);

/// Proves w in [0, 2^bits) by d-bit limb decomposition with lookups.
std::vector<WireId> g_range_pow2(Transcript& tr, WireId w, int bits);

/// Two comparisons: lo <= x <= hi with signed (gap-range) bounds.
void g_range(Transcript& tr, WireId x, std::int64_t lo, std::int64_t hi);

struct DivBounds {
  std::uint64_t max_denominator;  // m_d, |y| <= m_d
  std::uint64_t max_quotient;     // m_q, |z| < m_q; m_d * m_q < p/2

  bool valid() const {
    return static_cast<__uint128_t>(max_denominator) * max_quotient <
           static_cast<__uint128_t>(kPrime) / 2;
  }
};

struct DivisionWires {
  WireId abs_num = 0, abs_den = 0, abs_quot = 0, residue = 0;
  WireId sign_num = 0, sign_den = 0, sign_quot = 0;
};

/// z = trunc-toward-zero(x / y): absolute values with |x| = |y|*|z| + r,
/// 0 <= r < |y| <= m_d, |z| < m_q, sign via XOR of operand signs. The sign is
/// applied by reconstruction z = (1-2s)|z| so zero quotients stay sound.
///
/// The overload taking claimed_abs_quot / claimed_residue commits the
/// caller's witness pair instead of the honest one; limb decompositions stay
/// consistent with the claim, so only the genuinely violated constraint
/// trips. Soundness tests drive forged witnesses through it.
DivisionWires g_division(Transcript& tr, WireId x, WireId y, WireId z,
                         DivBounds bounds);
DivisionWires g_division(Transcript& tr, WireId x, WireId y, WireId z,
                         DivBounds bounds, Felt claimed_abs_quot,
                         Felt claimed_residue);

struct TruncationWires {
  WireId abs_num = 0, abs_quot = 0, residue = 0;
  WireId sign = 0;
};

/// z = trunc-toward-zero(x / 2^f). Residue in [0, 2^f) by direct lookup when
/// f fits a table, else limb decomposition; quotient below 2^(60-f), one bit
/// tighter than floor(p/2^f) so the residual mod-p identity cannot wrap.
TruncationWires g_truncation(Transcript& tr, WireId x, WireId z, int shift);
TruncationWires g_truncation(Transcript& tr, WireId x, WireId z, int shift,
                             Felt claimed_abs_quot, Felt claimed_residue);

// ---- small selector helpers used by the certification lowering -------------

/// r = a XOR b for boolean wires: a + b - 2ab.
WireId g_xor(Transcript& tr, WireId a, WireId b);

/// Allocates value(a)*value(b) as a wire with its Mul constraint.
WireId g_product(Transcript& tr, WireId a, WireId b);

/// Pins value(a)*value(b) to zero.
void g_product_zero(Transcript& tr, WireId a, WireId b);

/// Boolean complement 1 - a.
WireId g_not(Transcript& tr, WireId a);

}  // namespace gbcert::cs
