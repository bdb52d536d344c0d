#include "gbcert/cs/gadgets.hpp"

#include <stdexcept>

namespace gbcert::cs {

namespace {

Felt neg_one() { return kPrime - 1; }

}  // namespace

WireId g_nonzero(Transcript& tr, WireId x) {
  Felt xv = tr.value(x);
  WireId u = tr.alloc(xv == 0 ? 0 : f_inv(xv));
  WireId w = tr.alloc(xv == 0 ? 0 : 1);
  tr.mul(u, x, w);  // u*x = w (x != 0 forces w = 1, x == 0 forces w = 0)
  WireId v = tr.alloc(f_sub(1, tr.value(w)));
  tr.linear({{1, v}, {1, w}}, neg_one());  // v + w - 1 = 0
  g_product_zero(tr, v, x);                // (1-w)*x = 0
  return w;
}

MsbWires g_msb(Transcript& tr, WireId z) {
  const GadgetParams& gp = tr.params();
  const int d = gp.group_bits;
  const int t = gp.group_count;
  const Felt zv = tr.value(z);

  MsbWires out;
  out.sign = tr.alloc((zv >> 60) & 1);
  tr.mul(out.sign, out.sign, out.sign);  // boolean

  std::uint32_t limb_table = tr.range_table(d);
  std::vector<LinearTerm> recomp;
  recomp.reserve(t + 2);
  recomp.push_back({1, z});
  recomp.push_back({f_sub(0, Felt{1} << 60), out.sign});
  for (int i = 0; i < t; ++i) {
    Felt limb = (zv >> (d * i)) & ((Felt{1} << d) - 1);
    WireId lw = tr.alloc(limb);
    tr.lookup(limb_table, lw);
    recomp.push_back({f_sub(0, Felt{1} << (d * i)), lw});
    out.limbs.push_back(lw);
  }
  tr.linear(std::move(recomp), 0);  // z - 2^60 s - sum 2^(di) limb_i = 0

  // Wraparound fix: with p = 2^61-1 the only decomposition of z + p is the
  // all-ones pattern at z = 0, excluded by (1-w)*s = 0.
  out.nonzero = g_nonzero(tr, z);
  WireId nw = g_not(tr, out.nonzero);
  g_product_zero(tr, nw, out.sign);
  return out;
}

WireId g_compare(Transcript& tr, WireId x, WireId y) {
  WireId diff = tr.alloc(f_sub(tr.value(x), tr.value(y)));
  tr.linear({{1, diff}, {neg_one(), x}, {1, y}}, 0);  // diff - x + y = 0
  return g_msb(tr, diff).sign;
}

std::vector<WireId> g_range_pow2(Transcript& tr, WireId w, int bits) {
  if (bits <= 0 || bits > 60)
    throw std::invalid_argument("g_range_pow2: bits out of (0, 60]");
  const int d = tr.params().group_bits;
  // Only the low `bits` bits are committed; when the value is wider the
  // recomposition constraint fails at verification, which is the point.
  const Felt v = tr.value(w);

  std::vector<WireId> limbs;
  std::vector<LinearTerm> recomp;
  recomp.push_back({1, w});
  int off = 0;
  while (off < bits) {
    int width = std::min(d, bits - off);
    Felt limb = (v >> off) & ((Felt{1} << width) - 1);
    WireId lw = tr.alloc(limb);
    tr.lookup(tr.range_table(width), lw);
    recomp.push_back({f_sub(0, Felt{1} << off), lw});
    limbs.push_back(lw);
    off += width;
  }
  tr.linear(std::move(recomp), 0);
  return limbs;
}

void g_range(Transcript& tr, WireId x, std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw std::invalid_argument("g_range: bounds out of order");
  WireId lo_w = tr.constant(encode_signed(lo));
  WireId hi_w = tr.constant(encode_signed(hi));
  WireId below = g_compare(tr, x, lo_w);
  tr.equal(below, 0);  // not (x < lo)
  WireId above = g_compare(tr, hi_w, x);
  tr.equal(above, 0);  // not (hi < x)
}

WireId g_xor(Transcript& tr, WireId a, WireId b) {
  WireId m = g_product(tr, a, b);
  Felt rv = f_sub(f_add(tr.value(a), tr.value(b)), f_mul(2, tr.value(m)));
  WireId r = tr.alloc(rv);
  tr.linear({{1, r}, {neg_one(), a}, {neg_one(), b}, {2, m}}, 0);
  return r;
}

WireId g_product(Transcript& tr, WireId a, WireId b) {
  WireId c = tr.alloc(f_mul(tr.value(a), tr.value(b)));
  tr.mul(a, b, c);
  return c;
}

void g_product_zero(Transcript& tr, WireId a, WireId b) {
  WireId c = tr.alloc(f_mul(tr.value(a), tr.value(b)));
  tr.mul(a, b, c);
  tr.equal(c, 0);
}

WireId g_not(Transcript& tr, WireId a) {
  WireId r = tr.alloc(f_sub(1, tr.value(a)));
  tr.linear({{1, r}, {1, a}}, neg_one());
  return r;
}

namespace {

/// |i| wire from (i, msb=s): abs = i - 2*(s*i) = (1-2s)*i.
WireId abs_reconstruct(Transcript& tr, WireId value, WireId sign) {
  WireId m = g_product(tr, sign, value);
  Felt av = f_sub(tr.value(value), f_mul(2, tr.value(m)));
  WireId abs = tr.alloc(av);
  tr.linear({{1, abs}, {neg_one(), value}, {2, m}}, 0);
  return abs;
}

}  // namespace

DivisionWires g_division(Transcript& tr, WireId x, WireId y, WireId z,
                         DivBounds bounds) {
  Felt abs_num = tr.value(x) >> 60 ? f_sub(0, tr.value(x)) : tr.value(x);
  Felt abs_den = tr.value(y) >> 60 ? f_sub(0, tr.value(y)) : tr.value(y);
  if (abs_den == 0) throw std::invalid_argument("g_division: zero divisor");
  Felt q = abs_num / abs_den;
  return g_division(tr, x, y, z, bounds, q, abs_num - q * abs_den);
}

DivisionWires g_division(Transcript& tr, WireId x, WireId y, WireId z,
                         DivBounds bounds, Felt claimed_abs_quot,
                         Felt claimed_residue) {
  if (!bounds.valid())
    throw std::logic_error("g_division: m_d * m_q must stay below p/2");

  DivisionWires out;
  out.sign_num = g_msb(tr, x).sign;
  out.sign_den = g_msb(tr, y).sign;
  out.abs_num = abs_reconstruct(tr, x, out.sign_num);
  out.abs_den = abs_reconstruct(tr, y, out.sign_den);

  // Sign applied by reconstruction, so a zero quotient is consistent with
  // any operand signs (trunc(-1/5) = 0 must verify).
  out.sign_quot = g_xor(tr, out.sign_num, out.sign_den);
  out.abs_quot = tr.alloc(claimed_abs_quot);
  {
    WireId m = g_product(tr, out.sign_quot, out.abs_quot);
    tr.linear({{1, z}, {neg_one(), out.abs_quot}, {2, m}}, 0);
  }

  out.residue = tr.alloc(claimed_residue);
  WireId prod = g_product(tr, out.abs_den, out.abs_quot);
  tr.linear({{1, out.abs_num}, {neg_one(), prod}, {neg_one(), out.residue}}, 0);

  // Residue and quotient are free prover commitments: pin both below 2^60
  // via their MSB gadgets before the comparisons, then bound them.
  WireId r_sign = g_msb(tr, out.residue).sign;
  tr.equal(r_sign, 0);
  WireId r_lt_den = g_compare(tr, out.residue, out.abs_den);
  tr.equal(r_lt_den, 1);

  WireId q_sign = g_msb(tr, out.abs_quot).sign;
  tr.equal(q_sign, 0);
  WireId q_bound = g_compare(tr, out.abs_quot, tr.constant(bounds.max_quotient));
  tr.equal(q_bound, 1);

  WireId d_bound = g_compare(tr, tr.constant(bounds.max_denominator), out.abs_den);
  tr.equal(d_bound, 0);  // not (m_d < |y|)
  return out;
}

TruncationWires g_truncation(Transcript& tr, WireId x, WireId z, int shift) {
  Felt abs_num = tr.value(x) >> 60 ? f_sub(0, tr.value(x)) : tr.value(x);
  Felt q = abs_num >> shift;
  return g_truncation(tr, x, z, shift, q, abs_num - (q << shift));
}

TruncationWires g_truncation(Transcript& tr, WireId x, WireId z, int shift,
                             Felt claimed_abs_quot, Felt claimed_residue) {
  if (shift < 1 || shift > 59)
    throw std::invalid_argument("g_truncation: shift out of [1, 59]");

  TruncationWires out;
  out.sign = g_msb(tr, x).sign;
  out.abs_num = abs_reconstruct(tr, x, out.sign);

  out.abs_quot = tr.alloc(claimed_abs_quot);
  {
    WireId m = g_product(tr, out.sign, out.abs_quot);
    tr.linear({{1, z}, {neg_one(), out.abs_quot}, {2, m}}, 0);
  }

  out.residue = tr.alloc(claimed_residue);
  tr.linear({{1, out.abs_num},
             {f_sub(0, Felt{1} << shift), out.abs_quot},
             {neg_one(), out.residue}},
            0);

  if (shift <= tr.params().group_bits) {
    tr.lookup(tr.range_table(shift), out.residue);
  } else {
    g_range_pow2(tr, out.residue, shift);
  }
  // One bit under floor(p/2^f): |num| <= 2^59-1 keeps honest quotients well
  // inside, and 2^f * quot + r can no longer reach p.
  g_range_pow2(tr, out.abs_quot, 60 - shift);
  return out;
}

}  // namespace gbcert::cs
