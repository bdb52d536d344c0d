#include "gbcert/cs/compile.hpp"

#include <algorithm>

#include "gbcert/cs/gadgets.hpp"

namespace gbcert::cs {

namespace {

Felt enc(std::int64_t v) { return encode_signed(v); }

Felt neg(Felt v) { return f_sub(0, v); }

std::uint64_t next_pow2(std::uint64_t v) {
  std::uint64_t p = 1;
  while (p < v) p <<= 1;
  return p;
}

struct Compiler {
  const Dataset& ds;
  const Model& model;
  const LeafAssignment& la;
  Transcript tr;

  std::size_t n, d;
  int B, h, N, m;
  std::int64_t S;

  // committed wires
  std::vector<WireId> xw;                    // n x d features
  std::vector<WireId> yw;                    // labels
  WireId z0w = 0;
  struct TreeWires {
    std::vector<WireId> feat, thresh, weight;
  };
  std::vector<TreeWires> treew;
  std::vector<WireId> edgew;                 // d x (B+1), slot b=0 unused
  std::vector<WireId> binw;                  // n x d bin ids
  std::vector<WireId> zw;                    // (m+1) x n scores

  // packing for pair lookups
  std::int64_t mx = 1;           // max |feature| and |edge|
  std::uint64_t kx_feat = 0, kx_row = 0;     // x table: i*kx_row + f*kx_feat + x+mx
  std::uint64_t kt_feat = 0, kt_node = 0;    // tree tables
  std::uint64_t ke_bin = 0, ke_feat = 0;     // edges table
  std::uint64_t kl_leaf = 0;                 // leaf-weight tables
  std::uint64_t dummy_slot = 0;              // packed threshold of a pruned node

  std::uint32_t xtable = 0, edges_table = 0, bin_domain_table = 0;
  std::vector<std::uint32_t> tree_tables, leaf_tables;

  Compiler(const Dataset& ds_, const Model& model_, const LeafAssignment& la_,
           GadgetParams params)
      : ds(ds_), model(model_), la(la_), tr(params, ds_.cfg.frac_bits) {
    n = ds.rows;
    d = ds.cols;
    B = model.hp.bins;
    h = model.hp.depth;
    N = 1 << h;
    m = model.hp.trees;
    S = ds.cfg.scale();
  }

  // wire with a pinned value: w - sum(terms) - constant = 0
  WireId derived(Felt value, std::vector<LinearTerm> terms, Felt constant) {
    WireId w = tr.alloc(value);
    std::vector<LinearTerm> eq;
    eq.reserve(terms.size() + 1);
    eq.push_back({1, w});
    for (auto& t : terms) eq.push_back({neg(t.coeff), t.wire});
    tr.linear(std::move(eq), neg(constant));
    return w;
  }

  WireId div_wire(WireId num, WireId den, std::int64_t num_val,
                  std::int64_t den_val) {
    if (den_val == 0) throw CompileError("division by zero in witness");
    std::int64_t q = num_val / den_val;  // toward zero
    std::uint64_t abs_den = den_val < 0 ? -den_val : den_val;
    std::uint64_t abs_q = q < 0 ? -q : q;
    DivBounds bounds{abs_den, abs_q + 1};
    if (!bounds.valid())
      throw CompileError("division operands exceed m_d*m_q < p/2");
    WireId z = tr.alloc(enc(q));
    g_division(tr, num, den, z, bounds);
    return z;
  }

  WireId trunc_wire(WireId x, std::int64_t x_val, int shift) {
    std::int64_t q = x_val / (std::int64_t{1} << shift);
    WireId z = tr.alloc(enc(q));
    g_truncation(tr, x, z, shift);
    return z;
  }

  WireId clip_wire(WireId x, std::int64_t x_val, std::int64_t lo, std::int64_t hi) {
    WireId below = g_compare(tr, x, tr.constant(enc(lo)));
    WireId above = g_compare(tr, tr.constant(enc(hi)), x);
    WireId m1 = g_product(tr, below, x);
    WireId m2 = g_product(tr, above, x);
    std::int64_t y_val = x_val < lo ? lo : (x_val > hi ? hi : x_val);
    // y = x + b1*(lo - x) + b2*(hi - x)
    return derived(enc(y_val),
                   {{1, x}, {enc(lo), below}, {neg(1), m1}, {enc(hi), above}, {neg(1), m2}},
                   0);
  }

  /// p = sigmoid(z): saturation bits select among {0, trunc((z+2S)/4), S}.
  WireId sigmoid_wire(WireId z, std::int64_t z_val) {
    WireId lo_cut = tr.constant(enc(-2 * S));
    WireId hi_cut = tr.constant(enc(2 * S));
    WireId is_low = g_not(tr, g_compare(tr, lo_cut, z));   // z <= -2S
    WireId is_high = g_not(tr, g_compare(tr, z, hi_cut));  // z >= 2S
    // mid = 1 - is_low - is_high
    Felt mid_val = f_sub(f_sub(1, tr.value(is_low)), tr.value(is_high));
    WireId mid = derived(mid_val, {{neg(1), is_low}, {neg(1), is_high}}, 1);
    WireId shifted = derived(enc(z_val + 2 * S), {{1, z}}, enc(2 * S));
    WireId quarter = trunc_wire(shifted, z_val + 2 * S, 2);
    WireId mq = g_product(tr, mid, quarter);
    std::int64_t p_val = z_val <= -2 * S ? 0 : (z_val >= 2 * S ? S : (z_val + 2 * S) / 4);
    return derived(enc(p_val), {{1, mq}, {enc(S), is_high}}, 0);
  }

  void setup_packing() {
    for (std::int64_t v : ds.x) mx = std::max(mx, v < 0 ? -v : v);
    const std::uint64_t span = static_cast<std::uint64_t>(2 * mx) + 2;
    dummy_slot = span - 1;  // reserved packed slot for pruned thresholds

    kx_feat = next_pow2(span);
    kx_row = kx_feat * next_pow2(d);
    kt_feat = next_pow2(span);
    kt_node = kt_feat * next_pow2(d);
    ke_bin = next_pow2(span);
    ke_feat = ke_bin * next_pow2(static_cast<std::uint64_t>(B) + 1);

    __uint128_t x_top = static_cast<__uint128_t>(kx_row) * n;
    __uint128_t t_top = static_cast<__uint128_t>(kt_node) * (2 * N);
    __uint128_t e_top = static_cast<__uint128_t>(ke_feat) * d;
    std::uint64_t limit = kGapBound;
    if (x_top > limit || t_top > limit || e_top > limit)
      throw CompileError("pair-packing exceeds the one-bit-gap range");

    kl_leaf = next_pow2(static_cast<std::uint64_t>(2 * S) + 1);
    if (static_cast<__uint128_t>(kl_leaf) * (N + 1) > limit)
      throw CompileError("leaf-weight packing exceeds the one-bit-gap range");

    // static operand bounds for the division numerators
    if (static_cast<__uint128_t>(2 * mx) * S >= static_cast<__uint128_t>(kPrime) / 2)
      throw CompileError("feature span times scale exceeds p/2");
    if (static_cast<__uint128_t>(n) * S * S >= static_cast<__uint128_t>(kPrime) / 2)
      throw CompileError("sample count times scale^2 exceeds p/2");
  }

  // Constants referenced inside per-sample scopes are created up front so the
  // data-linear constraint count stays exactly proportional to n.
  void prewarm_constants() {
    tr.constant(0);
    tr.constant(1);
    tr.constant(enc(-2 * S));
    tr.constant(enc(2 * S));
  }

  void commit_inputs() {
    xw.resize(n * d);
    yw.resize(n);
    {
      Transcript::DataLinearScope scope(tr);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t f = 0; f < d; ++f)
          xw[i * d + f] = tr.alloc(enc(ds.at(i, f)));
        yw[i] = tr.alloc(ds.y[i]);
        // label booleanity y*(1-y) = 0
        WireId ny = g_not(tr, yw[i]);
        g_product_zero(tr, yw[i], ny);
      }
    }
    z0w = tr.alloc(enc(model.base_score));
    treew.resize(m);
    for (int k = 0; k < m; ++k) {
      const Tree& t = model.trees[k];
      for (int node = 1; node <= N - 1; ++node) {
        treew[k].feat.push_back(tr.alloc(static_cast<Felt>(t.feature_at(node))));
        treew[k].thresh.push_back(tr.alloc(enc(t.threshold_at(node))));
      }
      for (int l = 1; l <= N; ++l)
        treew[k].weight.push_back(tr.alloc(enc(t.weight_at(l))));
    }
  }

  /// x table: every (row, feature, value) triple, each entry tied to its wire.
  void build_x_table() {
    std::vector<Felt> entries;
    entries.reserve(n * d);
    {
      Transcript::DataLinearScope scope(tr);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t f = 0; f < d; ++f) {
          Felt entry = static_cast<Felt>(i) * kx_row + static_cast<Felt>(f) * kx_feat +
                       static_cast<Felt>(ds.at(i, f) + mx);
          entries.push_back(entry);
          // entry - x - (i*kx_row + f*kx_feat + mx) = 0, pins the wire
          tr.linear({{1, xw[i * d + f]}},
                    f_sub(static_cast<Felt>(i) * kx_row +
                              static_cast<Felt>(f) * kx_feat + static_cast<Felt>(mx),
                          entry));
        }
    }
    std::sort(entries.begin(), entries.end());
    xtable = tr.add_table(std::move(entries));
  }

  std::uint64_t packed_threshold(std::int64_t t) const {
    return t == kDummyThreshold ? dummy_slot
                                : static_cast<std::uint64_t>(t + mx);
  }

  void build_tree_tables() {
    for (int k = 0; k < m; ++k) {
      const Tree& t = model.trees[k];
      std::vector<Felt> entries;
      for (int node = 1; node <= N - 1; ++node) {
        std::uint64_t pt = packed_threshold(t.threshold_at(node));
        Felt entry = static_cast<Felt>(node) * kt_node +
                     static_cast<Felt>(t.feature_at(node)) * kt_feat + pt;
        entries.push_back(entry);
        // pin the feature wire to the table constant
        tr.equal(treew[k].feat[node - 1], static_cast<Felt>(t.feature_at(node)));
        if (pt != dummy_slot) {
          // pin the threshold wire: t = pt - mx
          tr.linear({{1, treew[k].thresh[node - 1]}},
                    f_sub(static_cast<Felt>(mx), static_cast<Felt>(pt)));
        }
        // pruned nodes get their threshold pinned by the split section
      }
      std::sort(entries.begin(), entries.end());
      tree_tables.push_back(tr.add_table(std::move(entries)));

      std::vector<Felt> weights;
      for (int l = 1; l <= N; ++l) {
        Felt entry = static_cast<Felt>(l) * kl_leaf +
                     static_cast<Felt>(t.weight_at(l) + S);
        weights.push_back(entry);
        // w = entry - l*kl_leaf - S pins the weight wire to the table row
        tr.linear({{1, treew[k].weight[l - 1]}},
                  f_sub(static_cast<Felt>(l) * kl_leaf + static_cast<Felt>(S),
                        entry));
      }
      std::sort(weights.begin(), weights.end());
      leaf_tables.push_back(tr.add_table(std::move(weights)));
    }
  }

  void prebin_section(const BinTable& bins) {
    edgew.assign(d * (B + 1), 0);
    binw.assign(n * d, 0);
    std::vector<Felt> edge_entries;

    for (std::size_t f = 0; f < d; ++f) {
      std::int64_t lo_val = ds.at(0, f), hi_val = ds.at(0, f);
      for (std::size_t i = 1; i < n; ++i) {
        lo_val = std::min(lo_val, ds.at(i, f));
        hi_val = std::max(hi_val, ds.at(i, f));
      }
      WireId lo = tr.alloc(enc(lo_val));
      WireId hi = tr.alloc(enc(hi_val));
      // membership in the column plus domination over every row pins min/max
      std::vector<Felt> column;
      for (std::size_t i = 0; i < n; ++i) column.push_back(enc(ds.at(i, f)));
      std::sort(column.begin(), column.end());
      std::uint32_t col_table = tr.add_table(std::move(column));
      tr.lookup(col_table, lo);
      tr.lookup(col_table, hi);
      {
        Transcript::DataLinearScope scope(tr);
        for (std::size_t i = 0; i < n; ++i) {
          WireId xb = xw[i * d + f];
          tr.equal(g_compare(tr, xb, lo), 0);  // not (x < min)
          tr.equal(g_compare(tr, hi, xb), 0);  // not (max < x)
        }
      }

      // delta = fxp_div(hi - lo, B): numerator lifted by the scale
      std::int64_t span_val = hi_val - lo_val;
      WireId span = derived(enc(span_val), {{1, hi}, {neg(1), lo}}, 0);
      WireId num = derived(enc(span_val * S), {{static_cast<Felt>(S), span}}, 0);
      WireId den = tr.constant(enc(static_cast<std::int64_t>(B) * S));
      WireId delta = div_wire(num, den, span_val * S,
                              static_cast<std::int64_t>(B) * S);

      for (int b = 1; b <= B; ++b) {
        std::int64_t edge_val = bins.edge(f, b);
        WireId e = derived(enc(edge_val),
                           {{1, lo}, {static_cast<Felt>(b - 1), delta}}, 0);
        edgew[f * (B + 1) + b] = e;
        Felt entry = static_cast<Felt>(f) * ke_feat +
                     static_cast<Felt>(b) * ke_bin +
                     static_cast<Felt>(edge_val + mx);
        edge_entries.push_back(entry);
        tr.linear({{1, e}}, f_sub(static_cast<Felt>(f) * ke_feat +
                                      static_cast<Felt>(b) * ke_bin +
                                      static_cast<Felt>(mx),
                                  entry));
      }

      // binID[i][f] = sum over b of 1{edge <= x}
      {
        Transcript::DataLinearScope scope(tr);
        for (std::size_t i = 0; i < n; ++i) {
          WireId xb = xw[i * d + f];
          std::vector<LinearTerm> sum_terms;
          for (int b = 1; b <= B; ++b) {
            WireId ge = g_not(tr, g_compare(tr, xb, edgew[f * (B + 1) + b]));
            sum_terms.push_back({1, ge});
          }
          WireId bid = derived(static_cast<Felt>(bins.bin(i, f)),
                               std::move(sum_terms), 0);
          binw[i * d + f] = bid;
          tr.lookup(bin_domain_table, bid);
        }
      }
    }
    std::sort(edge_entries.begin(), edge_entries.end());
    edges_table = tr.add_table(std::move(edge_entries));
  }

  void logit_section() {
    std::int64_t sum_val = 0;
    std::vector<LinearTerm> sum_terms;
    for (std::size_t i = 0; i < n; ++i) {
      sum_val += ds.y[i];
      sum_terms.push_back({static_cast<Felt>(S) * static_cast<Felt>(S), yw[i]});
    }
    // numerator sum(y) * S^2; denominator n*S public
    WireId num = derived(enc(sum_val * S * S), std::move(sum_terms), 0);
    WireId den = tr.constant(enc(static_cast<std::int64_t>(n) * S));
    std::int64_t p_val = (sum_val * S * S) / (static_cast<std::int64_t>(n) * S);
    WireId p = div_wire(num, den, sum_val * S * S, static_cast<std::int64_t>(n) * S);

    std::int64_t lo = model.hp.p_min.raw, hi = model.hp.p_max(ds.cfg).raw;
    std::int64_t pc_val = std::clamp(p_val, lo, hi);
    WireId pc = clip_wire(p, p_val, lo, hi);

    std::int64_t u_val = 2 * pc_val - S;
    WireId u = derived(enc(u_val), {{2, pc}}, neg(enc(S)));
    std::int64_t uu_val = u_val * u_val;
    WireId uu = g_product(tr, u, u);
    std::int64_t u2_val = uu_val / S;
    WireId u2 = trunc_wire(uu, uu_val, ds.cfg.frac_bits);
    std::int64_t u3p_val = u2_val * u_val;
    WireId u3p = g_product(tr, u2, u);
    std::int64_t u3_val = u3p_val / S;
    WireId u3 = trunc_wire(u3p, u3p_val, ds.cfg.frac_bits);
    std::int64_t u5p_val = u3_val * u2_val;
    WireId u5p = g_product(tr, u3, u2);
    std::int64_t u5_val = u5p_val / S;
    WireId u5 = trunc_wire(u5p, u5p_val, ds.cfg.frac_bits);

    WireId t3 = div_wire(u3, tr.constant(3), u3_val, 3);
    WireId t5 = div_wire(u5, tr.constant(5), u5_val, 5);
    // z0 = 2u + 2*t3 + 2*t5
    tr.linear({{1, z0w}, {neg(2), u}, {neg(2), t3}, {neg(2), t5}}, 0);
  }

  /// Inference bits, leaf recomposition, weight fetch, score recurrence.
  void scores_section() {
    zw.assign(static_cast<std::size_t>(m + 1) * n, 0);
    for (std::size_t i = 0; i < n; ++i) zw[i] = z0w;

    for (int k = 1; k <= m; ++k) {
      Transcript::DataLinearScope scope(tr);
      for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t leaf = la.leaf_of(k, i);
        WireId leaf_w = tr.alloc(leaf);

        std::vector<LinearTerm> recomb{{1, leaf_w}};
        WireId node_w = tr.constant(1);
        std::uint64_t node_val = 1;
        for (int j = 1; j <= h; ++j) {
          // fetch (f, packed t) for the current path node
          const Tree& tree = model.trees[k - 1];
          int real_node = static_cast<int>((leaf + N - 1) >> (h + 1 - j));
          std::int64_t t_val = tree.threshold_at(real_node);
          std::int32_t f_val = tree.feature_at(real_node);
          std::uint64_t pt_val = packed_threshold(t_val);

          WireId fj = tr.alloc(static_cast<Felt>(f_val));
          WireId ptj = tr.alloc(pt_val);
          WireId comp = derived(
              static_cast<Felt>(node_val) * kt_node +
                  static_cast<Felt>(f_val) * kt_feat + pt_val,
              {{kt_node, node_w}, {kt_feat, fj}, {1, ptj}}, 0);
          tr.lookup(tree_tables[k - 1], comp);

          // threshold for comparison: pt==dummy_slot selects -(mx+1)
          WireId sel = g_nonzero(
              tr, derived(f_sub(pt_val, dummy_slot), {{1, ptj}}, neg(dummy_slot)));
          WireId selpt = g_product(tr, sel, ptj);
          std::int64_t tprime_val =
              pt_val == dummy_slot ? -(mx + 1)
                                   : static_cast<std::int64_t>(pt_val) - mx;
          WireId tprime = derived(enc(tprime_val), {{1, selpt}, {1, sel}},
                                  neg(static_cast<Felt>(mx + 1)));

          // feature value fetch from the x table
          std::int64_t x_val = ds.at(i, static_cast<std::size_t>(f_val));
          WireId vj = tr.alloc(enc(x_val));
          WireId xcomp = derived(
              static_cast<Felt>(i) * kx_row + static_cast<Felt>(f_val) * kx_feat +
                  static_cast<Felt>(x_val + mx),
              {{kx_feat, fj}, {1, vj}},
              f_add(static_cast<Felt>(i) * kx_row, static_cast<Felt>(mx)));
          tr.lookup(xtable, xcomp);

          // branch bit: right iff threshold <= value
          WireId a = g_not(tr, g_compare(tr, vj, tprime));
          recomb.push_back({neg(Felt{1} << (h - j)), a});

          std::uint64_t next_val = 2 * node_val + ((pt_val == dummy_slot)
                                                       ? 1
                                                       : (t_val <= x_val ? 1 : 0));
          WireId next =
              derived(static_cast<Felt>(next_val), {{2, node_w}, {1, a}}, 0);
          node_w = next;
          node_val = next_val;
        }
        // l - 1 - sum a_j 2^(h-j) = 0
        tr.linear(std::move(recomb), neg(1));

        // weight fetch and score update z_k = z_{k-1} - trunc(eta * w)
        const Tree& tree = model.trees[k - 1];
        std::int64_t w_val = tree.weight_at(static_cast<int>(leaf));
        WireId wsel = tr.alloc(enc(w_val));
        WireId lcomp = derived(
            static_cast<Felt>(leaf) * kl_leaf + static_cast<Felt>(w_val + S),
            {{kl_leaf, leaf_w}, {1, wsel}}, static_cast<Felt>(S));
        tr.lookup(leaf_tables[k - 1], lcomp);

        std::int64_t prod_val = model.hp.eta.raw * w_val;
        WireId prod = derived(enc(prod_val),
                              {{enc(model.hp.eta.raw), wsel}}, 0);
        WireId step = trunc_wire(prod, prod_val, ds.cfg.frac_bits);
        std::int64_t z_val = la.score_of(k, i);
        zw[static_cast<std::size_t>(k) * n + i] = derived(
            enc(z_val), {{1, zw[(static_cast<std::size_t>(k) - 1) * n + i]},
                         {neg(1), step}},
            0);
      }
    }
  }

  struct HistWires {
    std::vector<WireId> g, h;  // [f][node][b]
    int nodes, bins;
    std::size_t idx(std::size_t f, int node, int b) const {
      return (f * nodes + node) * (bins + 1) + b;
    }
  };

  HistWires hist_section(int k, const NodeHistograms& hists) {
    // per-sample gradients/Hessians from the previous scores
    std::vector<WireId> gw(n), hw(n);
    {
      Transcript::DataLinearScope scope(tr);
      for (std::size_t i = 0; i < n; ++i) {
        std::int64_t z_val = la.score_of(k - 1, i);
        WireId p = sigmoid_wire(zw[(static_cast<std::size_t>(k) - 1) * n + i], z_val);
        GradHess gh = grad_hess(z_val, ds.cfg);
        std::int64_t g_val = gh.prob - static_cast<std::int64_t>(ds.y[i]) * S;
        gw[i] = derived(enc(g_val), {{1, p}, {neg(static_cast<Felt>(S)), yw[i]}}, 0);
        // h = trunc(p * (S - p))
        WireId sp = derived(enc(S - gh.prob), {{neg(1), p}}, enc(S));
        WireId pr = g_product(tr, p, sp);
        hw[i] = trunc_wire(pr, static_cast<std::int64_t>(gh.prob) * (S - gh.prob),
                           ds.cfg.frac_bits);
      }
    }

    // lookup-verified placement, then aggregation as linear sums
    HistWires out;
    out.nodes = 2 * N;
    out.bins = B;
    out.g.assign(static_cast<std::size_t>(d) * out.nodes * (B + 1), 0);
    out.h.assign(out.g.size(), 0);

    std::vector<std::vector<LinearTerm>> cell_g(out.g.size()), cell_h(out.g.size());
    {
      Transcript::DataLinearScope scope(tr);
      for (std::size_t i = 0; i < n; ++i) {
        int node = static_cast<int>(la.leaf_of(k, i)) + N - 1;
        for (std::size_t f = 0; f < d; ++f) {
          tr.lookup(bin_domain_table, binw[i * d + f]);
          int b = 0;
          // recount the placement from witness values
          {
            // bin ids were pinned in prebin_section; reuse the plain value
            b = static_cast<int>(tr.value(binw[i * d + f]));
          }
          std::size_t idx = out.idx(f, node, b);
          cell_g[idx].push_back({1, gw[i]});
          cell_h[idx].push_back({1, hw[i]});
        }
      }
    }

    for (std::size_t f = 0; f < d; ++f)
      for (int node = 2 * N - 1; node >= 1; --node)
        for (int b = 1; b <= B; ++b) {
          std::size_t idx = out.idx(f, node, b);
          Felt g_val = enc(hists.gsum(static_cast<int>(f), node, b));
          Felt h_val = enc(hists.hsum(static_cast<int>(f), node, b));
          if (node >= N) {
            out.g[idx] = derived(g_val, std::move(cell_g[idx]), 0);
            out.h[idx] = derived(h_val, std::move(cell_h[idx]), 0);
          } else {
            out.g[idx] = derived(
                g_val, {{1, out.g[out.idx(f, 2 * node, b)]},
                        {1, out.g[out.idx(f, 2 * node + 1, b)]}}, 0);
            out.h[idx] = derived(
                h_val, {{1, out.h[out.idx(f, 2 * node, b)]},
                        {1, out.h[out.idx(f, 2 * node + 1, b)]}}, 0);
          }
        }
    return out;
  }

  void leaf_weights_section(int k, const HistWires& hw,
                            const NodeHistograms& hists) {
    const std::int64_t lift_bound =
        static_cast<std::int64_t>(((kPrime) / 2) >> ds.cfg.frac_bits);
    for (int l = 1; l <= N; ++l) {
      const int node = l + N - 1;
      std::int64_t g_val = 0, h_val = 0;
      std::vector<LinearTerm> g_terms, h_terms;
      for (int b = 1; b <= B; ++b) {
        g_val += hists.gsum(0, node, b);
        h_val += hists.hsum(0, node, b);
        g_terms.push_back({1, hw.g[hw.idx(0, node, b)]});
        h_terms.push_back({1, hw.h[hw.idx(0, node, b)]});
      }
      WireId G = derived(enc(g_val), std::move(g_terms), 0);
      WireId H = derived(enc(h_val), std::move(h_terms), 0);
      g_range(tr, G, -lift_bound, lift_bound);  // |G| < p/(2*scale)

      WireId num = derived(enc(g_val * S), {{static_cast<Felt>(S), G}}, 0);
      WireId den = derived(enc(h_val + model.hp.lambda.raw), {{1, H}},
                           enc(model.hp.lambda.raw));
      std::int64_t q_val = fxp_div(Fxp{g_val}, Fxp{h_val + model.hp.lambda.raw},
                                   ds.cfg).raw;
      WireId q = div_wire(num, den, g_val * S, h_val + model.hp.lambda.raw);
      WireId w = clip_wire(q, q_val, -S, S);
      // pinned to the committed model weight
      tr.linear({{1, treew[k - 1].weight[l - 1]}, {neg(1), w}}, 0);
    }
  }

  void splits_section(int k, const HistWires& hw, const NodeHistograms& hists,
                      const BinTable& bins) {
    const std::int64_t square_bound = (std::int64_t{1} << 30) - 1;
    std::vector<WireId> terminal(2 * N, 0);

    for (int node = 1; node <= N - 1; ++node) {
      // recompute the argmax exactly as the plaintext certifier
      std::int64_t best_gain = 0;
      int best_f = 0, best_b = 1;
      bool have = false;
      std::vector<std::int64_t> gain_vals(static_cast<std::size_t>(d) * B);
      for (std::size_t f = 0; f < d; ++f) {
        std::int64_t g_tot = 0, h_tot = 0;
        for (int b = 1; b <= B; ++b) {
          g_tot += hists.gsum(static_cast<int>(f), node, b);
          h_tot += hists.hsum(static_cast<int>(f), node, b);
        }
        std::int64_t gl = 0, hl = 0;
        for (int b = 1; b <= B; ++b) {
          gl += hists.gsum(static_cast<int>(f), node, b - 1);
          hl += hists.hsum(static_cast<int>(f), node, b - 1);
          std::int64_t gain = split_gain(gl, hl, g_tot - gl, h_tot - hl,
                                         model.hp.lambda.raw,
                                         model.hp.gamma.raw, ds.cfg);
          gain_vals[f * B + (b - 1)] = gain;
          if (!have || best_gain < gain) {
            have = true;
            best_gain = gain;
            best_f = static_cast<int>(f);
            best_b = b;
          }
        }
      }

      WireId best_f_w = tr.alloc(static_cast<Felt>(best_f));
      WireId best_b_w = tr.alloc(static_cast<Felt>(best_b));
      WireId best_gain_w = tr.alloc(enc(best_gain));
      // packed lex key of the argmax
      WireId best_key = derived(
          static_cast<Felt>(best_f) * (B + 1) + static_cast<Felt>(best_b),
          {{static_cast<Felt>(B + 1), best_f_w}, {1, best_b_w}}, 0);

      for (std::size_t f = 0; f < d; ++f) {
        std::int64_t g_tot = 0, h_tot = 0;
        std::vector<LinearTerm> gt_terms, ht_terms;
        for (int b = 1; b <= B; ++b) {
          g_tot += hists.gsum(static_cast<int>(f), node, b);
          h_tot += hists.hsum(static_cast<int>(f), node, b);
          gt_terms.push_back({1, hw.g[hw.idx(f, node, b)]});
          ht_terms.push_back({1, hw.h[hw.idx(f, node, b)]});
        }
        WireId G_tot = derived(enc(g_tot), std::move(gt_terms), 0);
        WireId H_tot = derived(enc(h_tot), std::move(ht_terms), 0);
        g_range(tr, G_tot, -square_bound, square_bound);
        WireId sq_tot = g_product(tr, G_tot, G_tot);
        WireId den_tot = derived(enc(h_tot + model.hp.lambda.raw), {{1, H_tot}},
                                 enc(model.hp.lambda.raw));
        std::int64_t term_tot =
            static_cast<std::int64_t>(static_cast<__int128>(g_tot) * g_tot /
                                      (h_tot + model.hp.lambda.raw));
        WireId t_tot = div_wire(sq_tot, den_tot, g_tot * g_tot,
                                h_tot + model.hp.lambda.raw);

        std::int64_t gl = 0, hl = 0;
        WireId GL = tr.constant(0), HL = tr.constant(0);
        for (int b = 1; b <= B; ++b) {
          std::int64_t pg = hists.gsum(static_cast<int>(f), node, b - 1);
          std::int64_t ph = hists.hsum(static_cast<int>(f), node, b - 1);
          gl += pg;
          hl += ph;
          if (b > 1) {
            GL = derived(enc(gl), {{1, GL}, {1, hw.g[hw.idx(f, node, b - 1)]}}, 0);
            HL = derived(enc(hl), {{1, HL}, {1, hw.h[hw.idx(f, node, b - 1)]}}, 0);
          }
          std::int64_t gr = g_tot - gl, hr = h_tot - hl;
          WireId GR = derived(enc(gr), {{1, G_tot}, {neg(1), GL}}, 0);
          WireId HR = derived(enc(hr), {{1, H_tot}, {neg(1), HL}}, 0);

          g_range(tr, GL, -square_bound, square_bound);
          g_range(tr, GR, -square_bound, square_bound);

          WireId sq_l = g_product(tr, GL, GL);
          WireId den_l =
              derived(enc(hl + model.hp.lambda.raw), {{1, HL}},
                      enc(model.hp.lambda.raw));
          WireId t_l = div_wire(sq_l, den_l, gl * gl, hl + model.hp.lambda.raw);
          WireId sq_r = g_product(tr, GR, GR);
          WireId den_r =
              derived(enc(hr + model.hp.lambda.raw), {{1, HR}},
                      enc(model.hp.lambda.raw));
          WireId t_r = div_wire(sq_r, den_r, gr * gr, hr + model.hp.lambda.raw);

          std::int64_t term_l =
              static_cast<std::int64_t>(static_cast<__int128>(gl) * gl /
                                        (hl + model.hp.lambda.raw));
          std::int64_t term_r =
              static_cast<std::int64_t>(static_cast<__int128>(gr) * gr /
                                        (hr + model.hp.lambda.raw));
          std::int64_t sum_val = term_l + term_r - term_tot;
          WireId sum =
              derived(enc(sum_val), {{1, t_l}, {1, t_r}, {neg(1), t_tot}}, 0);
          WireId half = trunc_wire(sum, sum_val, 1);
          std::int64_t gain_val = gain_vals[f * B + (b - 1)];
          WireId gain = derived(enc(gain_val), {{1, half}},
                                neg(enc(model.hp.gamma.raw)));

          // argmax sweep: never better than best, ties must be lex-after
          WireId better = g_compare(tr, best_gain_w, gain);
          tr.equal(better, 0);
          WireId diff = derived(f_sub(enc(best_gain), enc(gain_val)),
                                {{1, best_gain_w}, {neg(1), gain}}, 0);
          WireId tie = g_not(tr, g_nonzero(tr, diff));
          WireId key = tr.constant(static_cast<Felt>(f) * (B + 1) +
                                   static_cast<Felt>(b));
          WireId lex_violation = g_compare(tr, key, best_key);
          g_product_zero(tr, tie, lex_violation);

          if (static_cast<int>(f) == best_f && b == best_b)
            tr.linear({{1, best_gain_w}, {neg(1), gain}}, 0);
        }
      }

      // terminal flag: own prune condition or inherited from the parent
      WireId positive = g_compare(tr, tr.constant(0), best_gain_w);  // 0 < gain*
      WireId e_own = g_not(tr, positive);
      WireId e;
      if (node == 1) {
        e = e_own;
      } else {
        WireId e_par = terminal[node / 2];
        WireId both = g_product(tr, e_own, e_par);
        Felt e_val = f_sub(f_add(tr.value(e_own), tr.value(e_par)),
                           tr.value(both));
        e = derived(e_val, {{1, e_own}, {1, e_par}, {neg(1), both}}, 0);
      }
      terminal[node] = e;

      WireId ne = g_not(tr, e);
      WireId f_model = treew[k - 1].feat[node - 1];
      WireId t_model = treew[k - 1].thresh[node - 1];

      // real node: committed split must equal the argmax and its edge
      WireId df = derived(f_sub(tr.value(f_model), tr.value(best_f_w)),
                          {{1, f_model}, {neg(1), best_f_w}}, 0);
      g_product_zero(tr, ne, df);
      std::int64_t tstar_val =
          bins.edge(static_cast<std::size_t>(best_f), best_b);
      WireId tstar = tr.alloc(enc(tstar_val));
      WireId ecomp = derived(
          static_cast<Felt>(best_f) * ke_feat + static_cast<Felt>(best_b) * ke_bin +
              static_cast<Felt>(tstar_val + mx),
          {{ke_feat, best_f_w}, {ke_bin, best_b_w}, {1, tstar}},
          static_cast<Felt>(mx));
      tr.lookup(edges_table, ecomp);
      WireId dt = derived(f_sub(tr.value(t_model), tr.value(tstar)),
                          {{1, t_model}, {neg(1), tstar}}, 0);
      g_product_zero(tr, ne, dt);

      // pruned node: committed split must carry the dummy values
      g_product_zero(tr, e, f_model);  // dummy feature index is 0
      WireId ddt = derived(f_sub(tr.value(t_model), enc(kDummyThreshold)),
                           {{1, t_model}}, neg(enc(kDummyThreshold)));
      g_product_zero(tr, e, ddt);
    }
  }

  void run() {
    setup_packing();
    prewarm_constants();
    bin_domain_table = [&] {
      std::vector<Felt> dom;
      for (int b = 1; b <= B; ++b) dom.push_back(static_cast<Felt>(b));
      return tr.add_table(std::move(dom));
    }();

    commit_inputs();
    build_x_table();
    build_tree_tables();
    BinTable bins = prebin(ds, B);
    prebin_section(bins);
    logit_section();
    scores_section();

    for (int k = 1; k <= m; ++k) {
      std::vector<std::int64_t> z_prev(la.score.begin() + (k - 1) * n,
                                       la.score.begin() + k * n);
      NodeHistograms hists = init_hists(z_prev, ds.y, bins,
                                        &la.leaf[(k - 1) * n], ds.cfg, h);
      HistWires hwires = hist_section(k, hists);
      leaf_weights_section(k, hwires, hists);
      splits_section(k, hwires, hists, bins);
    }
  }
};

}  // namespace

Transcript compile_cert(const Dataset& ds, const Model& model,
                        const LeafAssignment* assignment,
                        const std::array<std::uint8_t, 32>& statement_digest,
                        GadgetParams params) {
  if (!params.valid()) throw CompileError("invalid gadget params");
  CertReport pre = certify(ds, model, assignment);
  if (!pre.accepted)
    throw CompileError("refusing to compile: certification rejects the model");

  LeafAssignment derived_assignment;
  const LeafAssignment* la = assignment;
  if (!la) {
    derived_assignment = derive_assignment(ds, model);
    la = &derived_assignment;
  }

  Compiler c(ds, model, *la, params);
  c.tr.set_statement(statement_digest);
  c.run();
  return std::move(c.tr);
}

}  // namespace gbcert::cs
