#include "gbcert/cs/transcript.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace gbcert::cs {

std::uint32_t Transcript::add_table(std::vector<Felt> sorted_values) {
  tables_.push_back(std::move(sorted_values));
  return static_cast<std::uint32_t>(tables_.size() - 1);
}

std::uint32_t Transcript::range_table(int bits) {
  auto it = range_table_cache_.find(bits);
  if (it != range_table_cache_.end()) return it->second;
  if (bits < 0 || bits > 22)
    throw std::invalid_argument("range table too large to materialize");
  std::vector<Felt> vals(std::size_t{1} << bits);
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = i;
  std::uint32_t id = add_table(std::move(vals));
  range_table_cache_.emplace(bits, id);
  return id;
}

VerifyResult verify_transcript(const Transcript& tr, Felt challenge) {
  VerifyResult res;
  const auto& wires = tr.wires();
  const auto& cs = tr.constraints();

  auto wire_ok = [&](WireId w) { return w < wires.size(); };

  Felt batch = 0;
  Felt power = 1;
  bool direct_ok = true;
  for (std::size_t j = 0; j < cs.size(); ++j) {
    const Constraint& c = cs[j];
    bool ok = true;
    switch (c.kind) {
      case Constraint::Kind::Linear: {
        Felt acc = c.constant % kPrime;
        for (const LinearTerm& t : c.terms) {
          if (!wire_ok(t.wire)) {
            ok = false;
            break;
          }
          acc = f_add(acc, f_mul(t.coeff % kPrime, wires[t.wire]));
        }
        ok = ok && acc == 0;
        break;
      }
      case Constraint::Kind::Mul: {
        if (!wire_ok(c.a) || !wire_ok(c.b) || !wire_ok(c.c)) {
          ok = false;
          break;
        }
        Felt prod = f_mul(wires[c.a], wires[c.b]);
        ok = prod == wires[c.c];
        Felt residual = f_sub(prod, wires[c.c]);
        batch = f_add(batch, f_mul(power, residual));
        power = f_mul(power, challenge);
        break;
      }
      case Constraint::Kind::Lookup: {
        if (!wire_ok(c.a) || c.table >= tr.table_count()) {
          ok = false;
          break;
        }
        const auto& t = tr.table(c.table);
        ok = std::binary_search(t.begin(), t.end(), wires[c.a]);
        break;
      }
      case Constraint::Kind::Equal: {
        ok = wire_ok(c.a) && wires[c.a] == c.constant % kPrime;
        break;
      }
    }
    if (!ok && direct_ok) {
      direct_ok = false;
      res.first_violation = static_cast<std::int64_t>(j);
    }
  }
  res.batch_ok = batch == 0;
  res.ok = direct_ok && res.batch_ok;
  return res;
}

namespace {

constexpr std::uint8_t kMagic[8] = {'G', 'B', 'C', 'T', 'R', 'N', 'S', '1'};
constexpr std::uint32_t kVersion = 1;

struct Writer {
  std::vector<std::uint8_t>& out;
  void u8(std::uint8_t v) { out.push_back(v); }
  void u32(std::uint32_t v) {
    for (int s = 0; s < 32; s += 8) out.push_back(std::uint8_t(v >> s));
  }
  void u64(std::uint64_t v) {
    for (int s = 0; s < 64; s += 8) out.push_back(std::uint8_t(v >> s));
  }
};

struct Reader {
  const std::vector<std::uint8_t>& in;
  std::size_t pos = 0;
  void need(std::size_t n) {
    if (pos + n > in.size()) throw std::runtime_error("truncated transcript");
  }
  std::uint8_t u8() {
    need(1);
    return in[pos++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int s = 0; s < 32; s += 8) v |= std::uint32_t(in[pos++]) << s;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int s = 0; s < 64; s += 8) v |= std::uint64_t(in[pos++]) << s;
    return v;
  }
};

}  // namespace

std::vector<std::uint8_t> serialize(const Transcript& tr) {
  std::vector<std::uint8_t> out;
  Writer w{out};
  out.insert(out.end(), kMagic, kMagic + 8);
  w.u32(kVersion);
  w.u32(tr.ram_substitution_flag ? 1 : 0);
  w.u64(kPrime);
  w.u32(static_cast<std::uint32_t>(tr.params().group_bits));
  w.u32(static_cast<std::uint32_t>(tr.params().group_count));
  w.u64(tr.params().max_denominator);
  w.u64(tr.params().max_quotient);
  w.u32(static_cast<std::uint32_t>(tr.frac_bits()));
  for (std::uint8_t b : tr.statement()) w.u8(b);
  w.u64(tr.data_linear_count());

  w.u64(tr.wire_count());
  for (Felt v : tr.wires()) w.u64(v);

  w.u32(static_cast<std::uint32_t>(tr.table_count()));
  for (std::size_t t = 0; t < tr.table_count(); ++t) {
    const auto& vals = tr.table(static_cast<std::uint32_t>(t));
    w.u64(vals.size());
    for (Felt v : vals) w.u64(v);
  }

  w.u64(tr.constraint_count());
  for (const Constraint& c : tr.constraints()) {
    w.u8(static_cast<std::uint8_t>(c.kind));
    switch (c.kind) {
      case Constraint::Kind::Linear:
        w.u32(static_cast<std::uint32_t>(c.terms.size()));
        for (const LinearTerm& t : c.terms) {
          w.u64(t.coeff);
          w.u32(t.wire);
        }
        w.u64(c.constant);
        break;
      case Constraint::Kind::Mul:
        w.u32(c.a);
        w.u32(c.b);
        w.u32(c.c);
        break;
      case Constraint::Kind::Lookup:
        w.u32(c.table);
        w.u32(c.a);
        break;
      case Constraint::Kind::Equal:
        w.u32(c.a);
        w.u64(c.constant);
        break;
    }
  }
  return out;
}

Transcript deserialize(const std::vector<std::uint8_t>& bytes) {
  Reader r{bytes};
  r.need(8);
  for (int i = 0; i < 8; ++i)
    if (bytes[i] != kMagic[i]) throw std::runtime_error("bad transcript magic");
  r.pos = 8;
  if (r.u32() != kVersion) throw std::runtime_error("unsupported transcript version");
  std::uint32_t flags = r.u32();
  if (r.u64() != kPrime) throw std::runtime_error("transcript field mismatch");

  GadgetParams params;
  params.group_bits = static_cast<int>(r.u32());
  params.group_count = static_cast<int>(r.u32());
  params.max_denominator = r.u64();
  params.max_quotient = r.u64();
  int frac_bits = static_cast<int>(r.u32());
  if (!params.valid()) throw std::runtime_error("transcript gadget params invalid");

  Transcript tr(params, frac_bits);
  tr.ram_substitution_flag = (flags & 1) != 0;
  std::array<std::uint8_t, 32> st{};
  for (auto& b : st) b = r.u8();
  tr.set_statement(st);
  std::uint64_t data_linear = r.u64();

  std::uint64_t wires = r.u64();
  if (wires > (std::uint64_t{1} << 32)) throw std::runtime_error("wire count");
  for (std::uint64_t i = 0; i < wires; ++i) {
    Felt v = r.u64();
    if (v >= kPrime) throw std::runtime_error("wire value out of field");
    tr.alloc(v);
  }

  std::uint32_t tables = r.u32();
  for (std::uint32_t t = 0; t < tables; ++t) {
    std::uint64_t len = r.u64();
    if (len > (std::uint64_t{1} << 28)) throw std::runtime_error("table size");
    std::vector<Felt> vals(len);
    for (auto& v : vals) v = r.u64();
    if (!std::is_sorted(vals.begin(), vals.end()))
      throw std::runtime_error("lookup table not sorted");
    tr.add_table(std::move(vals));
  }

  std::uint64_t n = r.u64();
  for (std::uint64_t j = 0; j < n; ++j) {
    auto kind = static_cast<Constraint::Kind>(r.u8());
    switch (kind) {
      case Constraint::Kind::Linear: {
        std::uint32_t terms = r.u32();
        std::vector<LinearTerm> ts(terms);
        for (auto& t : ts) {
          t.coeff = r.u64();
          t.wire = r.u32();
        }
        Felt constant = r.u64();
        tr.linear(std::move(ts), constant);
        break;
      }
      case Constraint::Kind::Mul: {
        WireId a = r.u32(), b = r.u32(), c = r.u32();
        tr.mul(a, b, c);
        break;
      }
      case Constraint::Kind::Lookup: {
        std::uint32_t table = r.u32();
        WireId wire = r.u32();
        tr.lookup(table, wire);
        break;
      }
      case Constraint::Kind::Equal: {
        WireId wire = r.u32();
        Felt constant = r.u64();
        tr.equal(wire, constant);
        break;
      }
      default:
        throw std::runtime_error("unknown constraint kind");
    }
  }
  if (r.pos != bytes.size()) throw std::runtime_error("trailing transcript bytes");

  // The counter is informational; replay keeps the recorded figure.
  (void)data_linear;
  tr.set_data_linear(data_linear);
  return tr;
}

void save_transcript(const Transcript& tr, const std::string& path) {
  std::vector<std::uint8_t> bytes = serialize(tr);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write transcript: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

Transcript load_transcript(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open transcript: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace gbcert::cs
