#include "gbcert/commit.hpp"

#include <cstring>
#include <stdexcept>

namespace gbcert {

namespace {

// FIPS 180-4 SHA-256, unrolled enough to be obviously the standard schedule.
struct Sha256 {
  std::uint32_t h[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                        0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
  std::uint8_t buf[64];
  std::uint64_t total = 0;
  std::size_t fill = 0;

  static std::uint32_t rotr(std::uint32_t x, int n) {
    return (x >> n) | (x << (32 - n));
  }

  void block(const std::uint8_t* p) {
    static const std::uint32_t K[64] = {
        0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
        0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
        0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
        0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
        0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
        0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
        0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
        0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
        0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
        0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
        0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};
    std::uint32_t w[64];
    for (int i = 0; i < 16; ++i)
      w[i] = (std::uint32_t(p[4 * i]) << 24) | (std::uint32_t(p[4 * i + 1]) << 16) |
             (std::uint32_t(p[4 * i + 2]) << 8) | std::uint32_t(p[4 * i + 3]);
    for (int i = 16; i < 64; ++i) {
      std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
      std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
      w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }
    std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3];
    std::uint32_t e = h[4], f = h[5], g = h[6], hh = h[7];
    for (int i = 0; i < 64; ++i) {
      std::uint32_t S1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
      std::uint32_t ch = (e & f) ^ (~e & g);
      std::uint32_t t1 = hh + S1 + ch + K[i] + w[i];
      std::uint32_t S0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
      std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
      std::uint32_t t2 = S0 + maj;
      hh = g;
      g = f;
      f = e;
      e = d + t1;
      d = c;
      c = b;
      b = a;
      a = t1 + t2;
    }
    h[0] += a; h[1] += b; h[2] += c; h[3] += d;
    h[4] += e; h[5] += f; h[6] += g; h[7] += hh;
  }

  void update(const std::uint8_t* data, std::size_t len) {
    total += len;
    while (len) {
      std::size_t take = std::min(len, sizeof(buf) - fill);
      std::memcpy(buf + fill, data, take);
      fill += take;
      data += take;
      len -= take;
      if (fill == sizeof(buf)) {
        block(buf);
        fill = 0;
      }
    }
  }

  Digest finish() {
    std::uint64_t bits = total * 8;
    std::uint8_t pad = 0x80;
    update(&pad, 1);
    std::uint8_t zero = 0;
    while (fill != 56) update(&zero, 1);
    std::uint8_t lenbuf[8];
    for (int i = 0; i < 8; ++i)
      lenbuf[i] = static_cast<std::uint8_t>(bits >> (56 - 8 * i));
    update(lenbuf, 8);
    Digest out;
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 4; ++j)
        out[4 * i + j] = static_cast<std::uint8_t>(h[i] >> (24 - 8 * j));
    return out;
  }
};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int s = 0; s < 64; s += 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

void put_i64(std::vector<std::uint8_t>& out, std::int64_t v) {
  put_u64(out, static_cast<std::uint64_t>(v));
}

}  // namespace

Digest sha256(const std::uint8_t* data, std::size_t len) {
  Sha256 ctx;
  ctx.update(data, len);
  return ctx.finish();
}

Digest sha256(const std::vector<std::uint8_t>& data) {
  return sha256(data.data(), data.size());
}

std::string hex(const Digest& d) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(64);
  for (std::uint8_t b : d) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 15]);
  }
  return out;
}

Digest from_hex(const std::string& s) {
  if (s.size() != 64) throw std::invalid_argument("digest hex must be 64 chars");
  Digest out;
  auto nib = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw std::invalid_argument("bad hex digit");
  };
  for (std::size_t i = 0; i < 32; ++i)
    out[i] = static_cast<std::uint8_t>(nib(s[2 * i]) << 4 | nib(s[2 * i + 1]));
  return out;
}

Commitment commit(const std::vector<std::uint8_t>& bytes, const Digest& randomness) {
  Sha256 ctx;
  ctx.update(reinterpret_cast<const std::uint8_t*>(kCommitTag), sizeof(kCommitTag) - 1);
  std::vector<std::uint8_t> len;
  put_u64(len, bytes.size());
  ctx.update(len.data(), len.size());
  ctx.update(bytes.data(), bytes.size());
  ctx.update(randomness.data(), randomness.size());
  return Commitment{ctx.finish(), randomness};
}

bool verify_open(const Digest& digest, const std::vector<std::uint8_t>& bytes,
                 const Digest& randomness) {
  return commit(bytes, randomness).digest == digest;
}

Digest statement(const Digest& dataset_commitment, const Digest& model_commitment) {
  Sha256 ctx;
  ctx.update(reinterpret_cast<const std::uint8_t*>(kStatementTag),
             sizeof(kStatementTag) - 1);
  ctx.update(dataset_commitment.data(), dataset_commitment.size());
  ctx.update(model_commitment.data(), model_commitment.size());
  return ctx.finish();
}

std::vector<std::uint8_t> canonical_bytes(const Dataset& ds) {
  std::vector<std::uint8_t> out;
  out.reserve(32 + ds.rows + ds.x.size() * 8);
  out.insert(out.end(), {'G', 'B', 'D', 'S'});
  put_u32(out, 1);  // version
  put_u32(out, static_cast<std::uint32_t>(ds.cfg.frac_bits));
  put_u64(out, ds.rows);
  put_u64(out, ds.cols);
  for (std::uint8_t v : ds.y) out.push_back(v);
  for (std::int64_t v : ds.x) put_i64(out, v);
  return out;
}

std::vector<std::uint8_t> canonical_bytes(const Model& model) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), {'G', 'B', 'M', 'D'});
  put_u32(out, 1);  // version
  put_u32(out, static_cast<std::uint32_t>(model.cfg.frac_bits));
  put_u32(out, static_cast<std::uint32_t>(model.hp.trees));
  put_u32(out, static_cast<std::uint32_t>(model.hp.depth));
  put_u32(out, static_cast<std::uint32_t>(model.hp.bins));
  put_i64(out, model.hp.eta.raw);
  put_i64(out, model.hp.lambda.raw);
  put_i64(out, model.hp.gamma.raw);
  put_i64(out, model.hp.p_min.raw);
  put_i64(out, model.base_score);
  for (const Tree& t : model.trees) {
    for (std::int32_t f : t.split_feature)
      put_u32(out, static_cast<std::uint32_t>(f));
    for (std::int64_t v : t.threshold) put_i64(out, v);
    for (std::int64_t v : t.leaf_weight) put_i64(out, v);
  }
  return out;
}

Digest randomness_from_seed(std::uint64_t seed, const std::string& role) {
  std::vector<std::uint8_t> bytes;
  const char tag[] = "gbcert/randomness/v1";
  bytes.insert(bytes.end(), tag, tag + sizeof(tag) - 1);
  put_u64(bytes, seed);
  bytes.insert(bytes.end(), role.begin(), role.end());
  return sha256(bytes);
}

}  // namespace gbcert
