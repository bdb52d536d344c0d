#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gbcert/dataset.hpp"
#include "gbcert/train.hpp"

namespace gbcert {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(const std::uint8_t* data, std::size_t len);
Digest sha256(const std::vector<std::uint8_t>& data);

std::string hex(const Digest& d);
Digest from_hex(const std::string& s);

// Domain tags are frozen; changing one invalidates every stored digest.
inline constexpr char kCommitTag[] = "gbcert/commit/v1";
inline constexpr char kStatementTag[] = "gbcert/statement/v1";

/// Hash commitment: digest = H(tag || len || bytes || r). The randomness
/// provides hiding; binding rests on the hash.
struct Commitment {
  Digest digest{};
  Digest randomness{};  // held by the committer
};

Commitment commit(const std::vector<std::uint8_t>& bytes, const Digest& randomness);
bool verify_open(const Digest& digest, const std::vector<std::uint8_t>& bytes,
                 const Digest& randomness);

/// Public statement binding a transcript to the committed artifacts.
Digest statement(const Digest& dataset_commitment, const Digest& model_commitment);

/// Deterministic platform-independent encodings (little-endian, fixed field
/// order); these are the preimages of the commitments.
std::vector<std::uint8_t> canonical_bytes(const Dataset& ds);
std::vector<std::uint8_t> canonical_bytes(const Model& model);

Digest randomness_from_seed(std::uint64_t seed, const std::string& role);

}  // namespace gbcert
