#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gbcert/field.hpp"

namespace gbcert::cs {

/// An arithmetic-constraint transcript over F_p: committed wire values plus
/// the constraints a verifier replays. Wire values stand in for authenticated
/// commitments; there is no MAC layer, the gadget constraint systems are the
/// object under test.

using WireId = std::uint32_t;

struct LinearTerm {
  Felt coeff;
  WireId wire;
};

struct Constraint {
  enum class Kind : std::uint8_t { Linear = 0, Mul = 1, Lookup = 2, Equal = 3 };
  Kind kind = Kind::Linear;
  // Linear: sum coeff*wire + constant == 0.
  std::vector<LinearTerm> terms;
  Felt constant = 0;
  // Mul: value(a) * value(b) == value(c).
  WireId a = 0, b = 0, c = 0;
  // Lookup: value(a) is a member of tables[table].
  std::uint32_t table = 0;
};

struct VerifyResult {
  bool ok = false;
  std::int64_t first_violation = -1;  // constraint index, -1 if none
  bool batch_ok = false;              // random-linear-combination Mul check
};

class Transcript {
 public:
  explicit Transcript(GadgetParams params = {}, int frac_bits = 20)
      : params_(params), frac_bits_(frac_bits) {}

  WireId alloc(Felt value) {
    values_.push_back(value);
    return static_cast<WireId>(values_.size() - 1);
  }

  /// Equal-pinned public constant; repeated values share one wire.
  WireId constant(Felt value) {
    auto it = const_cache_.find(value);
    if (it != const_cache_.end()) return it->second;
    WireId w = alloc(value);
    equal(w, value);
    const_cache_.emplace(value, w);
    return w;
  }

  Felt value(WireId w) const { return values_[w]; }
  void poke(WireId w, Felt v) { values_[w] = v; }  // mutation tests only
  std::size_t wire_count() const { return values_.size(); }
  std::size_t constraint_count() const { return constraints_.size(); }
  std::uint64_t data_linear_count() const { return data_linear_; }
  void set_data_linear(std::uint64_t v) { data_linear_ = v; }  // deserialization

  void linear(std::vector<LinearTerm> terms, Felt constant_term) {
    Constraint c;
    c.kind = Constraint::Kind::Linear;
    c.terms = std::move(terms);
    c.constant = constant_term;
    push(std::move(c));
  }

  void mul(WireId a, WireId b, WireId c) {
    Constraint k;
    k.kind = Constraint::Kind::Mul;
    k.a = a;
    k.b = b;
    k.c = c;
    push(std::move(k));
  }

  void lookup(std::uint32_t table, WireId w) {
    Constraint k;
    k.kind = Constraint::Kind::Lookup;
    k.a = w;
    k.table = table;
    push(std::move(k));
  }

  void equal(WireId w, Felt constant_value) {
    Constraint k;
    k.kind = Constraint::Kind::Equal;
    k.a = w;
    k.constant = constant_value;
    push(std::move(k));
  }

  /// Sorted-list lookup table; returns its id. Range tables [0, 2^k) cache.
  std::uint32_t add_table(std::vector<Felt> sorted_values);
  std::uint32_t range_table(int bits);

  const std::vector<Felt>& table(std::uint32_t id) const { return tables_[id]; }
  std::size_t table_count() const { return tables_.size(); }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const std::vector<Felt>& wires() const { return values_; }

  const GadgetParams& params() const { return params_; }
  int frac_bits() const { return frac_bits_; }

  void set_statement(const std::array<std::uint8_t, 32>& s) { statement_ = s; }
  const std::array<std::uint8_t, 32>& statement() const { return statement_; }

  // Constraints recorded while a DataLinearScope is alive count toward the
  // portion that scales with the number of samples.
  class DataLinearScope {
   public:
    explicit DataLinearScope(Transcript& tr) : tr_(tr) { ++tr_.scope_depth_; }
    ~DataLinearScope() { --tr_.scope_depth_; }
    DataLinearScope(const DataLinearScope&) = delete;
    DataLinearScope& operator=(const DataLinearScope&) = delete;

   private:
    Transcript& tr_;
  };

  bool ram_substitution_flag = true;  // lookups + recount stand in for ZK-RAM

 private:
  friend class DataLinearScope;

  void push(Constraint c) {
    constraints_.push_back(std::move(c));
    if (scope_depth_ > 0) ++data_linear_;
  }

  GadgetParams params_;
  int frac_bits_;
  std::vector<Felt> values_;
  std::vector<Constraint> constraints_;
  std::vector<std::vector<Felt>> tables_;
  std::map<Felt, WireId> const_cache_;
  std::map<int, std::uint32_t> range_table_cache_;
  std::array<std::uint8_t, 32> statement_{};
  std::uint64_t data_linear_ = 0;
  int scope_depth_ = 0;
};

/// Replays every constraint. Mul constraints are checked twice: one by one,
/// and aggregated as sum chi^j (a_j b_j - c_j) with the caller's challenge.
VerifyResult verify_transcript(const Transcript& tr, Felt challenge);

std::vector<std::uint8_t> serialize(const Transcript& tr);
Transcript deserialize(const std::vector<std::uint8_t>& bytes);

void save_transcript(const Transcript& tr, const std::string& path);
Transcript load_transcript(const std::string& path);

}  // namespace gbcert::cs
