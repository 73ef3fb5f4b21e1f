// Copyright 2026 The mempart Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Crossbar geometry, column addressing and the operation data model.
//
// A crossbar has n_cols bitlines split into k equal partitions by k-1
// transistors. One operation occupies one cycle: the transistors divide the
// partitions into sections, and each section hosts at most one gate that is
// applied to every row at once.

#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mempart {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr bool is_pow2(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

constexpr unsigned log2_exact(std::uint64_t v) {
  unsigned r = 0;
  while (v > 1) {
    v >>= 1;
    ++r;
  }
  return r;
}

struct CrossbarConfig {
  std::size_t n_rows = 1;
  std::size_t n_cols = 0;
  std::size_t k = 1;
  bool enforce_init = true;

  std::size_t width() const { return n_cols / k; }

  void validate() const {
    if (n_rows == 0) throw Error("crossbar: n_rows must be positive");
    if (k == 0) throw Error("crossbar: k must be at least 1");
    if (n_cols == 0 || n_cols % k != 0)
      throw Error("crossbar: n_cols must be a positive multiple of k");
    if (n_cols / k < 2) throw Error("crossbar: partitions need at least 2 columns");
    if (!is_pow2(n_cols) || !is_pow2(k))
      throw Error("crossbar: n_cols and k must be powers of two");
  }

  static CrossbarConfig make(std::size_t rows, std::size_t cols, std::size_t parts,
                             bool enforce_init = true) {
    CrossbarConfig cfg{rows, cols, parts, enforce_init};
    cfg.validate();
    return cfg;
  }
};

/// A column addressed by partition and offset inside the partition. The
/// default ordering matches absolute column order.
struct ColumnRef {
  std::uint32_t partition = 0;
  std::uint32_t intra = 0;

  friend auto operator<=>(const ColumnRef&, const ColumnRef&) = default;
};

inline bool in_bounds(ColumnRef ref, const CrossbarConfig& cfg) {
  return ref.partition < cfg.k && ref.intra < cfg.width();
}

inline std::size_t column_of(ColumnRef ref, const CrossbarConfig& cfg) {
  if (!in_bounds(ref, cfg))
    throw Error("column reference [" + std::to_string(ref.partition) + "," +
                std::to_string(ref.intra) + "] is outside the crossbar");
  return static_cast<std::size_t>(ref.partition) * cfg.width() + ref.intra;
}

inline ColumnRef column_ref(std::size_t column, const CrossbarConfig& cfg) {
  if (column >= cfg.n_cols)
    throw Error("column " + std::to_string(column) + " is outside the crossbar");
  return {static_cast<std::uint32_t>(column / cfg.width()),
          static_cast<std::uint32_t>(column % cfg.width())};
}

enum class GateKind : std::uint8_t { Nor2, Not, Init1, Init0 };

inline const char* to_string(GateKind kind) {
  switch (kind) {
    case GateKind::Nor2: return "NOR2";
    case GateKind::Not: return "NOT";
    case GateKind::Init1: return "INIT1";
    case GateKind::Init0: return "INIT0";
  }
  return "?";
}

inline std::optional<GateKind> gate_kind_from_string(const std::string& s) {
  if (s == "NOR2") return GateKind::Nor2;
  if (s == "NOT") return GateKind::Not;
  if (s == "INIT1") return GateKind::Init1;
  if (s == "INIT0") return GateKind::Init0;
  return std::nullopt;
}

inline bool is_init(GateKind kind) {
  return kind == GateKind::Init1 || kind == GateKind::Init0;
}

/// One gate. Canonical form: NOR2 inputs are ordered (in_a < in_b), NOT
/// repeats its input in in_b, and INIT gates repeat out in both inputs, so
/// the partition span is always the min/max over the three fields.
struct Gate {
  GateKind kind = GateKind::Nor2;
  ColumnRef in_a;
  ColumnRef in_b;
  ColumnRef out;

  static Gate nor(ColumnRef a, ColumnRef b, ColumnRef out) {
    if (b < a) std::swap(a, b);
    return {GateKind::Nor2, a, b, out};
  }
  static Gate inv(ColumnRef a, ColumnRef out) { return {GateKind::Not, a, a, out}; }
  static Gate init1(ColumnRef out) { return {GateKind::Init1, out, out, out}; }
  static Gate init0(ColumnRef out) { return {GateKind::Init0, out, out, out}; }

  std::uint32_t lo_partition() const {
    return std::min({in_a.partition, in_b.partition, out.partition});
  }
  std::uint32_t hi_partition() const {
    return std::max({in_a.partition, in_b.partition, out.partition});
  }

  friend auto operator<=>(const Gate&, const Gate&) = default;
};

/// Rewrites a gate into canonical form (see Gate).
inline Gate canonical(Gate g) {
  switch (g.kind) {
    case GateKind::Nor2:
      if (g.in_b < g.in_a) std::swap(g.in_a, g.in_b);
      break;
    case GateKind::Not:
      g.in_b = g.in_a;
      break;
    case GateKind::Init1:
    case GateKind::Init0:
      g.in_a = g.in_b = g.out;
      break;
  }
  return g;
}

/// isolate[i] == true means the transistor between partitions i and i+1 is
/// non-conducting, i.e. a section boundary.
struct SectionDivision {
  std::vector<bool> isolate;

  static SectionDivision all(std::size_t k, bool value) {
    return {std::vector<bool>(k == 0 ? 0 : k - 1, value)};
  }

  /// Inclusive partition intervals, left to right.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> sections() const {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    std::uint32_t start = 0;
    for (std::uint32_t i = 0; i < isolate.size(); ++i) {
      if (isolate[i]) {
        out.emplace_back(start, i);
        start = i + 1;
      }
    }
    out.emplace_back(start, static_cast<std::uint32_t>(isolate.size()));
    return out;
  }

  /// Index of the section holding each partition.
  std::vector<std::uint32_t> section_ids() const {
    std::vector<std::uint32_t> ids(isolate.size() + 1, 0);
    for (std::size_t i = 0; i < isolate.size(); ++i)
      ids[i + 1] = ids[i] + (isolate[i] ? 1 : 0);
    return ids;
  }

  friend bool operator==(const SectionDivision&, const SectionDivision&) = default;
};

struct Operation {
  std::vector<Gate> gates;
  SectionDivision division;

  /// Gates in canonical form, sorted by position.
  Operation canonicalized() const {
    Operation op{gates, division};
    for (auto& g : op.gates) g = canonical(g);
    std::sort(op.gates.begin(), op.gates.end(), [](const Gate& a, const Gate& b) {
      if (a.lo_partition() != b.lo_partition()) return a.lo_partition() < b.lo_partition();
      return a < b;
    });
    return op;
  }

  friend bool operator==(const Operation& a, const Operation& b) {
    if (a.division != b.division || a.gates.size() != b.gates.size()) return false;
    return a.canonicalized().gates == b.canonicalized().gates;
  }
};

/// Stable textual key of an operation (canonical gates plus division), for
/// hashing and deduplication.
inline std::string key(const Operation& op) {
  const auto c = op.canonicalized();
  std::string s;
  s.reserve(c.gates.size() * 14 + c.division.isolate.size() + 1);
  for (bool b : c.division.isolate) s.push_back(b ? '1' : '0');
  s.push_back('|');
  for (const auto& g : c.gates) {
    s += std::to_string(static_cast<int>(g.kind));
    for (auto r : {g.in_a, g.in_b, g.out}) {
      s.push_back(':');
      s += std::to_string(r.partition);
      s.push_back('.');
      s += std::to_string(r.intra);
    }
    s.push_back(';');
  }
  return s;
}

struct Program {
  std::vector<Operation> operations;

  std::size_t size() const { return operations.size(); }
  void append(const Program& other) {
    operations.insert(operations.end(), other.operations.begin(), other.operations.end());
  }
  friend bool operator==(const Program&, const Program&) = default;
};

enum class CycleKind { Empty, Logic, Init1, Init0, Mixed };

inline CycleKind cycle_kind(const Operation& op) {
  if (op.gates.empty()) return CycleKind::Empty;
  auto of = [](GateKind k) {
    switch (k) {
      case GateKind::Init1: return CycleKind::Init1;
      case GateKind::Init0: return CycleKind::Init0;
      default: return CycleKind::Logic;
    }
  };
  CycleKind kind = of(op.gates.front().kind);
  for (const auto& g : op.gates)
    if (of(g.kind) != kind) return CycleKind::Mixed;
  return kind;
}

enum class Violation {
  None,
  EmptyOperation,
  BadDivision,
  OutOfRange,
  MalformedGate,
  DuplicateInput,
  OutputAliasesInput,
  CrossesBoundary,
  SharedSection,
  MixedCycleKind,
  OverlappingSpans,
  // Model restrictions.
  NotTight,
  NonIdenticalIndices,
  SplitInput,
  MixedDirection,
  NonUniformDistance,
  Aperiodic,
  SerialOnly,
};

inline const char* to_string(Violation v) {
  switch (v) {
    case Violation::None: return "ok";
    case Violation::EmptyOperation: return "empty operation";
    case Violation::BadDivision: return "bad division";
    case Violation::OutOfRange: return "out of range";
    case Violation::MalformedGate: return "malformed gate";
    case Violation::DuplicateInput: return "duplicate input";
    case Violation::OutputAliasesInput: return "output aliases input";
    case Violation::CrossesBoundary: return "gate crosses boundary";
    case Violation::SharedSection: return "shared section";
    case Violation::MixedCycleKind: return "mixed cycle kind";
    case Violation::OverlappingSpans: return "overlapping spans";
    case Violation::NotTight: return "division not tight";
    case Violation::NonIdenticalIndices: return "non-identical indices";
    case Violation::SplitInput: return "split input";
    case Violation::MixedDirection: return "direction";
    case Violation::NonUniformDistance: return "non-uniform distance";
    case Violation::Aperiodic: return "aperiodic";
    case Violation::SerialOnly: return "not a single-gate serial operation";
  }
  return "?";
}

struct Verdict {
  Violation reason = Violation::None;
  std::string detail;

  bool ok() const { return reason == Violation::None; }
  explicit operator bool() const { return ok(); }

  static Verdict fail(Violation v, std::string detail = {}) { return {v, std::move(detail)}; }
};

/// The tight division of a gate set: every boundary strictly inside some
/// gate's partition span conducts, all others isolate.
inline SectionDivision tight_division(const std::vector<Gate>& gates, const CrossbarConfig& cfg) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> spans;
  spans.reserve(gates.size());
  for (const auto& g : gates) {
    if (g.hi_partition() >= cfg.k) throw Error("tight_division: gate outside the crossbar");
    spans.emplace_back(g.lo_partition(), g.hi_partition());
  }
  std::sort(spans.begin(), spans.end());
  for (std::size_t i = 1; i < spans.size(); ++i)
    if (spans[i].first <= spans[i - 1].second)
      throw Error("tight_division: gate spans overlap");
  auto div = SectionDivision::all(cfg.k, true);
  for (auto [lo, hi] : spans)
    for (auto b = lo; b < hi; ++b) div.isolate[b] = false;
  return div;
}

inline Verdict check_gate(const Gate& g, const CrossbarConfig& cfg) {
  if (!in_bounds(g.in_a, cfg) || !in_bounds(g.in_b, cfg) || !in_bounds(g.out, cfg))
    return Verdict::fail(Violation::OutOfRange);
  switch (g.kind) {
    case GateKind::Nor2:
      if (g.in_a == g.in_b) return Verdict::fail(Violation::DuplicateInput, "use NOT");
      if (g.out == g.in_a || g.out == g.in_b) return Verdict::fail(Violation::OutputAliasesInput);
      break;
    case GateKind::Not:
      if (g.in_b != g.in_a) return Verdict::fail(Violation::MalformedGate, "NOT with two inputs");
      if (g.out == g.in_a) return Verdict::fail(Violation::OutputAliasesInput);
      break;
    case GateKind::Init1:
    case GateKind::Init0:
      if (g.in_a != g.out || g.in_b != g.out)
        return Verdict::fail(Violation::MalformedGate, "INIT with inputs");
      break;
  }
  return {};
}

/// Physical legality of one cycle: every gate well-formed and contained in a
/// single section, at most one gate per section, and a single cycle kind
/// (logic, or one write level) across the crossbar.
inline Verdict validate_physical(const Operation& op, const CrossbarConfig& cfg) {
  if (op.division.isolate.size() + 1 != cfg.k)
    return Verdict::fail(Violation::BadDivision, "division size does not match k");
  if (op.gates.empty()) return Verdict::fail(Violation::EmptyOperation);
  for (const auto& g : op.gates)
    if (auto v = check_gate(g, cfg); !v) return v;
  if (cycle_kind(op) == CycleKind::Mixed) return Verdict::fail(Violation::MixedCycleKind);
  const auto ids = op.division.section_ids();
  std::vector<bool> used(ids.back() + 1, false);
  for (const auto& g : op.gates) {
    const auto sec = ids[g.lo_partition()];
    if (ids[g.hi_partition()] != sec) return Verdict::fail(Violation::CrossesBoundary);
    if (used[sec]) return Verdict::fail(Violation::SharedSection);
    used[sec] = true;
  }
  return {};
}

}  // namespace mempart
