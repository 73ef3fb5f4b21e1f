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

// Legality of an operation under the partition control models.
//
//   serial     one gate, every transistor conducting (the no-partition wire)
//   unlimited  any physically valid operation
//   standard   shared intra-partition indices, no split inputs, one
//              direction, tight division
//   minimal    standard plus one partition distance and periodic placement

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mempart/crossbar.hpp"

namespace mempart {

enum class Model { Serial, Unlimited, Standard, Minimal };

inline const char* to_string(Model m) {
  switch (m) {
    case Model::Serial: return "serial";
    case Model::Unlimited: return "unlimited";
    case Model::Standard: return "standard";
    case Model::Minimal: return "minimal";
  }
  return "?";
}

inline std::optional<Model> model_from_string(const std::string& s) {
  if (s == "serial" || s == "baseline") return Model::Serial;
  if (s == "unlimited") return Model::Unlimited;
  if (s == "standard") return Model::Standard;
  if (s == "minimal") return Model::Minimal;
  return std::nullopt;
}

enum class Direction : std::uint8_t { InputsLeftOfOutputs, OutputsLeftOfInputs, Degenerate };

inline Direction direction_of(const Gate& g) {
  if (is_init(g.kind) || g.in_a.partition == g.out.partition) return Direction::Degenerate;
  return g.in_a.partition < g.out.partition ? Direction::InputsLeftOfOutputs
                                            : Direction::OutputsLeftOfInputs;
}

inline std::uint32_t distance_of(const Gate& g) {
  return g.in_a.partition > g.out.partition ? g.in_a.partition - g.out.partition
                                            : g.out.partition - g.in_a.partition;
}

/// Shared intra-partition index triple of a standard-model operation.
struct IndexTuple {
  std::uint32_t in_a = 0;
  std::uint32_t in_b = 0;
  std::uint32_t out = 0;
  friend auto operator<=>(const IndexTuple&, const IndexTuple&) = default;
};

inline IndexTuple index_tuple(const Gate& g) {
  const Gate c = canonical(g);
  return {c.in_a.intra, c.in_b.intra, c.out.intra};
}

inline Verdict is_legal_unlimited(const Operation& op, const CrossbarConfig& cfg) {
  return validate_physical(op, cfg);
}

inline Verdict is_legal_serial(const Operation& op, const CrossbarConfig& cfg) {
  if (auto v = validate_physical(op, cfg); !v) return v;
  if (op.gates.size() != 1) return Verdict::fail(Violation::SerialOnly, "more than one gate");
  for (bool b : op.division.isolate)
    if (b) return Verdict::fail(Violation::SerialOnly, "isolating transistor");
  return {};
}

inline Verdict is_legal_standard(const Operation& op, const CrossbarConfig& cfg) {
  if (auto v = validate_physical(op, cfg); !v) return v;
  for (const auto& g : op.gates)
    if (g.in_a.partition != g.in_b.partition) return Verdict::fail(Violation::SplitInput);
  const IndexTuple tuple = index_tuple(op.gates.front());
  for (const auto& g : op.gates)
    if (index_tuple(g) != tuple) return Verdict::fail(Violation::NonIdenticalIndices);
  std::optional<Direction> dir;
  for (const auto& g : op.gates) {
    const auto d = direction_of(g);
    if (d == Direction::Degenerate) continue;
    if (dir && *dir != d) return Verdict::fail(Violation::MixedDirection);
    dir = d;
  }
  if (op.division != tight_division(op.gates, cfg)) return Verdict::fail(Violation::NotTight);
  return {};
}

/// Parameters of a minimal-model operation. period is T in [1, k]; inputs sit
/// at p_start, p_start + T, ... up to p_end; outputs sit distance partitions
/// away along direction.
struct MinimalParams {
  CycleKind kind = CycleKind::Logic;
  IndexTuple index;
  std::uint32_t p_start = 0;
  std::uint32_t p_end = 0;
  std::uint32_t period = 1;
  std::uint32_t distance = 0;
  Direction direction = Direction::Degenerate;

  friend bool operator==(const MinimalParams&, const MinimalParams&) = default;
};

template <class T>
struct Checked {
  Verdict verdict;
  T value{};
  bool ok() const { return verdict.ok(); }
};

inline Checked<MinimalParams> infer_minimal_params(const Operation& op, const CrossbarConfig& cfg) {
  Checked<MinimalParams> r;
  if (r.verdict = is_legal_standard(op, cfg); !r.verdict) return r;
  const auto canon = op.canonicalized();
  const auto& gates = canon.gates;
  const auto d = distance_of(gates.front());
  for (const auto& g : gates)
    if (distance_of(g) != d) {
      r.verdict = Verdict::fail(Violation::NonUniformDistance);
      return r;
    }
  std::vector<std::uint32_t> inputs;
  for (const auto& g : gates) inputs.push_back(g.in_a.partition);
  // Gates are sorted by span start and share one direction and distance, so
  // input partitions come out ascending.
  std::uint32_t period = static_cast<std::uint32_t>(cfg.k);
  if (inputs.size() > 1) {
    period = inputs[1] - inputs[0];
    for (std::size_t i = 2; i < inputs.size(); ++i)
      if (inputs[i] - inputs[i - 1] != period) {
        r.verdict = Verdict::fail(Violation::Aperiodic);
        return r;
      }
  }
  auto& p = r.value;
  p.kind = cycle_kind(op);
  p.index = index_tuple(gates.front());
  p.p_start = inputs.front();
  p.p_end = inputs.back();
  p.period = period;
  p.distance = d;
  p.direction = Direction::Degenerate;
  for (const auto& g : gates)
    if (auto dir = direction_of(g); dir != Direction::Degenerate) p.direction = dir;
  return r;
}

/// Builds the operation described by a parameter set. Throws on parameters
/// that do not describe a physically valid operation.
inline Operation materialize(const MinimalParams& p, const CrossbarConfig& cfg) {
  if (p.period < 1 || p.period > cfg.k) throw Error("minimal: period out of range");
  if (p.p_start > p.p_end || p.p_end >= cfg.k) throw Error("minimal: bad partition range");
  if (p.distance >= cfg.k) throw Error("minimal: distance out of range");
  if (p.direction == Direction::Degenerate && p.distance != 0)
    throw Error("minimal: degenerate direction with nonzero distance");
  Operation op;
  for (std::uint32_t in = p.p_start; in <= p.p_end; in += p.period) {
    std::int64_t out = in;
    if (p.direction == Direction::InputsLeftOfOutputs) out += p.distance;
    if (p.direction == Direction::OutputsLeftOfInputs) out -= p.distance;
    if (out < 0 || out >= static_cast<std::int64_t>(cfg.k))
      throw Error("minimal: output partition outside the crossbar");
    const ColumnRef o{static_cast<std::uint32_t>(out), p.index.out};
    switch (p.kind) {
      case CycleKind::Init1: op.gates.push_back(Gate::init1(o)); break;
      case CycleKind::Init0: op.gates.push_back(Gate::init0(o)); break;
      case CycleKind::Logic:
        if (p.index.in_a == p.index.in_b)
          op.gates.push_back(Gate::inv({in, p.index.in_a}, o));
        else
          op.gates.push_back(Gate::nor({in, p.index.in_a}, {in, p.index.in_b}, o));
        break;
      default: throw Error("minimal: bad cycle kind");
    }
  }
  op.division = tight_division(op.gates, cfg);
  return op;
}

inline Verdict is_legal_minimal(const Operation& op, const CrossbarConfig& cfg) {
  return infer_minimal_params(op, cfg).verdict;
}

inline Verdict is_legal(Model m, const Operation& op, const CrossbarConfig& cfg) {
  switch (m) {
    case Model::Serial: return is_legal_serial(op, cfg);
    case Model::Unlimited: return is_legal_unlimited(op, cfg);
    case Model::Standard: return is_legal_standard(op, cfg);
    case Model::Minimal: return is_legal_minimal(op, cfg);
  }
  return Verdict::fail(Violation::BadDivision);
}

}  // namespace mempart
