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

// Bit-exact controller messages.
//
// Field layouts, most significant bit first, in this order:
//
//   serial     in_a, in_b, out                       (log2 n bits each)
//   unlimited  isolate[0..k-2], then per partition
//              opcode(3), in_a, in_b, out            (log2(n/k) bits each)
//   standard   in_a, in_b, out, enable[0..k-1],
//              isolate[0..k-2], direction(1)
//   minimal    in_a, in_b, out, p_start, p_end,
//              period-1, distance (log2 k bits each), direction(1)
//
// Direction bit: 0 = inputs left of outputs, 1 = outputs left of inputs.
// The wire has no gate-kind field. NOT travels as in_a == in_b; INIT cycles
// reuse the output-only pattern and are told apart by a decode mode carried
// next to the message.

#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "mempart/crossbar.hpp"
#include "mempart/validators.hpp"

namespace mempart {

class DecodeError : public Error {
 public:
  using Error::Error;
};

using Bits = std::vector<bool>;

class BitWriter {
 public:
  void put(std::uint64_t value, unsigned width) {
    for (unsigned i = width; i-- > 0;) bits_.push_back((value >> i) & 1U);
  }
  void put_bit(bool b) { bits_.push_back(b); }
  const Bits& bits() const { return bits_; }
  Bits take() { return std::move(bits_); }

 private:
  Bits bits_;
};

class BitReader {
 public:
  explicit BitReader(const Bits& bits) : bits_(bits) {}
  std::uint64_t get(unsigned width) {
    if (pos_ + width > bits_.size()) throw DecodeError("message too short");
    std::uint64_t v = 0;
    for (unsigned i = 0; i < width; ++i) v = (v << 1) | (bits_[pos_++] ? 1U : 0U);
    return v;
  }
  bool get_bit() { return get(1) != 0; }
  bool done() const { return pos_ == bits_.size(); }

 private:
  const Bits& bits_;
  std::size_t pos_ = 0;
};

inline std::size_t message_len(Model model, std::size_t n, std::size_t k) {
  if (!is_pow2(n) || !is_pow2(k) || n % k != 0 || n / k < 2)
    throw Error("message_len: n and k must be powers of two with n/k >= 2");
  const std::size_t idx = log2_exact(n / k);
  const std::size_t part = log2_exact(k);
  switch (model) {
    case Model::Serial: return 3 * log2_exact(n);
    case Model::Unlimited: return 3 * k * idx + 3 * k + (k - 1);
    case Model::Standard: return 3 * idx + (2 * k - 1) + 1;
    case Model::Minimal: return 3 * idx + 3 * part + part + 1;
  }
  return 0;
}

inline std::size_t message_len(Model model, const CrossbarConfig& cfg) {
  return message_len(model, cfg.n_cols, cfg.k);
}

/// Per-partition decoder enables (Table 1 of the half-gate scheme): which of
/// the input-A, input-B and output voltages this partition applies.
struct Opcode {
  bool in_a = false;
  bool in_b = false;
  bool out = false;

  std::uint8_t value() const {
    return static_cast<std::uint8_t>((in_a ? 4 : 0) | (in_b ? 2 : 0) | (out ? 1 : 0));
  }
  static Opcode from_value(unsigned v) { return {(v & 4U) != 0, (v & 2U) != 0, (v & 1U) != 0}; }
  bool idle() const { return !in_a && !in_b && !out; }

  friend bool operator==(const Opcode&, const Opcode&) = default;
};

struct PartitionField {
  Opcode opcode;
  std::uint32_t in_a = 0;
  std::uint32_t in_b = 0;
  std::uint32_t out = 0;
  friend bool operator==(const PartitionField&, const PartitionField&) = default;
};

struct BaselineMessage {
  std::uint32_t in_a = 0, in_b = 0, out = 0;
  friend bool operator==(const BaselineMessage&, const BaselineMessage&) = default;
};

struct UnlimitedMessage {
  std::vector<bool> isolate;
  std::vector<PartitionField> partitions;
  friend bool operator==(const UnlimitedMessage&, const UnlimitedMessage&) = default;
};

struct StandardMessage {
  IndexTuple index;
  std::vector<bool> enables;
  std::vector<bool> isolate;
  bool outputs_left = false;
  friend bool operator==(const StandardMessage&, const StandardMessage&) = default;
};

struct MinimalMessage {
  IndexTuple index;
  std::uint32_t p_start = 0, p_end = 0, period_code = 0, distance = 0;
  bool outputs_left = false;
  friend bool operator==(const MinimalMessage&, const MinimalMessage&) = default;
};

using ControlMessage =
    std::variant<BaselineMessage, UnlimitedMessage, StandardMessage, MinimalMessage>;

/// Decode mode: which kind of cycle a message describes.
using DecodeMode = CycleKind;

// ---------------------------------------------------------------------------
// Serialization.

inline Bits serialize(const ControlMessage& msg, const CrossbarConfig& cfg) {
  const unsigned idx = log2_exact(cfg.width());
  const unsigned part = log2_exact(cfg.k);
  BitWriter w;
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, BaselineMessage>) {
          const unsigned abs = log2_exact(cfg.n_cols);
          w.put(m.in_a, abs);
          w.put(m.in_b, abs);
          w.put(m.out, abs);
        } else if constexpr (std::is_same_v<M, UnlimitedMessage>) {
          for (bool b : m.isolate) w.put_bit(b);
          for (const auto& f : m.partitions) {
            w.put(f.opcode.value(), 3);
            w.put(f.in_a, idx);
            w.put(f.in_b, idx);
            w.put(f.out, idx);
          }
        } else if constexpr (std::is_same_v<M, StandardMessage>) {
          w.put(m.index.in_a, idx);
          w.put(m.index.in_b, idx);
          w.put(m.index.out, idx);
          for (bool b : m.enables) w.put_bit(b);
          for (bool b : m.isolate) w.put_bit(b);
          w.put_bit(m.outputs_left);
        } else {
          w.put(m.index.in_a, idx);
          w.put(m.index.in_b, idx);
          w.put(m.index.out, idx);
          w.put(m.p_start, part);
          w.put(m.p_end, part);
          w.put(m.period_code, part);
          w.put(m.distance, part);
          w.put_bit(m.outputs_left);
        }
      },
      msg);
  return w.take();
}

inline ControlMessage parse(const Bits& bits, Model model, const CrossbarConfig& cfg) {
  if (bits.size() != message_len(model, cfg))
    throw DecodeError("message has " + std::to_string(bits.size()) + " bits, expected " +
                      std::to_string(message_len(model, cfg)));
  const unsigned idx = log2_exact(cfg.width());
  const unsigned part = log2_exact(cfg.k);
  BitReader r(bits);
  auto u32 = [&](unsigned width) { return static_cast<std::uint32_t>(r.get(width)); };
  switch (model) {
    case Model::Serial: {
      const unsigned abs = log2_exact(cfg.n_cols);
      BaselineMessage m;
      m.in_a = u32(abs);
      m.in_b = u32(abs);
      m.out = u32(abs);
      return m;
    }
    case Model::Unlimited: {
      UnlimitedMessage m;
      for (std::size_t i = 0; i + 1 < cfg.k; ++i) m.isolate.push_back(r.get_bit());
      for (std::size_t p = 0; p < cfg.k; ++p) {
        PartitionField f;
        f.opcode = Opcode::from_value(u32(3));
        f.in_a = u32(idx);
        f.in_b = u32(idx);
        f.out = u32(idx);
        m.partitions.push_back(f);
      }
      return m;
    }
    case Model::Standard: {
      StandardMessage m;
      m.index = {u32(idx), u32(idx), u32(idx)};
      for (std::size_t p = 0; p < cfg.k; ++p) m.enables.push_back(r.get_bit());
      for (std::size_t i = 0; i + 1 < cfg.k; ++i) m.isolate.push_back(r.get_bit());
      m.outputs_left = r.get_bit();
      return m;
    }
    case Model::Minimal: {
      MinimalMessage m;
      m.index = {u32(idx), u32(idx), u32(idx)};
      m.p_start = u32(part);
      m.p_end = u32(part);
      m.period_code = u32(part);
      m.distance = u32(part);
      m.outputs_left = r.get_bit();
      return m;
    }
  }
  throw DecodeError("unknown model");
}

// ---------------------------------------------------------------------------
// Half-gate composition and opcode generation.

/// Assembles the gate of one section [first, last] from its partitions'
/// opcodes. Exactly one partition must drive each role; an all-idle section
/// has no gate.
inline std::optional<Gate> compose_half_gates(std::uint32_t first, std::uint32_t last,
                                              const std::vector<PartitionField>& fields,
                                              DecodeMode mode = DecodeMode::Logic) {
  if (last < first || last >= fields.size()) throw DecodeError("compose: bad section");
  int na = 0, nb = 0, no = 0;
  ColumnRef a, b, o;
  for (std::uint32_t p = first; p <= last; ++p) {
    const auto& f = fields[p];
    if (f.opcode.in_a) ++na, a = {p, f.in_a};
    if (f.opcode.in_b) ++nb, b = {p, f.in_b};
    if (f.opcode.out) ++no, o = {p, f.out};
  }
  if (na == 0 && nb == 0 && no == 0) return std::nullopt;
  if (na > 1) throw DecodeError("compose: duplicate input role A");
  if (nb > 1) throw DecodeError("compose: duplicate input role B");
  if (no > 1) throw DecodeError("compose: duplicate output role");
  if (no == 0) throw DecodeError("compose: missing output role");
  if (mode == DecodeMode::Init1 || mode == DecodeMode::Init0) {
    if (na != 0 || nb != 0) throw DecodeError("compose: input role in a write cycle");
    return mode == DecodeMode::Init1 ? Gate::init1(o) : Gate::init0(o);
  }
  if (na == 0) throw DecodeError("compose: missing input role A");
  if (nb == 0) throw DecodeError("compose: missing input role B");
  Gate g = a == b ? Gate::inv(a, o) : Gate::nor(a, b, o);
  if (g.out == g.in_a || g.out == g.in_b) throw DecodeError("compose: output aliases input");
  return g;
}

/// Standard-model opcode of one partition from its neighbouring transistor
/// selects, its enable bit and the global direction. Partition edges of the
/// crossbar count as isolating.
inline Opcode generate_opcode(bool left_isolating, bool right_isolating, bool enable,
                              bool outputs_left) {
  const bool in = enable && (outputs_left ? right_isolating : left_isolating);
  const bool out = enable && (outputs_left ? left_isolating : right_isolating);
  return {in, in, out};
}

inline std::vector<Opcode> generate_opcodes(const std::vector<bool>& isolate,
                                            const std::vector<bool>& enables, bool outputs_left) {
  const std::size_t k = enables.size();
  std::vector<Opcode> ops(k);
  for (std::size_t p = 0; p < k; ++p) {
    const bool left = p == 0 || isolate[p - 1];
    const bool right = p + 1 == k || isolate[p];
    ops[p] = generate_opcode(left, right, enables[p], outputs_left);
  }
  return ops;
}

/// Input enables produced by the range generator: one every period
/// partitions from p_start through p_end.
inline std::vector<bool> range_generator(std::uint32_t p_start, std::uint32_t p_end,
                                         std::uint32_t period, std::size_t k) {
  std::vector<bool> en(k, false);
  if (period == 0) return en;
  for (std::uint64_t p = p_start; p <= p_end && p < k; p += period) en[p] = true;
  return en;
}

// ---------------------------------------------------------------------------
// Operation <-> message.

inline ControlMessage to_message(const Operation& op, Model model, const CrossbarConfig& cfg) {
  if (auto v = is_legal(model, op, cfg); !v)
    throw Error(std::string("encode: operation illegal under ") + to_string(model) +
                " model: " + to_string(v.reason));
  const auto canon = op.canonicalized();
  const bool write = cycle_kind(op) != CycleKind::Logic;
  switch (model) {
    case Model::Serial: {
      const auto& g = canon.gates.front();
      BaselineMessage m;
      m.out = static_cast<std::uint32_t>(column_of(g.out, cfg));
      if (!write) {
        m.in_a = static_cast<std::uint32_t>(column_of(g.in_a, cfg));
        m.in_b = static_cast<std::uint32_t>(column_of(g.in_b, cfg));
      }
      return m;
    }
    case Model::Unlimited: {
      UnlimitedMessage m{op.division.isolate, std::vector<PartitionField>(cfg.k)};
      for (const auto& g : canon.gates) {
        if (!write) {
          auto& fa = m.partitions[g.in_a.partition];
          fa.opcode.in_a = true;
          fa.in_a = g.in_a.intra;
          auto& fb = m.partitions[g.in_b.partition];
          fb.opcode.in_b = true;
          fb.in_b = g.in_b.intra;
        }
        auto& fo = m.partitions[g.out.partition];
        fo.opcode.out = true;
        fo.out = g.out.intra;
      }
      return m;
    }
    case Model::Standard: {
      StandardMessage m;
      m.index = write ? IndexTuple{0, 0, canon.gates.front().out.intra}
                      : index_tuple(canon.gates.front());
      m.enables.assign(cfg.k, false);
      m.isolate = op.division.isolate;
      for (const auto& g : canon.gates) {
        m.enables[g.out.partition] = true;
        if (!write) m.enables[g.in_a.partition] = true;
        if (direction_of(g) == Direction::OutputsLeftOfInputs) m.outputs_left = true;
      }
      return m;
    }
    case Model::Minimal: {
      const auto p = infer_minimal_params(op, cfg).value;
      MinimalMessage m;
      m.index = write ? IndexTuple{0, 0, p.index.out} : p.index;
      m.p_start = p.p_start;
      m.p_end = p.p_end;
      m.period_code = p.period - 1;
      m.distance = p.distance;
      m.outputs_left = p.direction == Direction::OutputsLeftOfInputs;
      return m;
    }
  }
  throw Error("encode: unknown model");
}

inline Operation from_message(const ControlMessage& msg, const CrossbarConfig& cfg,
                              DecodeMode mode = DecodeMode::Logic) {
  if (mode != DecodeMode::Logic && mode != DecodeMode::Init1 && mode != DecodeMode::Init0)
    throw DecodeError("decode: bad mode");
  const bool write = mode != DecodeMode::Logic;
  auto write_gate = [&](ColumnRef o) {
    return mode == DecodeMode::Init1 ? Gate::init1(o) : Gate::init0(o);
  };
  Operation op;
  Model model = Model::Serial;
  if (const auto* m = std::get_if<BaselineMessage>(&msg)) {
    if (m->in_a >= cfg.n_cols || m->in_b >= cfg.n_cols || m->out >= cfg.n_cols)
      throw DecodeError("decode: column out of range");
    const auto o = column_ref(m->out, cfg);
    if (write) {
      op.gates.push_back(write_gate(o));
    } else {
      const auto a = column_ref(m->in_a, cfg);
      const auto b = column_ref(m->in_b, cfg);
      op.gates.push_back(a == b ? Gate::inv(a, o) : Gate::nor(a, b, o));
    }
    op.division = SectionDivision::all(cfg.k, false);
  } else if (const auto* m = std::get_if<UnlimitedMessage>(&msg)) {
    model = Model::Unlimited;
    op.division.isolate = m->isolate;
    if (m->partitions.size() != cfg.k || m->isolate.size() + 1 != cfg.k)
      throw DecodeError("decode: message geometry mismatch");
    for (auto [first, last] : op.division.sections())
      if (auto g = compose_half_gates(first, last, m->partitions, mode)) op.gates.push_back(*g);
  } else if (const auto* m = std::get_if<StandardMessage>(&msg)) {
    model = Model::Standard;
    if (m->enables.size() != cfg.k || m->isolate.size() + 1 != cfg.k)
      throw DecodeError("decode: message geometry mismatch");
    const auto opcodes = generate_opcodes(m->isolate, m->enables, m->outputs_left);
    std::vector<PartitionField> fields(cfg.k);
    for (std::size_t p = 0; p < cfg.k; ++p) {
      fields[p].opcode = opcodes[p];
      if (write) fields[p].opcode.in_a = fields[p].opcode.in_b = false;
      fields[p].in_a = m->index.in_a;
      fields[p].in_b = m->index.in_b;
      fields[p].out = m->index.out;
    }
    op.division.isolate = m->isolate;
    for (auto [first, last] : op.division.sections())
      if (auto g = compose_half_gates(first, last, fields, mode)) op.gates.push_back(*g);
  } else {
    const auto& mm = std::get<MinimalMessage>(msg);
    model = Model::Minimal;
    MinimalParams p;
    p.kind = mode;
    p.index = write ? IndexTuple{mm.index.out, mm.index.out, mm.index.out} : mm.index;
    p.p_start = mm.p_start;
    p.p_end = mm.p_end;
    p.period = mm.period_code + 1;
    p.distance = mm.distance;
    p.direction = mm.distance == 0 ? Direction::Degenerate
                  : mm.outputs_left ? Direction::OutputsLeftOfInputs
                                   : Direction::InputsLeftOfOutputs;
    try {
      op = materialize(p, cfg);
    } catch (const DecodeError&) {
      throw;
    } catch (const Error& e) {
      throw DecodeError(std::string("decode: ") + e.what());
    }
  }
  if (auto v = is_legal(model, op, cfg); !v)
    throw DecodeError(std::string("decode: message describes an illegal operation: ") +
                      to_string(v.reason));
  return op.canonicalized();
}

struct Encoded {
  ControlMessage message;
  Bits bits;
  DecodeMode mode = DecodeMode::Logic;
};

inline Encoded encode(const Operation& op, Model model, const CrossbarConfig& cfg) {
  Encoded e;
  e.message = to_message(op, model, cfg);
  e.bits = serialize(e.message, cfg);
  e.mode = cycle_kind(op);
  return e;
}

inline Operation decode(const Bits& bits, Model model, const CrossbarConfig& cfg,
                        DecodeMode mode = DecodeMode::Logic) {
  return from_message(parse(bits, model, cfg), cfg, mode);
}

// ---------------------------------------------------------------------------
// Hex transport: MSB first, zero-padded on the left to a whole nibble.

inline std::string to_hex(const Bits& bits) {
  static constexpr char digits[] = "0123456789abcdef";
  const std::size_t pad = (4 - bits.size() % 4) % 4;
  std::string out;
  unsigned nibble = 0, fill = static_cast<unsigned>(pad);
  for (bool b : bits) {
    nibble = (nibble << 1) | (b ? 1U : 0U);
    if (++fill == 4) {
      out.push_back(digits[nibble]);
      nibble = 0;
      fill = 0;
    }
  }
  return out;
}

inline Bits from_hex(const std::string& hex, std::size_t bit_len) {
  if (hex.size() != (bit_len + 3) / 4)
    throw DecodeError("hex message has " + std::to_string(hex.size()) + " digits, expected " +
                      std::to_string((bit_len + 3) / 4));
  Bits all;
  for (char c : hex) {
    unsigned v;
    if (c >= '0' && c <= '9') v = static_cast<unsigned>(c - '0');
    else if (c >= 'a' && c <= 'f') v = static_cast<unsigned>(c - 'a' + 10);
    else if (c >= 'A' && c <= 'F') v = static_cast<unsigned>(c - 'A' + 10);
    else throw DecodeError(std::string("bad hex digit '") + c + "'");
    for (int i = 3; i >= 0; --i) all.push_back((v >> i) & 1U);
  }
  const std::size_t pad = all.size() - bit_len;
  for (std::size_t i = 0; i < pad; ++i)
    if (all[i]) throw DecodeError("nonzero padding bits");
  return Bits(all.begin() + static_cast<std::ptrdiff_t>(pad), all.end());
}

}  // namespace mempart
