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


#include <random>

#include <gtest/gtest.h>

#include "mempart/codec.hpp"
#include "test_support.hpp"

namespace mempart {
namespace {

const CrossbarConfig kK4 = CrossbarConfig::make(1, 16, 4, false);
const CrossbarConfig kK8 = CrossbarConfig::make(1, 64, 8, false);
const CrossbarConfig kBig = CrossbarConfig::make(1, 1024, 32, false);
const Model kModels[] = {Model::Serial, Model::Unlimited, Model::Standard, Model::Minimal};

Operation tight(std::vector<Gate> gates, const CrossbarConfig& cfg) {
  Operation op{std::move(gates), {}};
  op.division = tight_division(op.gates, cfg);
  return op;
}

TEST(MessageLen, Lengths) {
  EXPECT_EQ(message_len(Model::Unlimited, 1024, 32), 607u);
  EXPECT_EQ(message_len(Model::Standard, 1024, 32), 79u);
  EXPECT_EQ(message_len(Model::Minimal, 1024, 32), 36u);
  EXPECT_EQ(message_len(Model::Serial, 1024, 32), 30u);
  EXPECT_EQ(message_len(Model::Serial, 1024, 1), 30u);
  EXPECT_THROW(message_len(Model::Minimal, 1000, 8), Error);
}

TEST(Unlimited, HalfGateOpcodes) {
  const auto op = tight({Gate::nor({0, 1}, {0, 2}, {1, 3})}, kK4);
  const auto msg = std::get<UnlimitedMessage>(to_message(op, Model::Unlimited, kK4));
  EXPECT_EQ(msg.partitions[0].opcode.value(), 0b110);
  EXPECT_EQ(msg.partitions[1].opcode.value(), 0b001);
  EXPECT_EQ(msg.partitions[0].in_a, 1u);
  EXPECT_EQ(msg.partitions[0].in_b, 2u);
  EXPECT_EQ(msg.partitions[1].out, 3u);
  EXPECT_TRUE(msg.partitions[2].opcode.idle());
  EXPECT_EQ(msg.isolate, (std::vector<bool>{false, true, true}));
  EXPECT_EQ(decode(encode(op, Model::Unlimited, kK4).bits, Model::Unlimited, kK4), op);
}

TEST(ComposeHalfGates, Examples) {
  std::vector<PartitionField> f(3);
  f[0] = {Opcode::from_value(0b111), 1, 2, 3};
  const auto whole = compose_half_gates(0, 0, f);
  ASSERT_TRUE(whole);
  EXPECT_EQ(*whole, Gate::nor({0, 1}, {0, 2}, {0, 3}));

  f[0] = {Opcode::from_value(0b110), 1, 2, 0};
  f[1] = {Opcode::from_value(0b000), 0, 0, 0};
  f[2] = {Opcode::from_value(0b001), 0, 0, 3};
  const auto spanning = compose_half_gates(0, 2, f);
  ASSERT_TRUE(spanning);
  EXPECT_EQ(*spanning, Gate::nor({0, 1}, {0, 2}, {2, 3}));

  f[1] = {Opcode::from_value(0b110), 1, 2, 0};
  EXPECT_THROW(compose_half_gates(0, 1, f), DecodeError);

  f[0] = f[1] = f[2] = {};
  EXPECT_FALSE(compose_half_gates(0, 2, f));
  f[0] = {Opcode::from_value(0b001), 0, 0, 1};
  EXPECT_EQ(*compose_half_gates(0, 0, f, CycleKind::Init1), Gate::init1({0, 1}));
  EXPECT_THROW(compose_half_gates(0, 0, f), DecodeError);  // no inputs in a logic cycle
}

TEST(Standard, OpcodeGeneratorTruthTable) {
  // role(left edge isolating, right edge isolating, enable, outputs on the left)
  struct Row {
    bool left, right, enable, outputs_left;
    unsigned expect;
  };
  const Row table[] = {
      {false, false, false, false, 0b000}, {false, false, true, false, 0b000},
      {false, true, false, false, 0b000},  {false, true, true, false, 0b001},
      {true, false, false, false, 0b000},  {true, false, true, false, 0b110},
      {true, true, false, false, 0b000},   {true, true, true, false, 0b111},
      {false, false, false, true, 0b000},  {false, false, true, true, 0b000},
      {false, true, false, true, 0b000},   {false, true, true, true, 0b110},
      {true, false, false, true, 0b000},   {true, false, true, true, 0b001},
      {true, true, false, true, 0b000},    {true, true, true, true, 0b111},
  };
  for (const auto& r : table)
    EXPECT_EQ(generate_opcode(r.left, r.right, r.enable, r.outputs_left).value(), r.expect)
        << r.left << r.right << r.enable << r.outputs_left;
}

TEST(Minimal, DecodeExample) {
  MinimalMessage m;
  m.index = {0, 1, 2};
  m.p_start = 1;
  m.p_end = 4;
  m.period_code = 2;  // T = 3
  m.distance = 1;
  m.outputs_left = false;
  const auto bits = serialize(m, kK8);
  ASSERT_EQ(bits.size(), message_len(Model::Minimal, kK8));
  const auto op = decode(bits, Model::Minimal, kK8);
  ASSERT_EQ(op.gates.size(), 2u);
  EXPECT_EQ(op.gates[0], Gate::nor({1, 0}, {1, 1}, {2, 2}));
  EXPECT_EQ(op.gates[1], Gate::nor({4, 0}, {4, 1}, {5, 2}));
  std::vector<bool> expect(7, false);
  for (std::size_t i : {0, 2, 3, 5, 6}) expect[i] = true;
  EXPECT_EQ(op.division.isolate, expect);
  // The adjacency rule (partition i holds an output or i+1 an input) marks
  // {0, 2, 3, 5}; the decoder also isolates boundaries between idle
  // partitions, which changes nothing.
  const std::vector<bool> outs{0, 0, 1, 0, 0, 1, 0, 0}, ins{0, 1, 0, 0, 1, 0, 0, 0};
  for (std::size_t i = 0; i < 7; ++i) {
    const bool rule = outs[i] || ins[i + 1];
    if (rule != op.division.isolate[i]) {
      EXPECT_FALSE(outs[i] || ins[i] || outs[i + 1] || ins[i + 1]) << i;
    }
  }
}

TEST(Minimal, RangeGenerator) {
  EXPECT_EQ(range_generator(1, 4, 3, 8), (std::vector<bool>{0, 1, 0, 0, 1, 0, 0, 0}));
  EXPECT_EQ(range_generator(0, 7, 1, 8), std::vector<bool>(8, true));
  EXPECT_EQ(range_generator(5, 5, 8, 8), (std::vector<bool>{0, 0, 0, 0, 0, 1, 0, 0}));
}

TEST(SinglePartition, UnlimitedMatchesBaseline) {
  const auto cfg = CrossbarConfig::make(1, 16, 1, false);
  const Operation op{{Gate::nor({0, 3}, {0, 9}, {0, 12})}, {}};
  const auto via_unlimited = decode(encode(op, Model::Unlimited, cfg).bits, Model::Unlimited, cfg);
  const auto via_baseline = decode(encode(op, Model::Serial, cfg).bits, Model::Serial, cfg);
  EXPECT_EQ(via_unlimited, via_baseline);
  EXPECT_EQ(via_unlimited, op);
}

TEST(RoundTrip, RandomLegalOperations) {
  std::mt19937_64 rng(2024);
  for (const auto& cfg : {kK4, kK8, kBig})
    for (Model m : kModels)
      for (int i = 0; i < 1500; ++i) {
        const auto op = testing::random_legal_operation(rng, m, cfg);
        const auto e = encode(op, m, cfg);
        ASSERT_EQ(e.bits.size(), message_len(m, cfg));
        const auto back = decode(e.bits, m, cfg, e.mode);
        ASSERT_EQ(back, op) << to_string(m) << " " << key(op) << " vs " << key(back);
        // Through the hex transport too.
        EXPECT_EQ(from_hex(to_hex(e.bits), e.bits.size()), e.bits);
        if (m == Model::Minimal) {
          EXPECT_EQ(back.division, tight_division(back.gates, cfg));
        }
      }
}

TEST(Decode, TotalOnRandomBits) {
  std::mt19937_64 rng(77);
  for (const auto& cfg : {kK4, kK8})
    for (Model m : kModels)
      for (CycleKind mode : {CycleKind::Logic, CycleKind::Init1, CycleKind::Init0})
        for (int i = 0; i < 2000; ++i) {
          Bits bits(message_len(m, cfg));
          for (std::size_t b = 0; b < bits.size(); ++b) bits[b] = rng() & 1U;
          try {
            const auto op = decode(bits, m, cfg, mode);
            EXPECT_TRUE(is_legal(m, op, cfg));
            EXPECT_EQ(cycle_kind(op), mode);
          } catch (const DecodeError&) {
          }
        }
}

TEST(Decode, RejectsWrongLength) {
  EXPECT_THROW(decode(Bits(35), Model::Minimal, kBig), DecodeError);
  EXPECT_THROW(decode(Bits(37), Model::Minimal, kBig), DecodeError);
}

TEST(Encode, RejectsIllegal) {
  const auto split = tight({Gate::nor({0, 0}, {1, 1}, {1, 2})}, kK4);
  EXPECT_THROW(encode(split, Model::Standard, kK4), Error);
  EXPECT_THROW(encode(split, Model::Serial, kK4), Error);
  EXPECT_NO_THROW(encode(split, Model::Unlimited, kK4));
}

TEST(Hex, Padding) {
  const Bits b{1, 0, 1, 1, 0, 1};  // 0b101101 = 0x2d
  EXPECT_EQ(to_hex(b), "2d");
  EXPECT_EQ(from_hex("2d", 6), b);
  EXPECT_EQ(from_hex("2D", 6), b);
  EXPECT_THROW(from_hex("6d", 6), DecodeError);  // padding bit set
  EXPECT_THROW(from_hex("2g", 6), DecodeError);
  EXPECT_THROW(from_hex("02d", 6), DecodeError);
  EXPECT_EQ(to_hex(Bits{}), "");
}

TEST(BitStream, MsbFirst) {
  BitWriter w;
  w.put(0b101, 3);
  w.put_bit(false);
  w.put(0x3, 4);
  EXPECT_EQ(w.bits(), (Bits{1, 0, 1, 0, 0, 0, 1, 1}));
  BitReader r(w.bits());
  EXPECT_EQ(r.get(3), 0b101u);
  EXPECT_FALSE(r.get_bit());
  EXPECT_EQ(r.get(4), 3u);
  EXPECT_TRUE(r.done());
  EXPECT_THROW(r.get(1), DecodeError);
}

}  // namespace
}  // namespace mempart
