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
#include <set>

#include <gtest/gtest.h>

#include "mempart/crossbar.hpp"

namespace mempart {
namespace {

const CrossbarConfig kBig = CrossbarConfig::make(1, 1024, 32, false);
const CrossbarConfig kK4 = CrossbarConfig::make(1, 16, 4, false);

TEST(Config, RejectsBadGeometry) {
  EXPECT_THROW(CrossbarConfig::make(1, 1024, 0), Error);
  EXPECT_THROW(CrossbarConfig::make(1, 1000, 8), Error);
  EXPECT_THROW(CrossbarConfig::make(1, 32, 32), Error);  // one column per partition
  EXPECT_THROW(CrossbarConfig::make(1, 48, 4), Error);   // not a power of two
  EXPECT_THROW(CrossbarConfig::make(0, 32, 4), Error);
  EXPECT_NO_THROW(CrossbarConfig::make(1, 2, 1));
}

TEST(ColumnOf, Examples) {
  EXPECT_EQ(column_of({0, 0}, kBig), 0u);
  EXPECT_EQ(column_of({0, 0}, kK4), 0u);
  EXPECT_EQ(column_of({3, 2}, kBig), 98u);
  EXPECT_EQ(column_of({31, 31}, kBig), 1023u);
  EXPECT_THROW(column_of({32, 0}, kBig), Error);
  EXPECT_THROW(column_of({0, 32}, kBig), Error);
}

TEST(ColumnOf, Bijection) {
  for (auto cfg : {kK4, CrossbarConfig::make(1, 64, 8, false), kBig}) {
    std::set<std::size_t> seen;
    for (std::uint32_t p = 0; p < cfg.k; ++p)
      for (std::uint32_t i = 0; i < cfg.width(); ++i) {
        const auto c = column_of({p, i}, cfg);
        ASSERT_LT(c, cfg.n_cols);
        seen.insert(c);
        EXPECT_EQ(column_ref(c, cfg), (ColumnRef{p, i}));
      }
    EXPECT_EQ(seen.size(), cfg.n_cols);
  }
}

TEST(TightDivision, Examples) {
  using V = std::vector<bool>;
  EXPECT_EQ(tight_division({Gate::nor({2, 0}, {2, 1}, {2, 2})}, kK4).isolate, (V{true, true, true}));
  EXPECT_EQ(tight_division({Gate::nor({0, 0}, {0, 1}, {1, 0})}, kK4).isolate,
            (V{false, true, true}));
  EXPECT_EQ(tight_division({Gate::nor({0, 0}, {0, 1}, {1, 0}), Gate::inv({2, 0}, {3, 1})}, kK4)
                .isolate,
            (V{false, true, false}));
  EXPECT_THROW(tight_division({Gate::nor({0, 0}, {0, 1}, {2, 0}), Gate::inv({1, 0}, {3, 1})}, kK4),
               Error);
}

// Random gate with a span of at most max_span partitions starting at lo.
Gate random_gate(std::mt19937& rng, const CrossbarConfig& cfg, std::uint32_t lo,
                 std::uint32_t hi) {
  const auto w = static_cast<std::uint32_t>(cfg.width());
  std::uniform_int_distribution<std::uint32_t> part(lo, hi), idx(0, w - 1);
  for (;;) {
    const ColumnRef a{part(rng), idx(rng)}, b{part(rng), idx(rng)}, o{part(rng), idx(rng)};
    Gate g = a == b ? Gate::inv(a, o) : Gate::nor(a, b, o);
    if (check_gate(g, cfg)) return g;
  }
}

TEST(TightDivision, FlippingAnyConductingBoundaryBreaksContainment) {
  std::mt19937 rng(7);
  for (std::size_t k : {1, 2, 4}) {
    const auto cfg = CrossbarConfig::make(1, 4 * k, k, false);
    for (int trial = 0; trial < 300; ++trial) {
      // Carve [0, k) into consecutive spans and place at most one gate per span.
      std::vector<Gate> gates;
      std::uint32_t lo = 0;
      while (lo < k) {
        const std::uint32_t hi = lo + static_cast<std::uint32_t>(rng() % (k - lo));
        if (rng() % 3 != 0) {
          Gate g = random_gate(rng, cfg, lo, hi);
          if (g.lo_partition() >= lo && g.hi_partition() <= hi) gates.push_back(g);
        }
        lo = hi + 1;
      }
      if (gates.empty()) continue;
      const auto div = tight_division(gates, cfg);
      // Oracle: a boundary conducts iff it lies strictly inside some span.
      for (std::size_t b = 0; b + 1 < k; ++b) {
        bool inside = false;
        for (const auto& g : gates) inside |= g.lo_partition() <= b && b < g.hi_partition();
        EXPECT_EQ(div.isolate[b], !inside);
      }
      Operation op{gates, div};
      ASSERT_TRUE(validate_physical(op, cfg)) << to_string(validate_physical(op, cfg).reason);
      for (std::size_t b = 0; b + 1 < k; ++b) {
        if (div.isolate[b]) continue;
        Operation flipped = op;
        flipped.division.isolate[b] = true;
        EXPECT_EQ(validate_physical(flipped, cfg).reason, Violation::CrossesBoundary);
      }
    }
  }
}

TEST(ValidatePhysical, Examples) {
  const Operation serial{{Gate::nor({0, 1}, {5, 2}, {31, 0})}, SectionDivision::all(32, false)};
  EXPECT_TRUE(validate_physical(serial, kBig));

  const Operation shared{{Gate::nor({0, 0}, {0, 1}, {0, 2}), Gate::inv({1, 0}, {1, 1})},
                         SectionDivision::all(4, false)};
  EXPECT_EQ(validate_physical(shared, kK4).reason, Violation::SharedSection);

  const Operation alias{{Gate::nor({0, 0}, {0, 1}, {0, 0})}, SectionDivision::all(4, true)};
  EXPECT_EQ(validate_physical(alias, kK4).reason, Violation::OutputAliasesInput);

  const Operation crossing{{Gate::inv({0, 0}, {1, 0})}, SectionDivision::all(4, true)};
  EXPECT_EQ(validate_physical(crossing, kK4).reason, Violation::CrossesBoundary);

  EXPECT_EQ(validate_physical(Operation{{}, SectionDivision::all(4, true)}, kK4).reason,
            Violation::EmptyOperation);
  EXPECT_EQ(validate_physical(Operation{{Gate::inv({0, 0}, {0, 1})}, {{true}}}, kK4).reason,
            Violation::BadDivision);
  EXPECT_EQ(validate_physical(Operation{{Gate::inv({0, 0}, {0, 4})}, SectionDivision::all(4, true)},
                              kK4)
                .reason,
            Violation::OutOfRange);
  const Operation mixed{{Gate::inv({0, 0}, {0, 1}), Gate::init1({1, 0})},
                        SectionDivision::all(4, true)};
  EXPECT_EQ(validate_physical(mixed, kK4).reason, Violation::MixedCycleKind);
  const Operation dup{{Gate{GateKind::Nor2, {0, 0}, {0, 0}, {0, 1}}}, SectionDivision::all(4, true)};
  EXPECT_EQ(validate_physical(dup, kK4).reason, Violation::DuplicateInput);
}

TEST(Gate, CanonicalFormIgnoresInputOrder) {
  const Gate g1{GateKind::Nor2, {1, 0}, {0, 3}, {2, 0}};
  const Gate g2{GateKind::Nor2, {0, 3}, {1, 0}, {2, 0}};
  EXPECT_EQ(canonical(g1), canonical(g2));
  EXPECT_EQ(Gate::nor({1, 0}, {0, 3}, {2, 0}), canonical(g1));
  const Operation a{{g1}, SectionDivision::all(4, false)};
  const Operation b{{g2}, SectionDivision::all(4, false)};
  EXPECT_EQ(a, b);
  EXPECT_EQ(key(a), key(b));
  EXPECT_EQ(canonical(Gate{GateKind::Init0, {0, 1}, {0, 2}, {3, 3}}), Gate::init0({3, 3}));
}

TEST(Gate, CycleKind) {
  EXPECT_EQ(cycle_kind(Operation{}), CycleKind::Empty);
  EXPECT_EQ(cycle_kind(Operation{{Gate::init1({0, 0}), Gate::init1({1, 0})}, {}}),
            CycleKind::Init1);
  EXPECT_EQ(cycle_kind(Operation{{Gate::init0({0, 0})}, {}}), CycleKind::Init0);
  EXPECT_EQ(cycle_kind(Operation{{Gate::init0({0, 0}), Gate::init1({1, 0})}, {}}),
            CycleKind::Mixed);
  EXPECT_EQ(cycle_kind(Operation{{Gate::inv({0, 0}, {0, 1})}, {}}), CycleKind::Logic);
}

TEST(Gate, KindNames) {
  for (auto k : {GateKind::Nor2, GateKind::Not, GateKind::Init1, GateKind::Init0})
    EXPECT_EQ(gate_kind_from_string(to_string(k)), k);
  EXPECT_FALSE(gate_kind_from_string("XOR"));
}

TEST(SectionDivision, Sections) {
  const SectionDivision d{{false, true, false}};
  using S = std::vector<std::pair<std::uint32_t, std::uint32_t>>;
  EXPECT_EQ(d.sections(), (S{{0, 1}, {2, 3}}));
  EXPECT_EQ(d.section_ids(), (std::vector<std::uint32_t>{0, 0, 1, 1}));
  EXPECT_EQ(SectionDivision::all(1, true).sections(), (S{{0, 0}}));
}

}  // namespace
}  // namespace mempart
