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

// Gate-level algorithm construction: partition communication primitives,
// NOR/NOT multipliers and model legalization.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mempart/crossbar.hpp"
#include "mempart/validators.hpp"

namespace mempart {

namespace detail {

inline Operation tight_op(std::vector<Gate> gates, const CrossbarConfig& cfg) {
  Operation op;
  op.division = tight_division(gates, cfg);
  op.gates = std::move(gates);
  return op;
}

inline Operation serial_op(const Gate& g, const CrossbarConfig& cfg) {
  return {{g}, SectionDivision::all(cfg.k, false)};
}

inline std::set<std::size_t> written_columns(const std::vector<Gate>& gates,
                                             const CrossbarConfig& cfg) {
  std::set<std::size_t> out;
  for (const auto& g : gates) out.insert(column_of(g.out, cfg));
  return out;
}

inline std::set<std::size_t> read_columns(const std::vector<Gate>& gates,
                                          const CrossbarConfig& cfg) {
  std::set<std::size_t> out;
  for (const auto& g : gates)
    if (!is_init(g.kind)) {
      out.insert(column_of(g.in_a, cfg));
      out.insert(column_of(g.in_b, cfg));
    }
  return out;
}

}  // namespace detail

/// Levels of a doubling tree rooted at `root` over `positions` (sorted,
/// containing root). Each level is a list of (holder, receiver) pairs whose
/// spans are pairwise disjoint. A holder always sends to the mirror of its
/// offset in the other half of its segment, so on power-of-two sets every
/// level has one distance, one direction and a fixed period.
inline std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> doubling_tree(
    std::uint32_t root, const std::vector<std::uint32_t>& positions) {
  struct Segment {
    std::size_t lo, hi, holder;  // indices into positions, [lo, hi)
  };
  const auto it = std::find(positions.begin(), positions.end(), root);
  if (it == positions.end()) throw Error("doubling_tree: root not in position set");
  std::vector<Segment> segs{{0, positions.size(), static_cast<std::size_t>(it - positions.begin())}};
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> levels;
  while (true) {
    std::vector<Segment> next;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> level;
    for (const auto& s : segs) {
      const std::size_t size = s.hi - s.lo;
      if (size <= 1) {
        next.push_back(s);
        continue;
      }
      const std::size_t half = (size + 1) / 2;
      const std::size_t mid = s.lo + half;
      std::size_t target;
      if (s.holder < mid) {
        target = std::min(s.holder + half, s.hi - 1);
        next.push_back({s.lo, mid, s.holder});
        next.push_back({mid, s.hi, target});
      } else {
        target = s.holder - half;
        next.push_back({s.lo, mid, target});
        next.push_back({mid, s.hi, s.holder});
      }
      level.emplace_back(positions[s.holder], positions[target]);
    }
    if (level.empty()) break;
    levels.push_back(std::move(level));
    segs = std::move(next);
  }
  return levels;
}

struct LegalizeResult {
  Program program;
  /// Columns the rewrite used as temporaries; their final contents are
  /// unspecified.
  std::vector<std::size_t> scratch_columns;
};

/// Rewrites an unlimited-legal program so that every operation passes the
/// target model's validator, preserving the final state of every column
/// except the reported scratch columns. Legal operations pass through
/// unchanged.
inline LegalizeResult legalize(const Program& prog, const CrossbarConfig& cfg, Model model) {
  LegalizeResult result;
  std::set<std::size_t> referenced;
  for (const auto& op : prog.operations)
    for (const auto& g : op.gates)
      for (auto r : {g.in_a, g.in_b, g.out}) referenced.insert(column_of(r, cfg));

  std::map<std::uint32_t, std::pair<ColumnRef, ColumnRef>> scratch;
  auto scratch_for = [&](std::uint32_t partition) {
    if (auto it = scratch.find(partition); it != scratch.end()) return it->second;
    std::vector<ColumnRef> free;
    for (std::uint32_t i = static_cast<std::uint32_t>(cfg.width()); i-- > 0 && free.size() < 2;) {
      const ColumnRef r{partition, i};
      if (!referenced.count(column_of(r, cfg))) free.push_back(r);
    }
    if (free.size() < 2)
      throw Error("legalize: no free scratch columns in partition " + std::to_string(partition));
    for (auto r : free) result.scratch_columns.push_back(column_of(r, cfg));
    return scratch[partition] = {free[0], free[1]};
  };

  auto emit_write = [&](const Gate& g, bool single) {
    if (cfg.enforce_init && !is_init(g.kind)) {
      const Gate init = Gate::init1(g.out);
      result.program.operations.push_back(single ? detail::serial_op(init, cfg)
                                                 : detail::tight_op({init}, cfg));
    }
    result.program.operations.push_back(single ? detail::serial_op(g, cfg)
                                               : detail::tight_op({g}, cfg));
  };

  for (std::size_t index = 0; index < prog.operations.size(); ++index) {
    const auto& op = prog.operations[index];
    if (is_legal(model, op, cfg)) {
      result.program.operations.push_back(op);
      continue;
    }
    if (auto v = is_legal_unlimited(op, cfg); !v)
      throw Error("legalize: operation " + std::to_string(index) +
                  " is not physically valid: " + to_string(v.reason));

    std::vector<Gate> gates = op.canonicalized().gates;

    // Split inputs: copy in_b next to in_a through two inversions.
    if (model != Model::Serial) {
      for (auto& g : gates) {
        if (is_init(g.kind) || g.in_a.partition == g.in_b.partition) continue;
        const auto [s1, s2] = scratch_for(g.in_a.partition);
        emit_write(Gate::inv(g.in_b, s1), false);
        emit_write(Gate::inv(s1, s2), false);
        g = Gate::nor(g.in_a, s2, g.out);
      }
    }

    // Group gates that may share one cycle.
    std::vector<std::vector<Gate>> groups;
    if (model == Model::Serial) {
      for (const auto& g : gates) groups.push_back({g});
    } else {
      std::map<std::tuple<IndexTuple, int, std::uint32_t>, std::vector<Gate>> buckets;
      for (const auto& g : gates) {
        const int dir = direction_of(g) == Direction::OutputsLeftOfInputs ? 1 : 0;
        const std::uint32_t dist = model == Model::Minimal ? distance_of(g) : 0;
        buckets[{index_tuple(g), dir, dist}].push_back(g);
      }
      for (auto& [_, bucket] : buckets) {
        if (model != Model::Minimal) {
          groups.push_back(std::move(bucket));
          continue;
        }
        // Peel off arithmetic progressions of input partitions.
        std::map<std::uint32_t, Gate> left;
        for (const auto& g : bucket) left.emplace(g.in_a.partition, g);
        while (!left.empty()) {
          std::vector<Gate> run{left.begin()->second};
          const std::uint32_t first = left.begin()->first;
          left.erase(left.begin());
          if (!left.empty()) {
            const std::uint32_t period = left.begin()->first - first;
            for (std::uint32_t p = first + period; left.count(p); p += period) {
              run.push_back(left.at(p));
              left.erase(p);
            }
          }
          groups.push_back(std::move(run));
        }
      }
    }

    // Order groups so that a group reading a column runs before the group
    // that overwrites it.
    const std::size_t n = groups.size();
    std::vector<std::set<std::size_t>> reads(n), writes(n);
    for (std::size_t i = 0; i < n; ++i) {
      reads[i] = detail::read_columns(groups[i], cfg);
      writes[i] = detail::written_columns(groups[i], cfg);
    }
    std::vector<std::vector<std::size_t>> after(n);
    std::vector<std::size_t> indegree(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && std::any_of(writes[j].begin(), writes[j].end(),
                                  [&](std::size_t c) { return reads[i].count(c) > 0; })) {
          after[i].push_back(j);
          ++indegree[j];
        }
    std::vector<bool> done(n, false);
    for (std::size_t emitted = 0; emitted < n; ++emitted) {
      std::size_t pick = n;
      for (std::size_t i = 0; i < n && pick == n; ++i)
        if (!done[i] && indegree[i] == 0) pick = i;
      if (pick == n)
        throw Error("legalize: operation " + std::to_string(index) +
                    " has a cyclic read/write dependency between its gates");
      done[pick] = true;
      for (auto j : after[pick]) --indegree[j];
      Operation part = model == Model::Serial ? detail::serial_op(groups[pick].front(), cfg)
                                              : detail::tight_op(groups[pick], cfg);
      if (auto v = is_legal(model, part, cfg); !v)
        throw Error("legalize: cannot rewrite operation " + std::to_string(index) + ": " +
                    to_string(v.reason));
      result.program.operations.push_back(std::move(part));
    }
  }
  return result;
}

/// Copies src into column dst_intra of every partition in dst, using a
/// doubling tree of two-inversion copies through tmp_intra. Sets of two or
/// more partitions first stage the value into src's own partition, whose
/// dst_intra column is therefore overwritten.
inline Program broadcast(ColumnRef src, const std::set<std::uint32_t>& dst,
                         std::uint32_t dst_intra, std::uint32_t tmp_intra,
                         const CrossbarConfig& cfg, Model model) {
  Program prog;
  if (dst.empty()) return prog;
  if (tmp_intra == dst_intra || tmp_intra == src.intra)
    throw Error("broadcast: layout collision on the temporary column");
  for (auto p : dst)
    if (p >= cfg.k) throw Error("broadcast: destination partition out of range");
  auto copy = [&](std::vector<std::pair<ColumnRef, std::uint32_t>> moves) {
    std::vector<Gate> first, second;
    for (auto [from, to] : moves) {
      first.push_back(Gate::inv(from, {to, tmp_intra}));
      second.push_back(Gate::inv({to, tmp_intra}, {to, dst_intra}));
    }
    prog.operations.push_back(detail::tight_op(first, cfg));
    prog.operations.push_back(detail::tight_op(second, cfg));
  };
  const std::uint32_t root = src.partition;
  if (dst.size() == 1) {
    copy({{src, *dst.begin()}});
  } else {
    if (src.intra != dst_intra) copy({{src, root}});
    std::set<std::uint32_t> all = dst;
    all.insert(root);
    const std::vector<std::uint32_t> positions(all.begin(), all.end());
    for (const auto& level : doubling_tree(root, positions)) {
      std::vector<std::pair<ColumnRef, std::uint32_t>> moves;
      for (auto [from, to] : level) moves.push_back({{from, dst_intra}, to});
      copy(moves);
    }
  }
  return legalize(prog, cfg, model).program;
}

/// Inverting moves of column src_intra from partition p to column tmp_intra
/// of partition p + offset, for every p with both ends inside [first, last].
/// Moves are split into |offset| + 1 interleaved waves so that spans inside
/// a wave are disjoint; every wave has one distance and a fixed period.
inline std::vector<Operation> shift_waves(int offset, std::uint32_t src_intra,
                                          std::uint32_t tmp_intra, std::uint32_t first,
                                          std::uint32_t last, const CrossbarConfig& cfg) {
  const std::uint32_t d = static_cast<std::uint32_t>(offset < 0 ? -offset : offset);
  if (d >= cfg.k) throw Error("shift: offset must be smaller than k");
  std::vector<Operation> waves;
  if (d == 0) return waves;
  for (std::uint32_t r = 0; r <= d; ++r) {
    std::vector<Gate> gates;
    for (std::uint32_t p = first; p <= last; ++p) {
      const std::int64_t q = static_cast<std::int64_t>(p) + offset;
      if (q < first || q > last || (p - first) % (d + 1) != r) continue;
      gates.push_back(Gate::inv({p, src_intra}, {static_cast<std::uint32_t>(q), tmp_intra}));
    }
    if (!gates.empty()) waves.push_back(detail::tight_op(gates, cfg));
  }
  return waves;
}

/// Moves column src_intra of every partition to column dst_intra of the
/// partition offset positions away, in a constant number of cycles.
/// Partitions that receive nothing keep their dst_intra value.
inline Program shift_all(int offset, std::uint32_t src_intra, std::uint32_t dst_intra,
                         std::uint32_t tmp_intra, const CrossbarConfig& cfg, Model model) {
  if (tmp_intra == src_intra || tmp_intra == dst_intra)
    throw Error("shift: layout collision on the temporary column");
  Program prog;
  const auto last = static_cast<std::uint32_t>(cfg.k - 1);
  for (auto& w : shift_waves(offset, src_intra, tmp_intra, 0, last, cfg))
    prog.operations.push_back(std::move(w));
  if (prog.operations.empty()) return prog;
  std::vector<Gate> land;
  for (std::uint32_t p = 0; p <= last; ++p) {
    const std::int64_t from = static_cast<std::int64_t>(p) - offset;
    if (from >= 0 && from <= last) land.push_back(Gate::inv({p, tmp_intra}, {p, dst_intra}));
  }
  prog.operations.push_back(detail::tight_op(land, cfg));
  return legalize(prog, cfg, model).program;
}

// ---------------------------------------------------------------------------
// Multipliers.

struct AlgorithmLayout {
  std::size_t bits = 0;
  Model model = Model::Serial;
  std::vector<std::size_t> a;        // operand a, LSB first
  std::vector<std::size_t> b;        // operand b, LSB first
  std::vector<std::size_t> product;  // 2*bits result columns, LSB first
};

struct MultiplierProgram {
  AlgorithmLayout layout;
  Program program;
};

namespace detail {

/// One gate of a netlist over abstract column slots.
struct Step {
  GateKind kind;
  std::uint32_t a, b, out;
};

// NOR-only full adder, 9 gates. x is overwritten; y is only read; the sum
// lands in `sum` and the carry overwrites z.
//   g1 = x NOR y        g4 = g2 NOR g3 = XNOR(x, y)    g7 = z NOR g5
//   g2 = x NOR g1       g5 = g4 NOR z                  g8 = g6 NOR g7 = x^y^z
//   g3 = y NOR g1       g6 = g4 NOR g5                 g9 = g1 NOR g5 = maj
inline std::vector<Step> full_adder(std::uint32_t x, std::uint32_t y, std::uint32_t z,
                                    std::uint32_t t1, std::uint32_t t2, std::uint32_t t3,
                                    std::uint32_t sum) {
  using K = GateKind;
  return {{K::Nor2, x, y, t1},  {K::Nor2, x, t1, t2},  {K::Nor2, y, t1, t3},
          {K::Nor2, t2, t3, x}, {K::Nor2, x, z, t2},   {K::Nor2, x, t2, t3},
          {K::Nor2, z, t2, x},  {K::Nor2, t3, x, sum}, {K::Nor2, t1, t2, z}};
}

// Half adder, 6 gates: y <- y ^ z, z <- y & z.
inline std::vector<Step> half_adder(std::uint32_t y, std::uint32_t z, std::uint32_t t1,
                                    std::uint32_t t2, std::uint32_t t3) {
  using K = GateKind;
  return {{K::Nor2, y, z, t1},  {K::Nor2, y, t1, t2}, {K::Nor2, z, t1, t3},
          {K::Nor2, t2, t3, z}, {K::Not, z, z, y},    {K::Nor2, t1, y, z}};
}

inline Gate make_gate(GateKind kind, ColumnRef a, ColumnRef b, ColumnRef out) {
  switch (kind) {
    case GateKind::Nor2: return Gate::nor(a, b, out);
    case GateKind::Not: return Gate::inv(a, out);
    case GateKind::Init1: return Gate::init1(out);
    case GateKind::Init0: return Gate::init0(out);
  }
  return {};
}

/// Inserts an INIT1 cycle for the outputs ahead of every logic cycle.
inline Program with_output_init(const Program& prog, const CrossbarConfig& cfg, bool serial) {
  Program out;
  for (const auto& op : prog.operations) {
    if (cycle_kind(op) == CycleKind::Logic) {
      std::vector<Gate> inits;
      for (const auto& g : op.gates) inits.push_back(Gate::init1(g.out));
      out.operations.push_back(serial ? Operation{inits, op.division} : tight_op(inits, cfg));
    }
    out.operations.push_back(op);
  }
  return out;
}

/// Per-row AND of two single bits followed by a zero high bit.
inline Program and_fragment(ColumnRef a, ColumnRef b, ColumnRef na, ColumnRef nb, ColumnRef lo,
                            ColumnRef hi, const CrossbarConfig& cfg, bool serial) {
  auto op = [&](const Gate& g) { return serial ? serial_op(g, cfg) : tight_op({g}, cfg); };
  Program p;
  p.operations = {op(Gate::inv(a, na)), op(Gate::inv(b, nb)), op(Gate::nor(na, nb, lo)),
                  op(Gate::init0(hi))};
  return p;
}

}  // namespace detail

/// Shift-and-add multiplier with one gate per cycle. Precomputes both
/// operand complements, then for each bit of b forms the partial-product
/// row and ripples it through a carry-save accumulator; a final ripple-carry
/// pass resolves the high half.
inline MultiplierProgram serial_multiplier(std::size_t bits, const CrossbarConfig& cfg) {
  if (bits == 0 || bits > 32) throw Error("serial_multiplier: bit width must be in [1, 32]");
  const std::size_t need = 9 * bits + 4;
  if (cfg.n_cols < need)
    throw Error("serial_multiplier: needs " + std::to_string(need) + " columns");

  MultiplierProgram mp;
  auto& L = mp.layout;
  L.bits = bits;
  L.model = Model::Serial;
  std::size_t next = 0;
  auto alloc = [&](std::size_t count) {
    std::vector<std::size_t> v(count);
    for (auto& c : v) c = next++;
    return v;
  };
  auto ref = [&](std::size_t col) { return column_ref(col, cfg); };
  auto& prog = mp.program.operations;
  auto emit = [&](const Gate& g) { prog.push_back(detail::serial_op(g, cfg)); };

  L.a = alloc(bits);
  L.b = alloc(bits);
  if (bits == 1) {
    const auto tmp = alloc(2);
    L.product = alloc(2);
    mp.program = detail::and_fragment(ref(L.a[0]), ref(L.b[0]), ref(tmp[0]), ref(tmp[1]),
                                      ref(L.product[0]), ref(L.product[1]), cfg, true);
  } else {
    const auto na = alloc(bits), nb = alloc(bits), pp = alloc(bits);
    const auto s = alloc(bits - 1);  // s[j-1] holds sum bit j
    const auto c = alloc(bits);
    L.product = alloc(2 * bits);
    const auto t = alloc(3);
    const std::size_t zero = alloc(1)[0], cin = alloc(1)[0];
    auto sum_col = [&](std::size_t j) { return j == bits ? zero : s[j - 1]; };
    auto run = [&](const std::vector<detail::Step>& steps) {
      for (const auto& st : steps)
        emit(detail::make_gate(st.kind, ref(st.a), ref(st.b), ref(st.out)));
    };

    for (std::size_t j = 0; j < bits; ++j) emit(Gate::inv(ref(L.a[j]), ref(na[j])));
    for (std::size_t j = 0; j < bits; ++j) emit(Gate::inv(ref(L.b[j]), ref(nb[j])));
    for (auto col : s) emit(Gate::init0(ref(col)));
    for (auto col : c) emit(Gate::init0(ref(col)));
    emit(Gate::init0(ref(zero)));
    emit(Gate::init0(ref(cin)));

    for (std::size_t i = 0; i < bits; ++i) {
      for (std::size_t j = 0; j < bits; ++j) emit(Gate::nor(ref(na[j]), ref(nb[i]), ref(pp[j])));
      for (std::size_t j = 0; j < bits; ++j) {
        const auto x = static_cast<std::uint32_t>(pp[j]);
        const auto y = static_cast<std::uint32_t>(sum_col(j + 1));
        const auto z = static_cast<std::uint32_t>(c[j]);
        const auto out = static_cast<std::uint32_t>(j == 0 ? L.product[i] : s[j - 1]);
        run(detail::full_adder(x, y, z, static_cast<std::uint32_t>(t[0]),
                               static_cast<std::uint32_t>(t[1]), static_cast<std::uint32_t>(t[2]),
                               out));
      }
    }
    // High half: product[bits + j] = s[j+1] + c[j] + carry.
    for (std::size_t j = 0; j < bits; ++j) {
      const bool top = j + 1 == bits;
      const auto x = static_cast<std::uint32_t>(top ? c[j] : sum_col(j + 1));
      const auto y = static_cast<std::uint32_t>(top ? zero : c[j]);
      run(detail::full_adder(x, y, static_cast<std::uint32_t>(cin),
                             static_cast<std::uint32_t>(t[0]), static_cast<std::uint32_t>(t[1]),
                             static_cast<std::uint32_t>(t[2]),
                             static_cast<std::uint32_t>(L.product[bits + j])));
    }
  }
  if (cfg.enforce_init) mp.program = detail::with_output_init(mp.program, cfg, true);
  return mp;
}

/// Column roles inside each partition of the partitioned multiplier.
struct PartitionLayout {
  static constexpr std::uint32_t a = 0, b = 1, na = 2, nbv = 3, v = 4, pp = 5, s = 6, c = 7,
                                 t1 = 8, t2 = 9, t3 = 10, sh = 11, lo = 12, hi = 13;
  static constexpr std::uint32_t columns = 14;
};

/// Carry-save multiplier spread over the first `bits` partitions, with bit j
/// of each operand in partition j. Every iteration broadcasts the inverted
/// multiplier bit with a doubling tree, forms all partial products at once,
/// shifts the running sum one partition down and runs one full adder per
/// partition; the finished low bit is moved to its result partition. A
/// second pass of half adders drains the carries into the high half.
///
/// Under the unlimited model the broadcast tree copies from whichever column
/// holds the bit and fixes polarity once at the end; the restricted models
/// use a rightward tree of uniform levels. The result is then legalized for
/// the requested model.
inline MultiplierProgram partitioned_multiplier(std::size_t bits, const CrossbarConfig& cfg,
                                                Model model) {
  using PL = PartitionLayout;
  if (model == Model::Serial) throw Error("partitioned_multiplier: use serial_multiplier");
  if (bits == 0 || bits > 32) throw Error("partitioned_multiplier: bit width must be in [1, 32]");
  if (bits > cfg.k)
    throw Error("partitioned_multiplier: needs at least " + std::to_string(bits) + " partitions");
  if (cfg.width() < PL::columns)
    throw Error("partitioned_multiplier: needs " + std::to_string(PL::columns) +
                " columns per partition");

  MultiplierProgram mp;
  auto& L = mp.layout;
  L.bits = bits;
  L.model = model;
  const auto K = static_cast<std::uint32_t>(bits);
  for (std::uint32_t p = 0; p < K; ++p) {
    L.a.push_back(column_of({p, PL::a}, cfg));
    L.b.push_back(column_of({p, PL::b}, cfg));
  }
  for (std::uint32_t p = 0; p < K; ++p) L.product.push_back(column_of({p, PL::lo}, cfg));
  for (std::uint32_t p = 0; p < K; ++p) L.product.push_back(column_of({p, PL::hi}, cfg));

  Program prog;
  if (bits == 1) {
    L.product = {column_of({0, PL::lo}, cfg), column_of({0, PL::hi}, cfg)};
    prog = detail::and_fragment({0, PL::a}, {0, PL::b}, {0, PL::na}, {0, PL::nbv}, {0, PL::lo},
                                {0, PL::hi}, cfg, false);
  } else {
    auto emit = [&](std::vector<Gate> gates) {
      if (!gates.empty()) prog.operations.push_back(detail::tight_op(std::move(gates), cfg));
    };
    auto each = [&](GateKind kind, std::uint32_t a, std::uint32_t b, std::uint32_t out) {
      std::vector<Gate> gates;
      for (std::uint32_t p = 0; p < K; ++p)
        gates.push_back(detail::make_gate(kind, {p, a}, {p, b}, {p, out}));
      emit(std::move(gates));
    };
    auto run = [&](const std::vector<detail::Step>& steps) {
      for (const auto& st : steps) each(st.kind, st.a, st.b, st.out);
    };
    auto shift_sum_down = [&] {
      for (auto& w : shift_waves(-1, PL::s, PL::sh, 0, K - 1, cfg))
        prog.operations.push_back(std::move(w));
      // The top partition reads its constant-one sh column, so s becomes 0.
      each(GateKind::Not, PL::sh, PL::sh, PL::s);
    };
    auto extract = [&](std::uint32_t target, std::uint32_t col) {
      emit({Gate::inv({0, PL::s}, {target, PL::t1})});
      emit({Gate::inv({target, PL::t1}, {target, col})});
    };
    std::vector<std::uint32_t> all(K);
    for (std::uint32_t p = 0; p < K; ++p) all[p] = p;
    auto broadcast_inverted = [&](std::uint32_t root) {
      // Each partition holds the multiplier bit in some column with some
      // polarity; copies invert, and a final pass fixes positive holders.
      struct Held {
        std::uint32_t col;
        bool positive;
      };
      std::map<std::uint32_t, Held> held{{root, {PL::b, true}}};
      for (const auto& level : doubling_tree(root, all)) {
        std::vector<Gate> gates;
        for (auto [from, to] : level) {
          const auto h = held.at(from);
          const std::uint32_t col = h.positive ? PL::nbv : PL::v;
          gates.push_back(Gate::inv({from, h.col}, {to, col}));
          held[to] = {col, !h.positive};
        }
        emit(std::move(gates));
      }
      std::vector<Gate> fix;
      for (auto [p, h] : held)
        if (h.positive) fix.push_back(Gate::inv({p, h.col}, {p, PL::nbv}));
      emit(std::move(fix));
    };

    auto broadcast_uniform = [&](std::uint32_t root) {
      // Restricted models: move the inverted bit to partition 0, then grow a
      // rightward tree in which every level is one send and one fix-up.
      emit({Gate::inv({root, PL::b}, {0, PL::nbv})});
      for (const auto& level : doubling_tree(0, all)) {
        std::vector<Gate> send, fix;
        for (auto [from, to] : level) {
          send.push_back(Gate::inv({from, PL::nbv}, {to, PL::v}));
          fix.push_back(Gate::inv({to, PL::v}, {to, PL::nbv}));
        }
        emit(std::move(send));
        emit(std::move(fix));
      }
    };

    each(GateKind::Not, PL::a, PL::a, PL::na);
    each(GateKind::Init0, PL::s, PL::s, PL::s);
    each(GateKind::Init0, PL::c, PL::c, PL::c);
    emit({Gate::init1({K - 1, PL::sh})});

    for (std::uint32_t i = 0; i < K; ++i) {
      if (i > 0) shift_sum_down();
      if (model == Model::Unlimited)
        broadcast_inverted(i);
      else
        broadcast_uniform(i);
      each(GateKind::Nor2, PL::na, PL::nbv, PL::pp);
      run(detail::full_adder(PL::pp, PL::s, PL::c, PL::t1, PL::t2, PL::t3, PL::s));
      extract(i, PL::lo);
    }
    for (std::uint32_t t = 0; t < K; ++t) {
      shift_sum_down();
      run(detail::half_adder(PL::s, PL::c, PL::t1, PL::t2, PL::t3));
      extract(t, PL::hi);
    }
  }
  if (model != Model::Unlimited) {
    CrossbarConfig plain = cfg;
    plain.enforce_init = false;
    prog = legalize(prog, plain, model).program;
  }
  if (cfg.enforce_init) prog = detail::with_output_init(prog, cfg, false);
  mp.program = std::move(prog);
  return mp;
}

inline MultiplierProgram build_multiplier(std::size_t bits, const CrossbarConfig& cfg,
                                          Model model) {
  return model == Model::Serial ? serial_multiplier(bits, cfg)
                                : partitioned_multiplier(bits, cfg, model);
}

}  // namespace mempart
