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

// Cycle-accurate row-parallel execution.
//
// State is stored column-major and bit-sliced: each column is a run of
// 64-bit words over the rows, so one gate is a handful of word operations
// no matter how many rows the crossbar has.

#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mempart/crossbar.hpp"

namespace mempart {

class CrossbarState {
 public:
  CrossbarState() = default;
  CrossbarState(std::size_t rows, std::size_t cols, bool fill = false)
      : rows_(rows), cols_(cols), wpc_((rows + 63) / 64), bits_(cols * wpc_, 0) {
    if (fill)
      for (std::size_t c = 0; c < cols; ++c) set_column(c, true);
  }
  explicit CrossbarState(const CrossbarConfig& cfg) : CrossbarState(cfg.n_rows, cfg.n_cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t words_per_column() const { return wpc_; }

  bool get(std::size_t row, std::size_t col) const {
    return (bits_[col * wpc_ + row / 64] >> (row % 64)) & 1U;
  }
  void set(std::size_t row, std::size_t col, bool v) {
    auto& w = bits_[col * wpc_ + row / 64];
    const std::uint64_t bit = std::uint64_t{1} << (row % 64);
    w = v ? (w | bit) : (w & ~bit);
  }

  std::span<const std::uint64_t> column(std::size_t col) const {
    return {bits_.data() + col * wpc_, wpc_};
  }
  std::span<std::uint64_t> column(std::size_t col) { return {bits_.data() + col * wpc_, wpc_}; }

  void set_column(std::size_t col, bool v) {
    auto words = column(col);
    for (std::size_t w = 0; w < wpc_; ++w) words[w] = v ? word_mask(w) : 0;
  }

  /// Valid-row mask for word w; bits past n_rows stay zero.
  std::uint64_t word_mask(std::size_t w) const {
    const std::size_t tail = rows_ - w * 64;
    return tail >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << tail) - 1);
  }

  friend bool operator==(const CrossbarState&, const CrossbarState&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t wpc_ = 0;
  std::vector<std::uint64_t> bits_;
};

struct ExecStats {
  std::size_t cycles = 0;
  std::size_t gate_count = 0;
  std::set<std::size_t> touched_columns;

  std::size_t footprint() const { return touched_columns.size(); }

  ExecStats& operator+=(const ExecStats& d) {
    cycles += d.cycles;
    gate_count += d.gate_count;
    touched_columns.insert(d.touched_columns.begin(), d.touched_columns.end());
    return *this;
  }
  friend bool operator==(const ExecStats&, const ExecStats&) = default;
};

/// Raised by the executor. op_index is set by run_program; row/column are
/// set for initialization violations.
class ExecError : public Error {
 public:
  ExecError(const std::string& what, std::ptrdiff_t row = -1, std::ptrdiff_t column = -1)
      : Error(what), row_(row), column_(column) {}

  std::ptrdiff_t row() const { return row_; }
  std::ptrdiff_t column() const { return column_; }
  std::ptrdiff_t op_index() const { return op_index_; }
  void set_op_index(std::ptrdiff_t i) { op_index_ = i; }

 private:
  std::ptrdiff_t row_;
  std::ptrdiff_t column_;
  std::ptrdiff_t op_index_ = -1;
};

inline void check_state(const CrossbarState& state, const CrossbarConfig& cfg) {
  if (state.rows() != cfg.n_rows || state.cols() != cfg.n_cols)
    throw ExecError("state dimensions do not match the crossbar");
}

/// Executes one cycle. All inputs are read before any output is written.
inline ExecStats execute_op(CrossbarState& state, const Operation& op, const CrossbarConfig& cfg) {
  check_state(state, cfg);
  if (auto v = validate_physical(op, cfg); !v)
    throw ExecError(std::string("physical violation: ") + to_string(v.reason) +
                    (v.detail.empty() ? "" : " (" + v.detail + ")"));

  const std::size_t wpc = state.words_per_column();
  ExecStats delta;
  delta.cycles = 1;
  delta.gate_count = op.gates.size();

  struct Pending {
    std::size_t out;
    std::vector<std::uint64_t> words;
  };
  std::vector<Pending> pending;
  pending.reserve(op.gates.size());

  for (const auto& g : op.gates) {
    const std::size_t out = column_of(g.out, cfg);
    delta.touched_columns.insert(out);
    Pending p{out, std::vector<std::uint64_t>(wpc)};
    if (is_init(g.kind)) {
      const bool one = g.kind == GateKind::Init1;
      for (std::size_t w = 0; w < wpc; ++w) p.words[w] = one ? state.word_mask(w) : 0;
    } else {
      const std::size_t a = column_of(g.in_a, cfg);
      const std::size_t b = column_of(g.in_b, cfg);
      delta.touched_columns.insert(a);
      delta.touched_columns.insert(b);
      if (cfg.enforce_init) {
        auto cur = state.column(out);
        for (std::size_t w = 0; w < wpc; ++w) {
          const std::uint64_t missing = ~cur[w] & state.word_mask(w);
          if (missing != 0) {
            const auto row = w * 64 + static_cast<std::size_t>(__builtin_ctzll(missing));
            throw ExecError("output column " + std::to_string(out) + " not initialized at row " +
                                std::to_string(row),
                            static_cast<std::ptrdiff_t>(row), static_cast<std::ptrdiff_t>(out));
          }
        }
      }
      auto ca = state.column(a);
      auto cb = state.column(b);
      for (std::size_t w = 0; w < wpc; ++w) p.words[w] = ~(ca[w] | cb[w]) & state.word_mask(w);
    }
    pending.push_back(std::move(p));
  }
  for (auto& p : pending) {
    auto dst = state.column(p.out);
    std::copy(p.words.begin(), p.words.end(), dst.begin());
  }
  return delta;
}

inline ExecStats run_program(CrossbarState& state, const Program& prog, const CrossbarConfig& cfg) {
  ExecStats stats;
  for (std::size_t i = 0; i < prog.operations.size(); ++i) {
    try {
      stats += execute_op(state, prog.operations[i], cfg);
    } catch (ExecError& e) {
      e.set_op_index(static_cast<std::ptrdiff_t>(i));
      throw;
    }
  }
  return stats;
}

using BitMatrix = std::vector<std::vector<std::uint8_t>>;

/// Writes bits[r][j] into (row_begin + r, columns[j]). Not a cycle.
inline void load_rows(CrossbarState& state, std::size_t row_begin,
                      const std::vector<std::size_t>& columns, const BitMatrix& bits) {
  if (row_begin + bits.size() > state.rows()) throw Error("load_rows: row range out of bounds");
  for (std::size_t r = 0; r < bits.size(); ++r) {
    if (bits[r].size() != columns.size()) throw Error("load_rows: ragged bit matrix");
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (columns[j] >= state.cols()) throw Error("load_rows: column out of bounds");
      state.set(row_begin + r, columns[j], bits[r][j] != 0);
    }
  }
}

inline BitMatrix read_rows(const CrossbarState& state, std::size_t row_begin, std::size_t row_count,
                           const std::vector<std::size_t>& columns) {
  if (row_begin + row_count > state.rows()) throw Error("read_rows: row range out of bounds");
  BitMatrix out(row_count, std::vector<std::uint8_t>(columns.size()));
  for (std::size_t r = 0; r < row_count; ++r)
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (columns[j] >= state.cols()) throw Error("read_rows: column out of bounds");
      out[r][j] = state.get(row_begin + r, columns[j]) ? 1 : 0;
    }
  return out;
}

/// Little-endian integer helpers: columns[0] holds the least significant bit.
inline void write_value(CrossbarState& state, std::size_t row,
                        const std::vector<std::size_t>& columns, std::uint64_t value) {
  for (std::size_t j = 0; j < columns.size(); ++j) state.set(row, columns[j], (value >> j) & 1U);
}

inline std::uint64_t read_value(const CrossbarState& state, std::size_t row,
                                const std::vector<std::size_t>& columns) {
  std::uint64_t v = 0;
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (state.get(row, columns[j])) v |= std::uint64_t{1} << j;
  return v;
}

// Snapshot format: a header line "mempart-state <rows> <cols>" followed by
// one line of '0'/'1' characters per row.
inline void write_snapshot(std::ostream& os, const CrossbarState& state) {
  os << "mempart-state " << state.rows() << ' ' << state.cols() << '\n';
  std::string line(state.cols(), '0');
  for (std::size_t r = 0; r < state.rows(); ++r) {
    for (std::size_t c = 0; c < state.cols(); ++c) line[c] = state.get(r, c) ? '1' : '0';
    os << line << '\n';
  }
}

inline CrossbarState read_snapshot(std::istream& is) {
  std::string magic;
  std::size_t rows = 0, cols = 0;
  if (!(is >> magic >> rows >> cols) || magic != "mempart-state")
    throw Error("snapshot: bad header");
  CrossbarState state(rows, cols);
  std::string line;
  for (std::size_t r = 0; r < rows; ++r) {
    if (!(is >> line) || line.size() != cols)
      throw Error("snapshot: row " + std::to_string(r) + " malformed");
    for (std::size_t c = 0; c < cols; ++c) {
      if (line[c] != '0' && line[c] != '1') throw Error("snapshot: bad character");
      state.set(r, c, line[c] == '1');
    }
  }
  return state;
}

}  // namespace mempart
