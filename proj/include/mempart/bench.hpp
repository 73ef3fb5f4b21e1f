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

// Multiplier benchmark: generate, simulate and check each model, then
// report latency, control width, area and energy.

#pragma once

#include <cstdint>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mempart/algokit.hpp"
#include "mempart/codec.hpp"
#include "mempart/exec.hpp"

namespace mempart {

/// Report order for "all".
inline const std::vector<Model>& all_models() {
  static const std::vector<Model> order{Model::Unlimited, Model::Standard, Model::Minimal,
                                        Model::Serial};
  return order;
}

inline std::vector<Model> parse_models(const std::string& text) {
  if (text == "all") return all_models();
  std::vector<Model> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto m = model_from_string(item);
    if (!m) throw Error("unknown model \"" + item + "\"");
    out.push_back(*m);
  }
  return out;
}

struct ExperimentConfig {
  std::size_t n_cols = 1024;
  std::size_t k = 32;
  std::size_t bits = 32;
  std::vector<Model> models = all_models();
  std::size_t rows = 1024;
  std::uint64_t seed = 1;
  bool stop_on_failure = true;
};

struct ReportRow {
  Model model = Model::Serial;
  std::size_t latency_cycles = 0;
  std::size_t control_bits = 0;
  std::size_t area_memristors = 0;
  std::size_t energy_gates = 0;
  bool correct = false;
};

class BenchFailure : public Error {
 public:
  BenchFailure(Model model, std::size_t row, std::uint64_t a, std::uint64_t b, std::uint64_t got)
      : Error(std::string(to_string(model)) + ": row " + std::to_string(row) + ": " +
              std::to_string(a) + " * " + std::to_string(b) + " gave " + std::to_string(got)),
        row(row) {}
  std::size_t row;
};

/// Operand pairs for the experiment; identical for every model.
inline std::vector<std::pair<std::uint64_t, std::uint64_t>> bench_operands(std::size_t bits,
                                                                           std::size_t rows,
                                                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::uint64_t mask = bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out(rows);
  for (auto& [a, b] : out) {
    a = rng() & mask;
    b = rng() & mask;
  }
  return out;
}

inline ReportRow bench_model(const ExperimentConfig& ex, Model model) {
  const auto cfg = CrossbarConfig::make(ex.rows, ex.n_cols, ex.k, false);
  const auto mp = build_multiplier(ex.bits, cfg, model);
  const auto operands = bench_operands(ex.bits, ex.rows, ex.seed);
  CrossbarState state(ex.rows, ex.n_cols, false);
  for (std::size_t r = 0; r < ex.rows; ++r) {
    write_value(state, r, mp.layout.a, operands[r].first);
    write_value(state, r, mp.layout.b, operands[r].second);
  }
  const auto stats = run_program(state, mp.program, cfg);
  ReportRow row{model, stats.cycles, message_len(model, cfg), stats.footprint(), stats.gate_count,
                true};
  for (std::size_t r = 0; r < ex.rows; ++r) {
    const auto [a, b] = operands[r];
    const auto got = read_value(state, r, mp.layout.product);
    if (got != a * b) {
      if (ex.stop_on_failure) throw BenchFailure(model, r, a, b, got);
      row.correct = false;
      break;
    }
  }
  return row;
}

inline std::vector<ReportRow> bench_mult(const ExperimentConfig& ex) {
  if (ex.models.empty()) throw Error("bench: no models selected");
  if (ex.rows == 0) throw Error("bench: row count must be positive");
  std::vector<ReportRow> rows;
  for (auto m : ex.models) rows.push_back(bench_model(ex, m));
  return rows;
}

enum class ReportFormat { Csv, Text };

inline void emit_report(std::ostream& os, const std::vector<ReportRow>& rows, ReportFormat fmt) {
  if (rows.empty()) throw Error("report: no rows");
  static const char* cols[] = {"model",           "latency_cycles", "control_bits",
                               "area_memristors", "energy_gates",   "correct"};
  auto cells = [](const ReportRow& r) {
    return std::vector<std::string>{to_string(r.model),
                                    std::to_string(r.latency_cycles),
                                    std::to_string(r.control_bits),
                                    std::to_string(r.area_memristors),
                                    std::to_string(r.energy_gates),
                                    r.correct ? "true" : "false"};
  };
  if (fmt == ReportFormat::Csv) {
    for (int i = 0; i < 6; ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
    for (const auto& r : rows) {
      const auto c = cells(r);
      for (int i = 0; i < 6; ++i) os << (i ? "," : "") << c[i];
      os << '\n';
    }
    return;
  }
  std::size_t width[6];
  for (int i = 0; i < 6; ++i) width[i] = std::string(cols[i]).size();
  for (const auto& r : rows) {
    const auto c = cells(r);
    for (int i = 0; i < 6; ++i) width[i] = std::max(width[i], c[i].size());
  }
  auto line = [&](const std::vector<std::string>& c) {
    for (int i = 0; i < 6; ++i) {
      if (i) os << "  ";
      if (i == 0) os << std::left;
      else os << std::right;
      os << std::setw(static_cast<int>(width[i])) << c[i];
    }
    os << '\n';
  };
  line({cols, cols + 6});
  for (const auto& r : rows) line(cells(r));
}

}  // namespace mempart
