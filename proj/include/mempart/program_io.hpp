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

// Program files (JSON), per-cycle hex control streams and stats records.
//
// Program file:
//   {
//     "format": "mempart-program/1",
//     "n_cols": 1024, "k": 32,                 (required)
//     "n_rows": 1024, "enforce_init": false,   (optional)
//     "operations": [
//       {"gates": [{"kind": "NOR2", "in_a": [p, i], "in_b": [p, i], "out": [p, i]}],
//        "isolate": [0, 1, ...]}               (isolate optional: tight division)
//     ],
//     "layout": {"bits": N, "model": "minimal",
//                "a": [...], "b": [...], "product": [...]}   (optional)
//   }
// NOT gates may omit in_b; INIT1/INIT0 gates carry only "out". Unknown keys
// are rejected at every level.

#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "mempart/algokit.hpp"
#include "mempart/codec.hpp"
#include "mempart/crossbar.hpp"
#include "mempart/exec.hpp"

namespace mempart {

inline constexpr const char* kProgramFormat = "mempart-program/1";

class FormatError : public Error {
 public:
  using Error::Error;
};

struct ProgramFile {
  CrossbarConfig cfg;
  Program program;
  std::optional<AlgorithmLayout> layout;
};

namespace detail {

using nlohmann::json;

inline void only_keys(const json& j, std::initializer_list<const char*> allowed,
                      const std::string& where) {
  if (!j.is_object()) throw FormatError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || it.key() == k;
    if (!ok) throw FormatError(where + ": unknown field \"" + it.key() + "\"");
  }
}

inline const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw FormatError(where + ": missing field \"" + key + "\"");
  return j.at(key);
}

inline std::size_t as_size(const json& j, const std::string& where) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
    throw FormatError(where + ": expected a non-negative integer");
  return j.get<std::size_t>();
}

inline ColumnRef as_ref(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw FormatError(where + ": expected [partition, index]");
  return {static_cast<std::uint32_t>(as_size(j[0], where)),
          static_cast<std::uint32_t>(as_size(j[1], where))};
}

inline json ref_json(ColumnRef r) { return json::array({r.partition, r.intra}); }

inline std::vector<std::size_t> as_columns(const json& j, const std::string& where) {
  if (!j.is_array()) throw FormatError(where + ": expected a list of columns");
  std::vector<std::size_t> out;
  for (const auto& c : j) out.push_back(as_size(c, where));
  return out;
}

inline Gate parse_gate(const json& j, const std::string& where) {
  only_keys(j, {"kind", "in_a", "in_b", "out"}, where);
  const auto& kj = need(j, "kind", where);
  if (!kj.is_string()) throw FormatError(where + ": kind must be a string");
  const auto kind = gate_kind_from_string(kj.get<std::string>());
  if (!kind) throw FormatError(where + ": unknown gate kind \"" + kj.get<std::string>() + "\"");
  const ColumnRef out = as_ref(need(j, "out", where), where + ".out");
  switch (*kind) {
    case GateKind::Nor2:
      return Gate::nor(as_ref(need(j, "in_a", where), where + ".in_a"),
                       as_ref(need(j, "in_b", where), where + ".in_b"), out);
    case GateKind::Not: {
      const ColumnRef a = as_ref(need(j, "in_a", where), where + ".in_a");
      if (j.contains("in_b") && as_ref(j["in_b"], where + ".in_b") != a)
        throw FormatError(where + ": NOT gate inputs must be the same column");
      return Gate::inv(a, out);
    }
    case GateKind::Init1:
    case GateKind::Init0:
      if (j.contains("in_a") || j.contains("in_b"))
        throw FormatError(where + ": INIT gates take no inputs");
      return *kind == GateKind::Init1 ? Gate::init1(out) : Gate::init0(out);
  }
  throw FormatError(where + ": bad gate");
}

inline json gate_json(const Gate& g) {
  json j{{"kind", to_string(g.kind)}};
  if (g.kind == GateKind::Nor2) {
    j["in_a"] = ref_json(g.in_a);
    j["in_b"] = ref_json(g.in_b);
  } else if (g.kind == GateKind::Not) {
    j["in_a"] = ref_json(g.in_a);
  }
  j["out"] = ref_json(g.out);
  return j;
}

}  // namespace detail

inline ProgramFile program_from_json(const nlohmann::json& j) {
  using detail::need;
  detail::only_keys(j, {"format", "n_rows", "n_cols", "k", "enforce_init", "operations", "layout"},
                    "program");
  if (j.contains("format") && j["format"] != kProgramFormat)
    throw FormatError("program: unsupported format tag");
  ProgramFile f;
  const std::size_t rows = j.contains("n_rows") ? detail::as_size(j["n_rows"], "n_rows") : 1;
  bool enforce = false;
  if (j.contains("enforce_init")) {
    if (!j["enforce_init"].is_boolean()) throw FormatError("enforce_init: expected a boolean");
    enforce = j["enforce_init"].get<bool>();
  }
  f.cfg = CrossbarConfig::make(rows, detail::as_size(need(j, "n_cols", "program"), "n_cols"),
                               detail::as_size(need(j, "k", "program"), "k"), enforce);
  const auto& ops = need(j, "operations", "program");
  if (!ops.is_array()) throw FormatError("operations: expected a list");
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const std::string where = "operations[" + std::to_string(i) + "]";
    detail::only_keys(ops[i], {"gates", "isolate"}, where);
    const auto& gj = need(ops[i], "gates", where);
    if (!gj.is_array()) throw FormatError(where + ".gates: expected a list");
    Operation op;
    for (std::size_t g = 0; g < gj.size(); ++g)
      op.gates.push_back(detail::parse_gate(gj[g], where + ".gates[" + std::to_string(g) + "]"));
    if (ops[i].contains("isolate")) {
      const auto& iso = ops[i]["isolate"];
      if (!iso.is_array()) throw FormatError(where + ".isolate: expected a list");
      for (const auto& b : iso) {
        if (b.is_boolean()) op.division.isolate.push_back(b.get<bool>());
        else if (b == 0 || b == 1) op.division.isolate.push_back(b == 1);
        else throw FormatError(where + ".isolate: entries must be 0/1");
      }
    } else {
      for (const auto& g : op.gates)
        if (!in_bounds(g.in_a, f.cfg) || !in_bounds(g.in_b, f.cfg) || !in_bounds(g.out, f.cfg))
          throw FormatError(where + ": column out of range");
      try {
        op.division = tight_division(op.gates, f.cfg);
      } catch (const Error& e) {
        throw FormatError(where + ": " + e.what());
      }
    }
    f.program.operations.push_back(std::move(op));
  }
  if (j.contains("layout")) {
    const auto& lj = j["layout"];
    detail::only_keys(lj, {"bits", "model", "a", "b", "product"}, "layout");
    AlgorithmLayout L;
    L.bits = detail::as_size(need(lj, "bits", "layout"), "layout.bits");
    const auto& mj = need(lj, "model", "layout");
    const auto model = mj.is_string() ? model_from_string(mj.get<std::string>()) : std::nullopt;
    if (!model) throw FormatError("layout.model: unknown model");
    L.model = *model;
    L.a = detail::as_columns(need(lj, "a", "layout"), "layout.a");
    L.b = detail::as_columns(need(lj, "b", "layout"), "layout.b");
    L.product = detail::as_columns(need(lj, "product", "layout"), "layout.product");
    for (const auto* v : {&L.a, &L.b, &L.product})
      for (auto c : *v)
        if (c >= f.cfg.n_cols) throw FormatError("layout: column out of range");
    f.layout = std::move(L);
  }
  return f;
}

inline nlohmann::json program_to_json(const ProgramFile& f) {
  nlohmann::json j{{"format", kProgramFormat},
                   {"n_rows", f.cfg.n_rows},
                   {"n_cols", f.cfg.n_cols},
                   {"k", f.cfg.k},
                   {"enforce_init", f.cfg.enforce_init}};
  auto ops = nlohmann::json::array();
  for (const auto& op : f.program.operations) {
    nlohmann::json oj;
    oj["gates"] = nlohmann::json::array();
    for (const auto& g : op.gates) oj["gates"].push_back(detail::gate_json(g));
    auto iso = nlohmann::json::array();
    for (bool b : op.division.isolate) iso.push_back(b ? 1 : 0);
    oj["isolate"] = std::move(iso);
    ops.push_back(std::move(oj));
  }
  j["operations"] = std::move(ops);
  if (f.layout)
    j["layout"] = {{"bits", f.layout->bits},
                   {"model", to_string(f.layout->model)},
                   {"a", f.layout->a},
                   {"b", f.layout->b},
                   {"product", f.layout->product}};
  return j;
}

inline ProgramFile read_program(std::istream& is) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("program: ") + e.what());
  }
  return program_from_json(j);
}

inline void write_program(std::ostream& os, const ProgramFile& f) {
  os << program_to_json(f).dump(1) << '\n';
}

// Hex control stream: one line per cycle holding the MSB-first message.
// INIT cycles carry a trailing " init1" or " init0" tag because the wire
// message alone cannot tell them apart from logic half-gates.

inline void write_hex_stream(std::ostream& os, const Program& prog, Model model,
                             const CrossbarConfig& cfg) {
  for (const auto& op : prog.operations) {
    const auto e = encode(op, model, cfg);
    os << to_hex(e.bits);
    if (e.mode == CycleKind::Init1) os << " init1";
    if (e.mode == CycleKind::Init0) os << " init0";
    os << '\n';
  }
}

inline Program read_hex_stream(std::istream& is, Model model, const CrossbarConfig& cfg) {
  Program prog;
  const std::size_t len = message_len(model, cfg);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string hex, tag, extra;
    if (!(ls >> hex)) continue;
    ls >> tag >> extra;
    if (!extra.empty()) throw FormatError("line " + std::to_string(lineno) + ": trailing text");
    DecodeMode mode = CycleKind::Logic;
    if (tag == "init1") mode = CycleKind::Init1;
    else if (tag == "init0") mode = CycleKind::Init0;
    else if (!tag.empty())
      throw FormatError("line " + std::to_string(lineno) + ": unknown tag \"" + tag + "\"");
    try {
      prog.operations.push_back(decode(from_hex(hex, len), model, cfg, mode));
    } catch (const DecodeError& e) {
      throw DecodeError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return prog;
}

inline nlohmann::json stats_to_json(const ExecStats& s) {
  return {{"cycles", s.cycles}, {"gates", s.gate_count}, {"footprint", s.footprint()}};
}

}  // namespace mempart
