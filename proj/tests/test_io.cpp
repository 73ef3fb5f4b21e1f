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
#include <sstream>

#include <gtest/gtest.h>

#include "mempart/program_io.hpp"
#include "test_support.hpp"

namespace mempart {
namespace {

using nlohmann::json;

ProgramFile parse(const std::string& text) {
  std::istringstream is(text);
  return read_program(is);
}

TEST(ProgramJson, RoundTripWithLayout) {
  ProgramFile f;
  f.cfg = CrossbarConfig::make(16, 256, 16, false);
  const auto mp = build_multiplier(4, f.cfg, Model::Minimal);
  f.program = mp.program;
  f.layout = mp.layout;
  std::stringstream ss;
  write_program(ss, f);
  const auto back = read_program(ss);
  EXPECT_EQ(back.program, f.program);
  EXPECT_EQ(back.cfg.n_cols, 256u);
  EXPECT_EQ(back.cfg.k, 16u);
  EXPECT_EQ(back.cfg.n_rows, 16u);
  EXPECT_FALSE(back.cfg.enforce_init);
  ASSERT_TRUE(back.layout);
  EXPECT_EQ(back.layout->model, Model::Minimal);
  EXPECT_EQ(back.layout->bits, 4u);
  EXPECT_EQ(back.layout->a, mp.layout.a);
  EXPECT_EQ(back.layout->product, mp.layout.product);
}

TEST(ProgramJson, MinimalDocument) {
  const auto f = parse(R"({
    "n_cols": 16, "k": 4,
    "operations": [
      {"gates": [{"kind": "NOR2", "in_a": [0, 0], "in_b": [0, 1], "out": [1, 2]},
                 {"kind": "NOT", "in_a": [3, 0], "out": [3, 1]}]},
      {"gates": [{"kind": "INIT1", "out": [2, 2]}], "isolate": [true, 0, 1]}
    ]})");
  ASSERT_EQ(f.program.size(), 2u);
  EXPECT_EQ(f.program.operations[0].division.isolate, (std::vector<bool>{false, true, true}));
  EXPECT_EQ(f.program.operations[0].gates[1], Gate::inv({3, 0}, {3, 1}));
  EXPECT_EQ(f.program.operations[1].division.isolate, (std::vector<bool>{true, false, true}));
  EXPECT_EQ(f.program.operations[1].gates[0], Gate::init1({2, 2}));
  EXPECT_TRUE(f.cfg.enforce_init == false);
  EXPECT_FALSE(f.layout);
}

TEST(ProgramJson, RejectsUnknownFields) {
  const std::string base = R"({"n_cols": 16, "k": 4, "operations": [)";
  EXPECT_THROW(parse(R"({"n_cols": 16, "k": 4, "operations": [], "extra": 1})"), FormatError);
  EXPECT_THROW(parse(base + R"({"gates": [], "speed": 2}]})"), FormatError);
  EXPECT_THROW(
      parse(base + R"({"gates": [{"kind": "NOT", "in_a": [0, 0], "out": [0, 1], "x": 0}]}]})"),
      FormatError);
  EXPECT_THROW(parse(R"({"n_cols": 16, "k": 4, "operations": [],
                         "layout": {"bits": 1, "model": "serial", "a": [], "b": [],
                                    "product": [], "note": ""}})"),
               FormatError);
}

TEST(ProgramJson, RejectsMalformed) {
  const std::string base = R"({"n_cols": 16, "k": 4, "operations": [{"gates": [)";
  EXPECT_THROW(parse("not json"), FormatError);
  EXPECT_THROW(parse(R"({"k": 4, "operations": []})"), FormatError);
  EXPECT_THROW(parse(R"({"n_cols": 16, "k": 4})"), FormatError);
  EXPECT_THROW(parse(R"({"format": "other", "n_cols": 16, "k": 4, "operations": []})"),
               FormatError);
  EXPECT_THROW(parse(base + R"({"kind": "XOR", "in_a": [0, 0], "in_b": [0, 1], "out": [0, 2]}]}]})"),
               FormatError);
  EXPECT_THROW(parse(base + R"({"kind": "NOR2", "in_a": [0, 0], "out": [0, 2]}]}]})"), FormatError);
  EXPECT_THROW(parse(base + R"({"kind": "INIT0", "in_a": [0, 0], "out": [0, 2]}]}]})"),
               FormatError);
  EXPECT_THROW(parse(base + R"({"kind": "NOT", "in_a": [0, 0], "in_b": [0, 1], "out": [0, 2]}]}]})"),
               FormatError);
  EXPECT_THROW(parse(base + R"({"kind": "NOT", "in_a": [0, -1], "out": [0, 2]}]}]})"), FormatError);
  EXPECT_THROW(parse(base + R"({"kind": "NOT", "in_a": [0, 9], "out": [0, 2]}]}]})"), FormatError);
  EXPECT_THROW(parse(base + R"({"kind": "NOT", "in_a": [0], "out": [0, 2]}]}]})"), FormatError);
  EXPECT_THROW(parse(R"({"n_cols": 16, "k": 4, "operations": [{"gates": [], "isolate": [2]}]})"),
               FormatError);
  EXPECT_THROW(parse(R"({"n_cols": 12, "k": 4, "operations": []})"), Error);
}

TEST(HexStream, RoundTripAllModels) {
  std::mt19937_64 rng(6);
  const auto cfg = CrossbarConfig::make(1, 256, 16, false);
  for (Model m : {Model::Serial, Model::Unlimited, Model::Standard, Model::Minimal}) {
    Program p;
    for (int i = 0; i < 200; ++i) p.operations.push_back(testing::random_legal_operation(rng, m, cfg));
    std::stringstream ss;
    write_hex_stream(ss, p, m, cfg);
    std::string line;
    std::size_t lines = 0, tagged = 0;
    std::istringstream lines_in(ss.str());
    while (std::getline(lines_in, line)) {
      ++lines;
      tagged += line.find(" init") != std::string::npos;
      EXPECT_EQ(line.substr(0, line.find(' ')).size(), (message_len(m, cfg) + 3) / 4);
    }
    EXPECT_EQ(lines, p.size());
    EXPECT_GT(tagged, 0u);
    EXPECT_EQ(read_hex_stream(ss, m, cfg), p) << to_string(m);
  }
}

TEST(HexStream, Errors) {
  const auto cfg = CrossbarConfig::make(1, 1024, 32, false);
  std::istringstream wrong_len("abc\n");
  EXPECT_THROW(read_hex_stream(wrong_len, Model::Minimal, cfg), DecodeError);
  std::istringstream bad_tag("000000000 init2\n");
  EXPECT_THROW(read_hex_stream(bad_tag, Model::Minimal, cfg), FormatError);
  std::istringstream blank("\n\n");
  EXPECT_EQ(read_hex_stream(blank, Model::Minimal, cfg).size(), 0u);
}

TEST(Stats, Json) {
  ExecStats s;
  s.cycles = 3;
  s.gate_count = 7;
  s.touched_columns = {1, 2, 5};
  EXPECT_EQ(stats_to_json(s), json::parse(R"({"cycles": 3, "gates": 7, "footprint": 3})"));
}

}  // namespace
}  // namespace mempart
