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

// mempart: command-line front end for the partitioned crossbar toolkit.

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mempart/algokit.hpp"
#include "mempart/bench.hpp"
#include "mempart/codec.hpp"
#include "mempart/exec.hpp"
#include "mempart/opcount.hpp"
#include "mempart/program_io.hpp"
#include "mempart/validators.hpp"

namespace {

using namespace mempart;

struct Options {
  std::size_t n = 1024;
  std::size_t k = 32;
  std::size_t bits = 32;
  std::string model = "all";
  std::size_t rows = 1024;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "text";
  std::string input;
  std::string state_in;
  std::string stats;
};

// Writes to --out when given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw Error("cannot open " + path + " for writing");
    }
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::unique_ptr<std::istream> open_input(const std::string& path) {
  if (path.empty() || path == "-") return nullptr;
  auto f = std::make_unique<std::ifstream>(path);
  if (!*f) throw Error("cannot open " + path);
  return f;
}

ProgramFile load_program(const std::string& path) {
  auto f = open_input(path);
  return read_program(f ? *f : std::cin);
}

Model single_model(const std::string& name) {
  const auto m = model_from_string(name);
  if (!m) throw Error("expected a single model, got \"" + name + "\"");
  return *m;
}

int cmd_simulate(const Options& o) {
  auto pf = load_program(o.input);
  pf.cfg.n_rows = o.rows;
  CrossbarState state(o.rows, pf.cfg.n_cols, false);
  if (!o.state_in.empty()) {
    auto f = open_input(o.state_in);
    state = read_snapshot(*f);
    if (state.cols() != pf.cfg.n_cols) throw Error("snapshot width does not match the program");
    pf.cfg.n_rows = state.rows();
  } else {
    std::mt19937_64 rng(o.seed);
    for (std::size_t r = 0; r < state.rows(); ++r)
      for (std::size_t c = 0; c < state.cols(); ++c) state.set(r, c, rng() & 1U);
  }
  std::vector<std::uint64_t> expect;
  if (pf.layout)
    for (std::size_t r = 0; r < state.rows(); ++r)
      expect.push_back(read_value(state, r, pf.layout->a) * read_value(state, r, pf.layout->b));

  const auto stats = run_program(state, pf.program, pf.cfg);
  std::size_t wrong = 0;
  for (std::size_t r = 0; r < expect.size(); ++r)
    if (read_value(state, r, pf.layout->product) != expect[r]) {
      if (wrong++ == 0) std::cerr << "mismatch in row " << r << '\n';
    }

  auto j = stats_to_json(stats);
  if (pf.layout) j["correct"] = wrong == 0;
  if (!o.stats.empty()) {
    Sink s(o.stats);
    s.os() << j.dump() << '\n';
  } else {
    std::cout << j.dump() << '\n';
  }
  if (!o.out.empty()) {
    Sink s(o.out);
    write_snapshot(s.os(), state);
  }
  return wrong == 0 ? 0 : 1;
}

int cmd_validate(const Options& o) {
  const auto pf = load_program(o.input);
  const auto models = parse_models(o.model);
  Sink sink(o.out);
  auto& os = sink.os();
  const bool csv = o.format == "csv";
  if (csv) os << "op,model,legal,reason\n";
  std::size_t illegal = 0;
  for (std::size_t i = 0; i < pf.program.size(); ++i) {
    const auto& op = pf.program.operations[i];
    if (!csv) os << "op " << i;
    for (auto m : models) {
      const auto v = is_legal(m, op, pf.cfg);
      if (!v) ++illegal;
      if (csv)
        os << i << ',' << to_string(m) << ',' << (v ? "true" : "false") << ','
           << (v ? "" : to_string(v.reason)) << '\n';
      else
        os << ' ' << to_string(m) << '=' << (v ? "ok" : std::string("fail:") + to_string(v.reason));
    }
    if (!csv) os << '\n';
  }
  if (!csv)
    os << pf.program.size() << " operations, " << illegal << " illegal verdicts\n";
  return illegal == 0 ? 0 : 1;
}

int cmd_encode(const Options& o) {
  const auto pf = load_program(o.input);
  const Model m = single_model(o.model);
  Sink sink(o.out);
  write_hex_stream(sink.os(), pf.program, m, pf.cfg);
  return 0;
}

int cmd_decode(const Options& o) {
  const Model m = single_model(o.model);
  ProgramFile pf;
  pf.cfg = CrossbarConfig::make(o.rows, o.n, o.k, false);
  auto f = open_input(o.input);
  pf.program = read_hex_stream(f ? *f : std::cin, m, pf.cfg);
  Sink sink(o.out);
  write_program(sink.os(), pf);
  return 0;
}

int cmd_count(const Options& o) {
  Sink sink(o.out);
  auto& os = sink.os();
  std::vector<OpCount> rows;
  for (auto m : parse_models(o.model)) rows.push_back(count_operations(m, o.n, o.k));
  if (o.format == "csv") {
    os << "model,count,bound_bits,message_len,slack\n";
    for (const auto& r : rows)
      os << to_string(r.model) << ',' << to_decimal(r.count) << ',' << r.bound_bits << ','
         << r.message_bits << ',' << r.slack() << '\n';
  } else {
    for (const auto& r : rows)
      os << to_string(r.model) << "\n  count       " << to_decimal(r.count) << "\n  bound_bits  "
         << r.bound_bits << "\n  message_len " << r.message_bits << "\n  slack       "
         << r.slack() << '\n';
  }
  return 0;
}

int cmd_gen(const Options& o) {
  ProgramFile pf;
  pf.cfg = CrossbarConfig::make(o.rows, o.n, o.k, false);
  const auto mp = build_multiplier(o.bits, pf.cfg, single_model(o.model));
  pf.program = mp.program;
  pf.layout = mp.layout;
  Sink sink(o.out);
  write_program(sink.os(), pf);
  return 0;
}

int cmd_bench(const Options& o) {
  ExperimentConfig ex;
  ex.n_cols = o.n;
  ex.k = o.k;
  ex.bits = o.bits;
  ex.models = parse_models(o.model);
  ex.rows = o.rows;
  ex.seed = o.seed;
  const auto rows = bench_mult(ex);
  Sink sink(o.out);
  emit_report(sink.os(), rows, o.format == "csv" ? ReportFormat::Csv : ReportFormat::Text);
  for (const auto& r : rows)
    if (!r.correct) return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partitioned memristive crossbar toolkit"};
  app.require_subcommand(1);
  Options o;
  const std::vector<std::string> model_names{"serial", "baseline", "unlimited", "standard",
                                             "minimal", "all"};

  auto geometry = [&](CLI::App* sub) {
    sub->add_option("--n", o.n, "Columns in the crossbar")->capture_default_str();
    sub->add_option("--k", o.k, "Number of partitions")->capture_default_str();
  };
  std::map<CLI::App*, std::string> models;
  auto model = [&](CLI::App* sub, const std::string& def) {
    auto& slot = models[sub] = def;
    sub->add_option("--model", slot, "serial|unlimited|standard|minimal|all")
        ->check(CLI::IsMember(model_names))
        ->capture_default_str();
  };
  auto format = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "csv|text")
        ->check(CLI::IsMember({"csv", "text"}))
        ->capture_default_str();
  };
  auto out = [&](CLI::App* sub) { sub->add_option("--out", o.out, "Output file (default stdout)"); };

  auto* simulate = app.add_subcommand("simulate", "Run a program file over a crossbar state");
  simulate->add_option("program", o.input, "Program file")->required();
  simulate->add_option("--rows", o.rows, "Rows when no snapshot is given")->capture_default_str();
  simulate->add_option("--seed", o.seed, "Seed for the random initial state")->capture_default_str();
  simulate->add_option("--state", o.state_in, "Initial state snapshot");
  simulate->add_option("--stats", o.stats, "Write stats JSON here instead of stdout");
  simulate->add_option("--out", o.out, "Write the final state snapshot");

  auto* validate = app.add_subcommand("validate", "Check each operation against the models");
  validate->add_option("program", o.input, "Program file")->required();
  out(validate);
  format(validate);

  auto* encode = app.add_subcommand("encode", "Program file to per-cycle hex messages");
  encode->add_option("program", o.input, "Program file")->required();
  out(encode);

  auto* decode = app.add_subcommand("decode", "Hex messages to a program file");
  decode->add_option("messages", o.input, "Hex stream (default stdin)");
  geometry(decode);
  out(decode);

  auto* count = app.add_subcommand("count", "Operation counts and control lower bounds");
  geometry(count);
  out(count);
  format(count);

  auto* gen = app.add_subcommand("gen", "Generate a multiplier program");
  geometry(gen);
  gen->add_option("--bits", o.bits, "Operand width")->capture_default_str();
  gen->add_option("--rows", o.rows, "Rows recorded in the program file")->capture_default_str();
  out(gen);

  auto* bench = app.add_subcommand("bench", "Multiplier latency/area/energy report");
  geometry(bench);
  bench->add_option("--bits", o.bits, "Operand width")->capture_default_str();
  bench->add_option("--rows", o.rows, "Rows to simulate")->capture_default_str();
  bench->add_option("--seed", o.seed, "Operand seed")->capture_default_str();
  out(bench);
  format(bench);

  // Per-subcommand model defaults.
  model(validate, "all");
  model(count, "all");
  model(bench, "all");
  model(encode, "minimal");
  model(decode, "minimal");
  model(gen, "minimal");

  CLI11_PARSE(app, argc, argv);

  for (auto& [sub, name] : models)
    if (*sub) o.model = name;
  try {
    if (*simulate) return cmd_simulate(o);
    if (*validate) return cmd_validate(o);
    if (*encode) return cmd_encode(o);
    if (*decode) return cmd_decode(o);
    if (*count) return cmd_count(o);
    if (*gen) return cmd_gen(o);
    if (*bench) return cmd_bench(o);
  } catch (const BenchFailure& e) {
    std::cerr << "incorrect product: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
