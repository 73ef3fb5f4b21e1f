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

// Exact counts of expressible operations per model and the information
// lower bound they put on the control message length.

#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <string>
#include <unordered_set>

#include "mempart/codec.hpp"
#include "mempart/crossbar.hpp"
#include "mempart/validators.hpp"

namespace mempart {

using BigInt = boost::multiprecision::cpp_int;

inline BigInt binomial(std::size_t n, std::size_t r) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  BigInt acc = 1;
  for (std::size_t i = 1; i <= r; ++i) acc = acc * (n - r + i) / i;
  return acc;
}

/// ceil(log2(count)) by integer bit length; 0 for count == 1.
inline std::size_t ceil_log2(const BigInt& count) {
  if (count < 1) throw Error("ceil_log2: count must be positive");
  if (count == 1) return 0;
  return static_cast<std::size_t>(boost::multiprecision::msb(BigInt(count - 1))) + 1;
}

/// Two-input gates on n columns with unordered inputs.
inline BigInt count_serial(std::size_t n) {
  if (n < 3) throw Error("count_serial: need at least 3 columns");
  return binomial(n, 2) * (n - 2);
}

inline BigInt count_parallel(std::size_t n, std::size_t k) {
  if (k == 0 || n % k != 0 || n / k < 3) throw Error("count_parallel: need n/k >= 3");
  return boost::multiprecision::pow(count_serial(n / k), static_cast<unsigned>(k));
}

inline BigInt count_standard(std::size_t n, std::size_t k) {
  if (k == 0 || n % k != 0 || n / k < 3) throw Error("count_standard: need n/k >= 3");
  BigInt sum = 0;
  for (std::size_t m = 1; m <= k; ++m) sum += binomial(k - 1, m - 1) * count_serial(n / k);
  return 2 * sum;
}

/// Placements of an arithmetic progression inside [0, span): singletons
/// plus every progression of two or more terms with step >= min_step.
inline BigInt count_progressions(std::size_t span, std::size_t min_step) {
  BigInt total = span;
  for (std::size_t step = std::max<std::size_t>(min_step, 1); step < span; ++step)
    for (std::size_t s = 0; s < span; ++s) total += (span - 1 - s) / step;
  return total;
}

/// Distinct logic operations in the image of the minimal decoder, by
/// closed form: for each partition distance, shared index triples times
/// periodic placements times directions.
inline BigInt count_minimal(std::size_t n, std::size_t k) {
  if (k == 0 || n % k != 0 || n / k < 3) throw Error("count_minimal: need n/k >= 3");
  const std::size_t w = n / k;
  BigInt total = 0;
  for (std::size_t d = 0; d < k; ++d) {
    const BigInt pairs = binomial(w, 2);
    const BigInt tuples = d == 0 ? pairs * (w - 2) + BigInt(w) * (w - 1) : pairs * w + BigInt(w) * w;
    const std::size_t dirs = d == 0 ? 1 : 2;
    total += tuples * dirs * count_progressions(k - d, d + 1);
  }
  return total;
}

/// Same quantity by decoding every message of the minimal format and
/// collecting distinct operations. Exponential in message length.
inline BigInt count_minimal_enumerated(std::size_t n, std::size_t k) {
  const auto cfg = CrossbarConfig::make(1, n, k, false);
  const std::size_t len = message_len(Model::Minimal, n, k);
  if (len > 26) throw Error("count_minimal_enumerated: message space too large");
  std::unordered_set<std::string> seen;
  Bits bits(len);
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << len); ++v) {
    for (std::size_t i = 0; i < len; ++i) bits[i] = (v >> (len - 1 - i)) & 1U;
    try {
      seen.insert(key(decode(bits, Model::Minimal, cfg)));
    } catch (const DecodeError&) {
    }
  }
  return seen.size();
}

inline BigInt operation_count(Model model, std::size_t n, std::size_t k) {
  switch (model) {
    case Model::Serial: return count_serial(n);
    case Model::Unlimited: return count_serial(n) + count_parallel(n, k);
    case Model::Standard: return count_standard(n, k);
    case Model::Minimal: return count_minimal(n, k);
  }
  return 0;
}

inline std::size_t lower_bound_bits(Model model, std::size_t n, std::size_t k) {
  return ceil_log2(operation_count(model, n, k));
}

struct OpCount {
  Model model = Model::Unlimited;
  BigInt count;
  std::size_t bound_bits = 0;
  std::size_t message_bits = 0;

  std::ptrdiff_t slack() const {
    return static_cast<std::ptrdiff_t>(message_bits) - static_cast<std::ptrdiff_t>(bound_bits);
  }
};

inline OpCount count_operations(Model model, std::size_t n, std::size_t k) {
  OpCount c;
  c.model = model;
  c.count = operation_count(model, n, k);
  c.bound_bits = ceil_log2(c.count);
  c.message_bits = message_len(model, n, k);
  return c;
}

inline std::string to_decimal(const BigInt& v) { return v.str(); }

}  // namespace mempart
