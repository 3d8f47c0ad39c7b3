// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace evoheur {

// Seeded generator with platform-independent draws. std::mt19937_64 output
// is fixed by the standard; the std distributions are not, so the draws
// below are derived from raw engine output directly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [lo, hi], unbiased by rejection.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(engine_());
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % span);
  }

  std::string state() const {
    std::ostringstream os;
    os << engine_;
    return os.str();
  }

  // Returns false when `s` is not a serialized engine state.
  bool set_state(const std::string& s) {
    std::istringstream is(s);
    std::mt19937_64 parsed;
    if (!(is >> parsed)) return false;
    engine_ = parsed;
    return true;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace evoheur
