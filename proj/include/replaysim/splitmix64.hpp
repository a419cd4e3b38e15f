// Copyright (c) the replay-sim authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace replaysim {

// SplitMix64 (Vigna's fixed-increment variant of Java's SplittableRandom).
// Two constants fully specify the stream, so any implementation seeded the
// same way reproduces suites bit for bit.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t operator()() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform pick from [0, n). n must be positive. Plain modulo: the bias
    // is irrelevant here and the mapping stays trivially portable.
    std::size_t pick(std::size_t n) {
        return static_cast<std::size_t>((*this)() % static_cast<std::uint64_t>(n));
    }

  private:
    std::uint64_t state_;
};

}  // namespace replaysim
