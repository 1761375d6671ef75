#pragma once

#include <cstdint>
#include <cstdio>
#include <random>

#include "kitaoka/qfield.hpp"

namespace testsupport {

inline std::mt19937_64 seeded(const char* what, std::uint64_t seed) {
  std::printf("[seed] %s = %llu\n", what, static_cast<unsigned long long>(seed));
  return std::mt19937_64(seed);
}

inline std::int64_t uniform(std::mt19937_64& g, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(g);
}

inline kitaoka::QuadRat random_quad(std::mt19937_64& g, const kitaoka::FieldCtx& ctx,
                                    std::int64_t range, std::int64_t qmax = 1) {
  return kitaoka::QuadRat(ctx, uniform(g, -range, range), uniform(g, -range, range),
                          uniform(g, 1, qmax));
}

}  // namespace testsupport
