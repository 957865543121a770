#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "planlearn/text.hpp"

namespace planlearn {

// Every random choice in the pipeline draws from an mt19937_64 stream derived
// from (seed, tag). Tagged derivation keeps per-attribute and per-fold work
// order-independent: processing attributes in any order, or in parallel,
// yields identical results.
inline std::mt19937_64 rng_for(std::uint64_t seed, std::string_view tag) {
  std::uint64_t h = fnv1a(tag);
  return std::mt19937_64(seed ^ (h + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2)));
}

}  // namespace planlearn
