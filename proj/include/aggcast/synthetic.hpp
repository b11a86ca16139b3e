#pragma once

#include <cstdint>
#include <string>

#include "aggcast/core.hpp"

namespace aggcast {

enum class SyntheticKind {
  iid_dominant,             // expert 1 unbiased, the rest share a fixed bias
  adversarial_alternating,  // the good expert rotates in blocks
  seasonal_flip,            // expert quality flips with period 365
  biased_quantile_pair      // cold/warm biased pair plus unbiased experts,
                            // with rare cold regimes only the cold expert gets
};

std::string to_string(SyntheticKind kind);
SyntheticKind synthetic_kind_from_string(const std::string& s);

struct SyntheticStreamSpec {
  SyntheticKind kind = SyntheticKind::iid_dominant;
  std::size_t T = 1253;
  std::size_t N = 8;
  double noise = 1.0;
  std::uint64_t seed = 0;
};

// Deterministic given the spec (seed included). Dates run daily from
// 2020-03-30.
ForecastPanel generate_synthetic(const SyntheticStreamSpec& spec);

}  // namespace aggcast
