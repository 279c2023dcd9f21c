#pragma once

#include "jqml/item.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace jqml::testing {

/// Uniform double in [lo, hi).
double uniform(std::mt19937_64& rng, double lo, double hi);
/// Uniform integer in [lo, hi].
std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi);

/// Random JSON-representable item (null, booleans, integers, decimals,
/// doubles, strings, nested arrays and objects).
Item random_item(std::mt19937_64& rng, int depth = 3);

/// Random rows `{"id": integer, "x": double, "name": string, "v": [double, double]}`.
std::vector<Item> random_rows(std::mt19937_64& rng, std::size_t n);

}  // namespace jqml::testing
