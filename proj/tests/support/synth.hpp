#pragma once

// Synthetic sensor-style datasets with construction-controlled properties.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace synth {

// Rows joined with '\n', trailing newline included.
std::string to_text(const std::vector<std::string>& rows);

// Rows "t,v1,...,vk": t = 15*i keeps every row distinct; values are uniform
// 4-decimal readings.
std::vector<std::string> distinct_rows(std::size_t n, std::size_t value_cols, std::uint64_t seed);

// Row i (i >= 1) repeats row i-1 iff u_i < d, with u_i drawn from `seed` and
// independent of d, so raising d only adds duplicates.
std::vector<std::string> duplicated_rows(std::size_t n, double d, std::uint64_t seed);

// Columns: constant, timestamp with deltas {15,16}, label in {0,1,2} held for
// 50-200 rows, then `iid_cols` i.i.d. 6-decimal readings.
std::vector<std::string> sensor_rows(std::size_t n, std::size_t iid_cols, std::uint64_t seed);

std::string random_string(std::mt19937_64& rng, std::string_view alphabet, std::size_t max_len);

}  // namespace synth
