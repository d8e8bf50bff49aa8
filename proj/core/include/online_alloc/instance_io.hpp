#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "online_alloc/model.hpp"

namespace online_alloc {

// Instance files are JSON:
//   {"n":…, "m":…, "k":…, "b":[…],
//    "items":[{"utility":{"kind":"linear_simplex","c":[…]}, "A":[[…],…]}, …]}
// Utility kinds: linear_simplex (c), linear_simplex_eq (c), concave_power
// (a, p), concave_log (a, s). "A" is a list of m rows of k entries.
// Custom scalar utilities cannot be serialized.

std::string instance_to_json(const Instance& instance, int indent = -1);
Instance instance_from_json(const std::string& text);

void write_instance(const std::filesystem::path& path, const Instance& instance);
/// Throws std::runtime_error when the file cannot be read or parsed.
Instance read_instance(const std::filesystem::path& path);

}  // namespace online_alloc
