#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace declab {

/// Shortest round-trip decimal form; used for all CSV output so that repeated
/// runs are byte-identical.
std::string format_double(double v);

/// Write via a temporary file in the same directory, then rename.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::uint64_t fnv1a_hash(const std::string& s);

inline constexpr const char* kVersion = "0.1.0";

} // namespace declab
