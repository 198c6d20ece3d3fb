#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fda/types.hpp"

namespace fda {

/// Doubles rendered with max_digits10 so rereads are exact and reruns
/// byte-identical.
std::string format_double(double v);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

/// Complex matrix as CSV, one row per matrix row, samples as re,im pairs.
void write_complex_csv(const std::filesystem::path& path, const CMat& m);
CMat read_complex_csv(const std::filesystem::path& path);

/// FNV-1a 64-bit content hash, reported as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);
std::string hash_file(const std::filesystem::path& path);

}  // namespace fda
