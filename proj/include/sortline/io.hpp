#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>

namespace sortline {

/// Writes via a sibling temporary and a rename, so readers never see a
/// half-written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Throws std::runtime_error naming the file on I/O or parse failure.
nlohmann::json read_json_file(const std::filesystem::path& path);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace sortline
