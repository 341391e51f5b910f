#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace susyqm {

// One CSV column: header text (name plus a unit in parentheses) and values.
struct CsvColumn {
  std::string header;
  std::vector<double> values;
};

// Writes columns as CSV: one header row, '.' decimal separator, LF line
// endings, values formatted %.12e. All columns must have equal length.
void write_csv(const std::filesystem::path& path,
               const std::vector<CsvColumn>& columns);

// Serializes with 2-space indentation, LF endings and a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

// Whole file as raw bytes.
std::string read_file_bytes(const std::filesystem::path& path);

// Lower-case hex SHA-256 digest of the byte string.
std::string sha256_hex(const std::string& bytes);

}  // namespace susyqm
