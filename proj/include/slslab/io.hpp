#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace slslab::io {

/// 17 significant digits, enough to round-trip any double. Non-finite
/// values print as nan, inf, -inf.
std::string format_number(double v);

/// Record of one CLI invocation. `config` holds every resolved flag as the
/// string that reproduces it.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::uint64_t seed = 0;
  std::string tool_version;
  std::vector<std::string> outputs;
  double wall_time = 0.0;
};

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

void write_manifest(const std::filesystem::path& path, const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& path);

/// Writes `j` pretty-printed with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Parses plain `key = value` lines; blank lines and `#` comments are skipped.
/// Throws std::runtime_error on unreadable files or malformed lines.
std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path);

/// Minimal CSV writer: comma-separated, header row, LF endings.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<std::string>& cells);
  void close();

 private:
  std::FILE* file_ = nullptr;
  std::filesystem::path path_;
  std::size_t columns_ = 0;
};

/// Splits a CSV file into rows of cells (no quoting support needed here).
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

}  // namespace slslab::io
