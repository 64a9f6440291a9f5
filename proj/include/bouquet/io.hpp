#pragma once

// Output files for the CLI: deterministic number formatting, CSV tables and
// JSON documents written atomically (temporary file + rename).

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace bouquet {

/// Marker line closing a CSV that was cut short by a failure.
inline constexpr const char* kAbortedMarker = "#ABORTED";

/// Shortest round-trip decimal form ("nan", "inf", "-inf" for non-finite).
std::string format_number(double x);

/// Writes `contents` to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

/// Buffers a CSV table and publishes it in one rename. A table that is
/// aborted, or destroyed before finish(), is still published with its rows so
/// far and a trailing "#ABORTED: reason" line.
class CsvTable {
 public:
  using Cell = std::variant<std::string, double, long long>;

  CsvTable(std::filesystem::path path, std::vector<std::string> header);
  CsvTable(const CsvTable&) = delete;
  CsvTable& operator=(const CsvTable&) = delete;
  ~CsvTable();

  void row(const std::vector<Cell>& cells);
  void finish();
  void abort(const std::string& reason);

  std::size_t rows() const { return rows_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::size_t columns_;
  std::size_t rows_ = 0;
  std::string buffer_;
  bool published_ = false;
};

/// True when the file's last line is an #ABORTED marker.
bool is_aborted(const std::filesystem::path& path);

}  // namespace bouquet
