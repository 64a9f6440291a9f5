#include "bouquet/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace bouquet {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, end);
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) { write_atomic(path, doc.dump(2) + "\n"); }

namespace {

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

CsvTable::CsvTable(std::filesystem::path path, std::vector<std::string> header)
    : path_(std::move(path)), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) buffer_ += (i ? "," : "") + quote(header[i]);
  buffer_ += '\n';
}

CsvTable::~CsvTable() {
  if (published_) return;
  try {
    abort("output not completed");
  } catch (...) {
  }
}

void CsvTable::row(const std::vector<Cell>& cells) {
  if (published_) throw std::logic_error("row added to a published CSV");
  if (cells.size() != columns_) throw std::logic_error("CSV row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) buffer_ += ',';
    const auto& c = cells[i];
    if (const auto* s = std::get_if<std::string>(&c))
      buffer_ += quote(*s);
    else if (const auto* d = std::get_if<double>(&c))
      buffer_ += format_number(*d);
    else
      buffer_ += std::to_string(std::get<long long>(c));
  }
  buffer_ += '\n';
  ++rows_;
}

void CsvTable::finish() {
  if (published_) return;
  published_ = true;
  write_atomic(path_, buffer_);
}

void CsvTable::abort(const std::string& reason) {
  if (published_) return;
  published_ = true;
  write_atomic(path_, buffer_ + kAbortedMarker + ": " + reason + "\n");
}

bool is_aborted(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line, last;
  while (std::getline(in, line))
    if (!line.empty()) last = line;
  return last.rfind(kAbortedMarker, 0) == 0;
}

}  // namespace bouquet
