#include "io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "cmak/error.hpp"

namespace cmak::io {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_number(const std::string& text, double& value) {
  if (text.empty()) return false;
  char* end = nullptr;
  value = std::strtod(text.c_str(), &end);
  return end == text.c_str() + text.size();
}

std::uint64_t byteswap64(std::uint64_t v) {
  std::uint64_t out = 0;
  for (int i = 0; i < 8; ++i) out |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::optional<std::size_t> CsvTable::find(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

std::string csv_string(const std::vector<std::string>& header, const std::vector<Eigen::VectorXd>& columns) {
  require(header.size() == columns.size(), ErrorCode::InvalidArgument, "header and column counts differ");
  Eigen::Index rows = 0;
  for (const auto& c : columns) rows = std::max(rows, c.size());
  std::string text;
  for (std::size_t i = 0; i < header.size(); ++i) text += (i ? "," : "") + header[i];
  text += '\n';
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) text += ',';
      if (r < columns[c].size()) text += format_double(columns[c](r));
    }
    text += '\n';
  }
  return text;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<Eigen::VectorXd>& columns) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot open " + path + " for writing");
  out << csv_string(header, columns);
  if (!out) fail(ErrorCode::IoError, "write to " + path + " failed");
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    const auto cells = split_csv_line(line);
    std::vector<double> values(cells.size());
    bool numeric = true;
    for (std::size_t i = 0; i < cells.size(); ++i) numeric = numeric && parse_number(cells[i], values[i]);
    if (!numeric) {
      if (table.header.empty() && table.columns.empty()) {
        table.header = cells;
        continue;
      }
      fail(ErrorCode::IoError, path + ":" + std::to_string(line_no) + ": non-numeric row");
    }
    if (table.columns.empty()) table.columns.resize(cells.size());
    if (cells.size() != table.columns.size()) {
      fail(ErrorCode::IoError, path + ":" + std::to_string(line_no) + ": inconsistent column count");
    }
    for (std::size_t i = 0; i < cells.size(); ++i) table.columns[i].push_back(values[i]);
  }
  if (table.header.empty()) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) table.header.push_back("c" + std::to_string(i));
  }
  if (table.columns.empty()) table.columns.resize(table.header.size());
  return table;
}

void write_json(const std::string& path, const nlohmann::json& value) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot open " + path + " for writing");
  out << value.dump(2) << '\n';
  if (!out) fail(ErrorCode::IoError, "write to " + path + " failed");
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::IoError, path + ": " + e.what());
  }
}

std::string sidecar_path(const std::string& path) { return path + ".json"; }

void write_series(const std::string& path, const SampledSeries& series, const nlohmann::json& metadata) {
  nlohmann::json meta = metadata;
  meta["delta"] = series.delta;
  meta["n"] = series.n();
  if (ends_with(path, ".bin")) {
    meta["format"] = "float64-le";
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot open " + path + " for writing");
    for (Eigen::Index i = 0; i < series.n(); ++i) {
      std::uint64_t bits = std::bit_cast<std::uint64_t>(series.values(i));
      if constexpr (std::endian::native == std::endian::big) bits = byteswap64(bits);
      out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
    if (!out) fail(ErrorCode::IoError, "write to " + path + " failed");
  } else {
    meta["format"] = "csv";
    Eigen::VectorXd t(series.n());
    for (Eigen::Index i = 0; i < series.n(); ++i) t(i) = double(i + 1) * series.delta;
    write_csv(path, {"t", "y"}, {t, series.values});
  }
  write_json(sidecar_path(path), meta);
}

SampledSeries read_series(const std::string& path, std::optional<double> delta_override) {
  std::optional<double> delta = delta_override;
  nlohmann::json meta = nlohmann::json::object();
  {
    std::ifstream probe(sidecar_path(path));
    if (probe) meta = read_json(sidecar_path(path));
  }
  if (!delta && meta.contains("delta")) delta = meta["delta"].get<double>();

  Eigen::VectorXd values;
  const bool binary = ends_with(path, ".bin") || meta.value("format", "") == "float64-le";
  if (binary) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) fail(ErrorCode::IoError, "cannot open " + path);
    const auto bytes = static_cast<std::size_t>(in.tellg());
    if (bytes % 8 != 0) fail(ErrorCode::IoError, path + ": size is not a multiple of 8 bytes");
    in.seekg(0);
    values.resize(Eigen::Index(bytes / 8));
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      std::uint64_t bits = 0;
      in.read(reinterpret_cast<char*>(&bits), sizeof bits);
      if constexpr (std::endian::native == std::endian::big) bits = byteswap64(bits);
      values(i) = std::bit_cast<double>(bits);
    }
    if (!in) fail(ErrorCode::IoError, "read from " + path + " failed");
  } else {
    const CsvTable table = read_csv(path);
    if (table.columns.empty()) fail(ErrorCode::IoError, path + ": no columns");
    std::size_t column = table.columns.size() - 1;
    for (const char* name : {"y", "value", "values"}) {
      if (auto idx = table.find(name)) {
        column = *idx;
        break;
      }
    }
    const auto& col = table.columns[column];
    values = Eigen::Map<const Eigen::VectorXd>(col.data(), Eigen::Index(col.size()));
    if (!delta) {
      if (auto t = table.find("t"); t && table.columns[*t].size() >= 2) {
        delta = table.columns[*t][1] - table.columns[*t][0];
      }
    }
  }
  if (!delta) fail(ErrorCode::ConfigError, "sampling interval unknown for " + path + "; pass --delta");
  return SampledSeries::create(*delta, std::move(values));
}

}  // namespace cmak::io
