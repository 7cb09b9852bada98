#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "cmak/estimation.hpp"

namespace cmak::io {

/// %.17g.
std::string format_double(double value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  /// Index of the named column, or nullopt.
  std::optional<std::size_t> find(const std::string& name) const;
};

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<Eigen::VectorXd>& columns);
std::string csv_string(const std::vector<std::string>& header, const std::vector<Eigen::VectorXd>& columns);
CsvTable read_csv(const std::string& path);

void write_json(const std::string& path, const nlohmann::json& value);
nlohmann::json read_json(const std::string& path);

/// Sidecar metadata path for a data file.
std::string sidecar_path(const std::string& path);

/// ".bin" paths get raw little-endian float64; anything else gets CSV columns t, y. Both get a JSON
/// sidecar carrying delta, n, format and the supplied metadata.
void write_series(const std::string& path, const SampledSeries& series, const nlohmann::json& metadata);

/// Reads a series written by write_series or a plain CSV. delta comes from the override, the sidecar,
/// or the spacing of a `t` column, in that order.
SampledSeries read_series(const std::string& path, std::optional<double> delta_override = std::nullopt);

}  // namespace cmak::io
