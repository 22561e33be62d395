#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace soprc {

struct ResultRow {
  double x;
  std::string series;
  double mean;
  double std;
};

/// Tabular experiment output, rows grouped by series.
class ResultTable {
 public:
  /// Throws SpecError on a negative std or a series that would be split.
  void add(double x, const std::string& series, double mean, double std);

  const std::vector<ResultRow>& rows() const noexcept { return rows_; }
  std::vector<ResultRow> series(const std::string& name) const;

  /// Header x,series,mean,std.
  void write_csv(std::ostream& out) const;
  nlohmann::json to_json() const;

 private:
  std::vector<ResultRow> rows_;
};

/// Everything needed to reproduce an output file.
struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::uint64_t master_seed = 0;
  std::string version;
  std::vector<std::string> outputs;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
  void write(const std::filesystem::path& path) const;
};

/// Fixed, locale-independent formatting for CSV cells.
std::string format_double(double x);

}  // namespace soprc
