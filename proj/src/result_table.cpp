#include "soprc/result_table.hpp"

#include "soprc/core.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

namespace soprc {

std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, ec == std::errc() ? end : buf);
}

void ResultTable::add(double x, const std::string& series, double mean, double std) {
  if (!(std >= 0.0)) throw SpecError("result std must be non-negative");
  if (!rows_.empty() && rows_.back().series != series) {
    for (const auto& r : rows_)
      if (r.series == series) throw SpecError("rows of series '" + series + "' must be contiguous");
  }
  rows_.push_back({x, series, mean, std});
}

std::vector<ResultRow> ResultTable::series(const std::string& name) const {
  std::vector<ResultRow> out;
  for (const auto& r : rows_)
    if (r.series == name) out.push_back(r);
  return out;
}

void ResultTable::write_csv(std::ostream& out) const {
  out << "x,series,mean,std\n";
  for (const auto& r : rows_)
    out << format_double(r.x) << ',' << r.series << ',' << format_double(r.mean) << ','
        << format_double(r.std) << '\n';
}

nlohmann::json ResultTable::to_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& r : rows_)
    arr.push_back({{"x", r.x}, {"series", r.series}, {"mean", r.mean}, {"std", r.std}});
  return arr;
}

nlohmann::json RunManifest::to_json() const {
  return {{"command", command},
          {"config", config},
          {"master_seed", master_seed},
          {"version", version},
          {"outputs", outputs}};
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.config = j.at("config");
  m.master_seed = j.at("master_seed").get<std::uint64_t>();
  m.version = j.at("version").get<std::string>();
  m.outputs = j.at("outputs").get<std::vector<std::string>>();
  return m;
}

void RunManifest::write(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write manifest: " + path.string());
  out << to_json().dump(2) << '\n';
}

}  // namespace soprc
