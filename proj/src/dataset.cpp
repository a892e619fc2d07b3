#include "evreg/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "evreg/errors.hpp"

namespace evreg {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::filesystem::path provenance_path(const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  p.replace_extension(".provenance.json");
  return p;
}

void write_dataset(const Dataset& data, const std::filesystem::path& csv_path) {
  std::ofstream out(csv_path);
  if (!out) throw Error("cannot open " + csv_path.string() + " for writing");
  out << 't';
  for (std::size_t i = 1; i <= data.n; ++i) out << ",y" << i;
  out << '\n';
  for (const Record& rec : data.records) {
    out << format_double(rec.t);
    for (double v : rec.y) out << ',' << format_double(v);
    out << '\n';
  }
  if (!out) throw Error("failed writing " + csv_path.string());

  nlohmann::json prov{{"format_version", kDatasetFormatVersion},
                      {"generator", data.provenance.generator},
                      {"params", data.provenance.params},
                      {"seed", data.provenance.seed},
                      {"n", data.n},
                      {"count", data.records.size()}};
  std::ofstream pout(provenance_path(csv_path));
  if (!pout) throw Error("cannot open provenance file for " + csv_path.string());
  pout << prov.dump(2) << '\n';
}

Dataset read_dataset(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw Error("cannot open " + csv_path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(csv_path.string() + ": empty file");

  Dataset data;
  {
    std::stringstream header(line);
    std::string col;
    std::size_t cols = 0;
    while (std::getline(header, col, ',')) ++cols;
    if (cols < 2 || line.rfind("t,", 0) != 0) throw Error(csv_path.string() + ": header must be t,y1,...,yn");
    data.n = cols - 1;
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(row, cell, ',')) {
      try {
        vals.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(csv_path.string() + ":" + std::to_string(line_no) + ": not a number: " + cell);
      }
    }
    if (vals.size() != data.n + 1) {
      throw Error(csv_path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(data.n + 1) +
                  " columns");
    }
    data.records.push_back(Record{vals[0], Vector(vals.begin() + 1, vals.end())});
  }

  const auto prov_file = provenance_path(csv_path);
  if (std::filesystem::exists(prov_file)) {
    std::ifstream pin(prov_file);
    const auto j = nlohmann::json::parse(pin);
    data.provenance.generator = j.value("generator", std::string{});
    data.provenance.params = j.value("params", std::map<std::string, double>{});
    data.provenance.seed = j.value("seed", std::uint64_t{0});
  }
  return data;
}

}  // namespace evreg
