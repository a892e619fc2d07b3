#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "evreg/linalg.hpp"

namespace evreg {

struct Record {
  double t = 0.0;
  Vector y;
};

/// Enough to regenerate a dataset bit-exactly.
struct Provenance {
  std::string generator;
  std::map<std::string, double> params;
  std::uint64_t seed = 0;
};

struct Dataset {
  std::vector<Record> records;
  std::size_t n = 0;
  Provenance provenance;

  std::size_t size() const { return records.size(); }
};

inline constexpr int kDatasetFormatVersion = 1;

/// CSV `t,y1,...,yn` (17 significant digits) plus `<stem>.provenance.json`.
void write_dataset(const Dataset& data, const std::filesystem::path& csv_path);
/// Reads the CSV; provenance is loaded when the sidecar exists.
Dataset read_dataset(const std::filesystem::path& csv_path);
std::filesystem::path provenance_path(const std::filesystem::path& csv_path);

}  // namespace evreg
