#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "reiflab/grid_function.hpp"

namespace reiflab {

/// Binary raster of a GridDomain (little-endian):
///   uint32 N, uint32 version, float64 h          -- 16-byte header
///   N x (int64 lo, int64 count)                  -- node ranges per axis
///   ceil(nodes / 8) bytes of mask bits, row-major, least significant first
/// plus `<path>.json` with label, generator parameters and the same extents.
void write_domain(const GridDomain& dom, const std::filesystem::path& path);
DomainPtr read_domain(const std::filesystem::path& path);

/// Domain raster followed by one float64 per node in row-major order.
void write_grid_function(const LatticeField& u, const std::filesystem::path& path);
LatticeField read_grid_function(const std::filesystem::path& path);

/// %.17g; round-trips every double.
std::string format_double(double v);

/// Comma-separated table with a fixed header. Cells are written as given;
/// doubles go through format_double.
class CsvWriter {
 public:
  using Cell = std::variant<double, long long, std::string>;
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header, bool append = false);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<Cell>& cells);

 private:
  std::FILE* file_ = nullptr;
  std::size_t columns_;
};

}  // namespace reiflab
