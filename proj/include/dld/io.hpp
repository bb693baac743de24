#pragma once

// Field and transect serialization.
//
// dldgrid layout (all little-endian):
//   "DLD1"                     4 bytes
//   nx, ny                     u32, u32
//   xmin, xmax, ymin, ymax     f64 x 4
//   p                          f64
//   N                          u32
//   values                     nx*ny f64, row-major (y-major, x fastest)
//   escape flags               nx*ny bytes, 0 or 1

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dld/grid_engine.hpp"
#include "dld/singularity.hpp"

namespace dld::io {

void write_dldgrid(std::ostream& os, const FieldResult& field);
void write_dldgrid(const std::filesystem::path& path, const FieldResult& field);

// Restores grid, p, N, values and escape flags. Fields not stored in the
// format (n0, escape radius, kernel identity, timing) keep their defaults.
FieldResult read_dldgrid(std::istream& is);
FieldResult read_dldgrid(const std::filesystem::path& path);

// One line per grid row (j = 0 first), comma separated, preceded by
// '#'-prefixed comment lines.
void write_field_csv(std::ostream& os, const FieldResult& field,
                     const std::vector<std::string>& comments);
void write_field_csv(const std::filesystem::path& path, const FieldResult& field,
                     const std::vector<std::string>& comments);

// Binary 16-bit PGM (P5, maxval 65535, big-endian samples). Non-escaped
// values are min-max scaled to [0, 65535]; escaped nodes are written as
// 65535. The top image row is ymax.
void write_pgm(std::ostream& os, const FieldResult& field);
void write_pgm(const std::filesystem::path& path, const FieldResult& field);

struct PgmImage {
  int width = 0;
  int height = 0;
  int maxval = 0;
  std::vector<std::uint16_t> pixels;  // row-major, top row first
};

PgmImage read_pgm(std::istream& is);
PgmImage read_pgm(const std::filesystem::path& path);

// Columns: position, md, derivative. Crossings follow as comment lines.
void write_transect_csv(std::ostream& os, const TransectReport& report,
                        const std::vector<std::string>& comments);
void write_transect_csv(const std::filesystem::path& path, const TransectReport& report,
                        const std::vector<std::string>& comments);

}  // namespace dld::io
