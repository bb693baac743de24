#include "dld/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cctype>
#include <cstring>
#include <stdexcept>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "dld/errors.hpp"

namespace dld::io {

namespace {

constexpr std::array<char, 4> kMagic = {'D', 'L', 'D', '1'};

void put_u32(std::ostream& os, std::uint32_t v) {
  std::array<char, 4> b;
  for (int k = 0; k < 4; ++k) b[static_cast<std::size_t>(k)] = static_cast<char>((v >> (8 * k)) & 0xFFu);
  os.write(b.data(), 4);
}

void put_f64(std::ostream& os, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  std::array<char, 8> b;
  for (int k = 0; k < 8; ++k) b[static_cast<std::size_t>(k)] = static_cast<char>((bits >> (8 * k)) & 0xFFu);
  os.write(b.data(), 8);
}

void read_exact(std::istream& is, char* dst, std::size_t n, const char* what) {
  is.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n) {
    throw Error(ErrorCode::Format, std::string("truncated dldgrid while reading ") + what);
  }
}

std::uint32_t get_u32(std::istream& is, const char* what) {
  std::array<unsigned char, 4> b;
  read_exact(is, reinterpret_cast<char*>(b.data()), 4, what);
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(b[static_cast<std::size_t>(k)]) << (8 * k);
  return v;
}

double get_f64(std::istream& is, const char* what) {
  std::array<unsigned char, 8> b;
  read_exact(is, reinterpret_cast<char*>(b.data()), 8, what);
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(b[static_cast<std::size_t>(k)]) << (8 * k);
  return std::bit_cast<double>(v);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for reading");
  return is;
}

void finish(std::ostream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) throw Error(ErrorCode::Io, "write to '" + path.string() + "' failed");
}

}  // namespace

void write_dldgrid(std::ostream& os, const FieldResult& field) {
  const GridSpec& g = field.grid;
  if (field.values.size() != g.size() || field.escaped.size() != g.size()) {
    throw Error(ErrorCode::InvalidArgument, "field arrays do not match the grid");
  }
  os.write(kMagic.data(), 4);
  put_u32(os, static_cast<std::uint32_t>(g.nx));
  put_u32(os, static_cast<std::uint32_t>(g.ny));
  put_f64(os, g.xmin);
  put_f64(os, g.xmax);
  put_f64(os, g.ymin);
  put_f64(os, g.ymax);
  put_f64(os, field.params.p);
  put_u32(os, static_cast<std::uint32_t>(field.params.N));
  for (double v : field.values) put_f64(os, v);
  for (std::uint8_t e : field.escaped) os.put(e ? '\1' : '\0');
}

void write_dldgrid(const std::filesystem::path& path, const FieldResult& field) {
  auto os = open_out(path);
  write_dldgrid(os, field);
  finish(os, path);
}

FieldResult read_dldgrid(std::istream& is) {
  std::array<char, 4> magic;
  read_exact(is, magic.data(), 4, "magic");
  if (magic != kMagic) throw Error(ErrorCode::Format, "not a dldgrid file (bad magic)");

  FieldResult field;
  GridSpec& g = field.grid;
  const std::uint32_t nx = get_u32(is, "nx");
  const std::uint32_t ny = get_u32(is, "ny");
  if (nx < 2 || ny < 2 || nx > (1u << 20) || ny > (1u << 20)) {
    throw Error(ErrorCode::Format, "implausible dldgrid dimensions");
  }
  g.nx = static_cast<int>(nx);
  g.ny = static_cast<int>(ny);
  g.xmin = get_f64(is, "xmin");
  g.xmax = get_f64(is, "xmax");
  g.ymin = get_f64(is, "ymin");
  g.ymax = get_f64(is, "ymax");
  field.params.p = get_f64(is, "p");
  field.params.N = static_cast<int>(get_u32(is, "N"));

  field.values.resize(g.size());
  for (double& v : field.values) v = get_f64(is, "values");
  field.escaped.resize(g.size());
  read_exact(is, reinterpret_cast<char*>(field.escaped.data()), field.escaped.size(), "escape flags");
  for (std::uint8_t& e : field.escaped) {
    if (e > 1) throw Error(ErrorCode::Format, "escape flag byte is not 0 or 1");
  }
  return field;
}

FieldResult read_dldgrid(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_dldgrid(is);
}

void write_field_csv(std::ostream& os, const FieldResult& field, const std::vector<std::string>& comments) {
  for (const auto& c : comments) os << "# " << c << '\n';
  const GridSpec& g = field.grid;
  os << "# rows: j = 0.." << g.ny - 1 << " (y from " << g.ymin << " to " << g.ymax << "), columns: i = 0.."
     << g.nx - 1 << " (x from " << g.xmin << " to " << g.xmax << ")\n";
  os << std::setprecision(17);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (i) os << ',';
      os << field.at(i, j);
    }
    os << '\n';
  }
}

void write_field_csv(const std::filesystem::path& path, const FieldResult& field,
                     const std::vector<std::string>& comments) {
  auto os = open_out(path);
  write_field_csv(os, field, comments);
  finish(os, path);
}

void write_pgm(std::ostream& os, const FieldResult& field) {
  const GridSpec& g = field.grid;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < field.values.size(); ++k) {
    if (field.escaped[k]) continue;
    lo = std::min(lo, field.values[k]);
    hi = std::max(hi, field.values[k]);
  }
  const double range = hi - lo;

  os << "P5\n" << g.nx << ' ' << g.ny << "\n65535\n";
  std::vector<char> row(static_cast<std::size_t>(g.nx) * 2);
  for (int j = g.ny - 1; j >= 0; --j) {
    for (int i = 0; i < g.nx; ++i) {
      std::uint16_t level = 65535;
      if (!field.escaped_at(i, j)) {
        const double t = range > 0.0 ? (field.at(i, j) - lo) / range : 0.0;
        level = static_cast<std::uint16_t>(std::lround(std::clamp(t, 0.0, 1.0) * 65535.0));
      }
      row[static_cast<std::size_t>(2 * i)] = static_cast<char>(level >> 8);
      row[static_cast<std::size_t>(2 * i + 1)] = static_cast<char>(level & 0xFF);
    }
    os.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

void write_pgm(const std::filesystem::path& path, const FieldResult& field) {
  auto os = open_out(path);
  write_pgm(os, field);
  finish(os, path);
}

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& is) {
  std::string tok;
  int c;
  while ((c = is.get()) != EOF) {
    if (c == '#') {
      while ((c = is.get()) != EOF && c != '\n') {}
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) throw Error(ErrorCode::Format, "truncated PGM header");
  return tok;
}

int pgm_int(std::istream& is, const char* what) {
  const std::string tok = pgm_token(is);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size() || v <= 0) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::Format, std::string("bad PGM ") + what + " '" + tok + "'");
  }
}

}  // namespace

PgmImage read_pgm(std::istream& is) {
  if (pgm_token(is) != "P5") throw Error(ErrorCode::Format, "not a binary PGM (P5)");
  PgmImage img;
  img.width = pgm_int(is, "width");
  img.height = pgm_int(is, "height");
  img.maxval = pgm_int(is, "maxval");
  if (img.maxval > 65535) throw Error(ErrorCode::Format, "PGM maxval above 65535");
  // pgm_token consumed exactly one whitespace byte after maxval.
  const std::size_t n = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  const std::size_t bytes = img.maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(n * bytes);
  is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(is.gcount()) != raw.size()) throw Error(ErrorCode::Format, "truncated PGM raster");
  img.pixels.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    img.pixels[k] = bytes == 2 ? static_cast<std::uint16_t>((raw[2 * k] << 8) | raw[2 * k + 1]) : raw[k];
    if (img.pixels[k] > img.maxval) throw Error(ErrorCode::Format, "PGM sample above maxval");
  }
  return img;
}

PgmImage read_pgm(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_pgm(is);
}

void write_transect_csv(std::ostream& os, const TransectReport& report,
                        const std::vector<std::string>& comments) {
  for (const auto& c : comments) os << "# " << c << '\n';
  os << "position,md,derivative\n" << std::setprecision(17);
  for (std::size_t k = 0; k < report.positions.size(); ++k) {
    os << report.positions[k] << ',' << report.md_values[k] << ',' << report.derivative[k] << '\n';
  }
  os << "# crossings: " << report.crossings.size() << '\n';
  for (const auto& c : report.crossings) {
    os << "# crossing position=" << c.position << " derivative_magnitude=" << c.derivative_magnitude
       << " refinement_exponent=" << c.refinement_exponent << '\n';
  }
}

void write_transect_csv(const std::filesystem::path& path, const TransectReport& report,
                        const std::vector<std::string>& comments) {
  auto os = open_out(path);
  write_transect_csv(os, report, comments);
  finish(os, path);
}

}  // namespace dld::io
