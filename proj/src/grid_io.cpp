#include "nsd/grid_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "nsd/errors.hpp"

namespace nsd {
namespace wire {

void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
               static_cast<char>((v >> 16) & 0xff),
               static_cast<char>((v >> 24) & 0xff)};
  os.write(b, 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 8);
}

void put_f64(std::ostream& os, double v) {
  put_u64(os, std::bit_cast<std::uint64_t>(v));
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw FormatError("truncated file: expected u32");
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw FormatError("truncated file: expected u64");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) {
  return std::bit_cast<double>(get_u64(is));
}

void put_magic(std::ostream& os, const char magic[4]) { os.write(magic, 4); }

void check_magic(std::istream& is, const char magic[4], const char* what) {
  char b[4];
  is.read(b, 4);
  if (!is || std::memcmp(b, magic, 4) != 0)
    throw FormatError(std::string("bad magic for ") + what);
}

}  // namespace wire

void save_grid(const Grid2D& g, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for write: " + path);
  wire::put_magic(os, "GRD1");
  wire::put_u32(os, static_cast<std::uint32_t>(g.rows()));
  wire::put_u32(os, static_cast<std::uint32_t>(g.cols()));
  for (double v : g.data()) wire::put_f64(os, v);
  if (!os) throw IoError("write failed: " + path);
}

Grid2D load_grid(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path);
  wire::check_magic(is, "GRD1", path.c_str());
  const std::uint32_t rows = wire::get_u32(is);
  const std::uint32_t cols = wire::get_u32(is);
  if (rows == 0 || cols == 0)
    throw FormatError("GRD1: zero dimension in " + path);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(rows) * cols);
  for (std::size_t i = 0; i < static_cast<std::size_t>(rows) * cols; ++i)
    values.push_back(wire::get_f64(is));
  try {
    return Grid2D(rows, cols, std::move(values));
  } catch (const ContractError& e) {
    throw FormatError(std::string("GRD1: invalid contents: ") + e.what());
  }
}

}  // namespace nsd
