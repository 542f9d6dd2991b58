#ifndef NSD_GRID_IO_HPP
#define NSD_GRID_IO_HPP

#include <cstdint>
#include <iosfwd>
#include <string>

#include "nsd/grid.hpp"

namespace nsd {

// "GRD1" raw grid exchange format: magic, rows (u32 LE), cols (u32 LE),
// then rows*cols float64 LE values in row-major order.
void save_grid(const Grid2D& g, const std::string& path);
Grid2D load_grid(const std::string& path);

// Little-endian primitives shared by the binary formats.
namespace wire {
void put_u32(std::ostream& os, std::uint32_t v);
void put_u64(std::ostream& os, std::uint64_t v);
void put_f64(std::ostream& os, double v);
std::uint32_t get_u32(std::istream& is);
std::uint64_t get_u64(std::istream& is);
double get_f64(std::istream& is);
void put_magic(std::ostream& os, const char magic[4]);
void check_magic(std::istream& is, const char magic[4], const char* what);
}  // namespace wire

}  // namespace nsd

#endif  // NSD_GRID_IO_HPP
