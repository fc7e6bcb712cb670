#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "gpw/field.hpp"

namespace gpw {

/// Binary field snapshot.
/// Layout: magic "GPWV", u32 version=1, u8 dim, u64 n, u64 sizes per dim,
/// then complex float64 little-endian, row-major.
inline void write_field(const Field& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_field: cannot open " + path);
  out.write("GPWV", 4);
  const std::uint32_t version = 1;
  out.write(reinterpret_cast<const char*>(&version), 4);
  const std::uint8_t dim = static_cast<std::uint8_t>(f.grid.dim);
  out.write(reinterpret_cast<const char*>(&dim), 1);
  const std::uint64_t n = static_cast<std::uint64_t>(f.grid.n);
  out.write(reinterpret_cast<const char*>(&n), 8);
  for (int a = 0; a < f.grid.dim; ++a) {
    const std::uint64_t m = static_cast<std::uint64_t>(f.grid.npts[a]);
    out.write(reinterpret_cast<const char*>(&m), 8);
  }
  out.write(reinterpret_cast<const char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(cdouble)));
  if (!out) throw std::runtime_error("write_field: write failed for " + path);
}

inline Field read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_field: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "GPWV", 4) != 0)
    throw std::runtime_error("read_field: bad magic in " + path);
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), 4);
  if (version != 1) throw std::runtime_error("read_field: unsupported version");
  std::uint8_t dim = 0;
  in.read(reinterpret_cast<char*>(&dim), 1);
  if (dim < 1 || dim > 3) throw std::runtime_error("read_field: bad dim");
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), 8);
  std::array<int, 3> npts{1, 1, 1};
  for (int a = 0; a < dim; ++a) {
    std::uint64_t m = 0;
    in.read(reinterpret_cast<char*>(&m), 8);
    npts[a] = static_cast<int>(m);
  }
  Grid g(dim, static_cast<long>(n), npts);
  std::vector<cdouble> vals(g.total());
  in.read(reinterpret_cast<char*>(vals.data()),
          static_cast<std::streamsize>(vals.size() * sizeof(cdouble)));
  if (!in || in.gcount() != static_cast<std::streamsize>(vals.size() * sizeof(cdouble)))
    throw std::runtime_error("read_field: truncated payload in " + path);
  return Field(g, std::move(vals));
}

}  // namespace gpw
