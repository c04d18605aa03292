#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "gclab/errors.hpp"
#include "gclab/grid_field.hpp"
#include "gclab/reports.hpp"

namespace gclab {
namespace {

constexpr char kMagic[8] = {'G', 'C', 'L', 'A', 'B', 'F', 'L', 'D'};

template <class T>
void put_le(std::ostream& os, T value) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &value, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  os.write(reinterpret_cast<const char*>(&bits), 8);
}

template <class T>
T get_le(std::istream& is) {
  std::uint64_t bits = 0;
  is.read(reinterpret_cast<char*>(&bits), 8);
  if (!is) throw PreconditionError("read_field_binary: truncated file");
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  T value;
  std::memcpy(&value, &bits, 8);
  return value;
}

}  // namespace

void write_field_csv(const WaveField& f, const std::string& path) {
  CsvWriter csv(path, {"x", "re", "im"});
  for (std::size_t j = 0; j < f.size(); ++j) {
    csv.row({f.grid().node(j), f[j].real(), f[j].imag()});
  }
}

void write_field_binary(const WaveField& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw PreconditionError("write_field_binary: cannot open " + path);
  os.write(kMagic, sizeof(kMagic));
  put_le<std::uint64_t>(os, f.size());
  put_le<double>(os, f.grid().half_width());
  put_le<double>(os, f.time());
  for (const cplx& v : f.samples()) {
    put_le<double>(os, v.real());
    put_le<double>(os, v.imag());
  }
  if (!os) throw NumericalError("write_field_binary: write failed for " + path);
}

WaveField read_field_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw PreconditionError("read_field_binary: cannot open " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw PreconditionError("read_field_binary: bad magic in " + path);
  }
  const auto n = get_le<std::uint64_t>(is);
  const auto L = get_le<double>(is);
  const auto t = get_le<double>(is);
  Grid1D grid(static_cast<std::size_t>(n), L);
  std::vector<cplx> samples(grid.size());
  for (auto& v : samples) {
    const double re = get_le<double>(is);
    const double im = get_le<double>(is);
    v = {re, im};
  }
  return WaveField(grid, std::move(samples), t);
}

}  // namespace gclab
