#include "mmt/pgrid.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace mmt {

static_assert(std::endian::native == std::endian::little,
              "PGRID1 writer assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'P', 'G', 'R', 'I', 'D', '1', '\0', '\0'};

template <typename T>
void put(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("PGRID1: truncated file");
  return v;
}

}  // namespace

void write_pgrid(const std::filesystem::path& path, const PGrid& g) {
  if (g.data.size() != static_cast<std::size_t>(g.rows) * g.cols * g.components) {
    throw std::invalid_argument("PGRID1: data size does not match header");
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("PGRID1: cannot open " + path.string() + " for writing");
  os.write(kMagic, sizeof(kMagic));
  put(os, g.rows);
  put(os, g.cols);
  put(os, g.components);
  put(os, g.tau.real());
  put(os, g.tau.imag());
  os.write(reinterpret_cast<const char*>(g.data.data()),
           static_cast<std::streamsize>(g.data.size() * sizeof(double)));
  if (!os) throw std::runtime_error("PGRID1: write failed for " + path.string());
}

PGrid read_pgrid(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("PGRID1: cannot open " + path.string());
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("PGRID1: bad magic in " + path.string());
  }
  PGrid g;
  g.rows = get<std::uint32_t>(is);
  g.cols = get<std::uint32_t>(is);
  g.components = get<std::uint32_t>(is);
  const double re = get<double>(is);
  const double im = get<double>(is);
  g.tau = complexd(re, im);
  g.data.resize(static_cast<std::size_t>(g.rows) * g.cols * g.components);
  is.read(reinterpret_cast<char*>(g.data.data()),
          static_cast<std::streamsize>(g.data.size() * sizeof(double)));
  if (!is) throw std::runtime_error("PGRID1: truncated samples in " + path.string());
  return g;
}

PGrid to_pgrid(const RealField& f) {
  PGrid g;
  g.rows = static_cast<std::uint32_t>(f.grid.rows);
  g.cols = static_cast<std::uint32_t>(f.grid.cols);
  g.components = 1;
  g.tau = f.grid.lattice.tau;
  g.data = f.samples;
  return g;
}

PGrid to_pgrid(const ComplexField& f) {
  PGrid g;
  g.rows = static_cast<std::uint32_t>(f.grid.rows);
  g.cols = static_cast<std::uint32_t>(f.grid.cols);
  g.components = 2;
  g.tau = f.grid.lattice.tau;
  g.data.resize(f.size() * 2);
  for (std::size_t i = 0; i < f.size(); ++i) {
    g.data[2 * i] = f[i].real();
    g.data[2 * i + 1] = f[i].imag();
  }
  return g;
}

PGrid to_pgrid(const VectorField& f) {
  PGrid g;
  g.rows = static_cast<std::uint32_t>(f.grid.rows);
  g.cols = static_cast<std::uint32_t>(f.grid.cols);
  g.components = static_cast<std::uint32_t>(f.dim);
  g.tau = f.grid.lattice.tau;
  g.data = f.data;
  return g;
}

RealField pgrid_to_real(const PGrid& g) {
  if (g.components != 1) throw std::runtime_error("PGRID1: expected 1 component");
  RealField f(Grid(g.rows, g.cols, Lattice(g.tau)));
  f.samples = g.data;
  return f;
}

ComplexField pgrid_to_complex(const PGrid& g) {
  if (g.components != 2) throw std::runtime_error("PGRID1: expected 2 components");
  ComplexField f(Grid(g.rows, g.cols, Lattice(g.tau)));
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] = complexd(g.data[2 * i], g.data[2 * i + 1]);
  }
  return f;
}

VectorField pgrid_to_vector(const PGrid& g) {
  VectorField f(Grid(g.rows, g.cols, Lattice(g.tau)), g.components);
  f.data = g.data;
  return f;
}

}  // namespace mmt
