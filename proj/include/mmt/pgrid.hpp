#pragma once

#include <filesystem>

#include "mmt/field.hpp"

namespace mmt {

/// PGRID1 binary grid file: 8-byte magic "PGRID1\0\0", u32 rows, u32 cols,
/// u32 component count, f64 Re(tau), f64 Im(tau), then row-major f64
/// little-endian samples with components interleaved per node.
struct PGrid {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::uint32_t components = 0;
  complexd tau{0.0, 1.0};
  std::vector<double> data;  // rows*cols*components, node-major
};

void write_pgrid(const std::filesystem::path& path, const PGrid& g);
PGrid read_pgrid(const std::filesystem::path& path);

PGrid to_pgrid(const RealField& f);
PGrid to_pgrid(const ComplexField& f);
PGrid to_pgrid(const VectorField& f);

RealField pgrid_to_real(const PGrid& g);
ComplexField pgrid_to_complex(const PGrid& g);
VectorField pgrid_to_vector(const PGrid& g);

}  // namespace mmt
