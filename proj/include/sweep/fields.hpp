#pragma once

#include <cstdint>
#include <string>

#include "sweep/pml.hpp"

namespace sweep {

enum class FieldKind { Lens, Waveguide, Random, Constant, ExternalFile };
enum class ForcingKind { PointSource, WavePacket };

std::string to_string(FieldKind k);
std::string to_string(ForcingKind k);
FieldKind parse_field(const std::string& s);
ForcingKind parse_forcing(const std::string& s);

// Revision of the built-in velocity formulas below. Bump when any changes.
inline constexpr int kFieldFormulaVersion = 1;

// Built-in velocity models on the grid points:
//   lens       c = 1 - 0.4 exp(-32 |x - center|^2)
//   waveguide  c = 1 - 0.4 exp(-32 dist(x, axis)^2), axis along the sweep
//              direction through the center of the transversal plane
//   random     c = 1 + 0.3 g, g white noise blurred with a Gaussian of
//              standard deviation half a wavelength, scaled to max |g| = 1
//   constant   c = 1
RVector make_velocity(FieldKind kind, const Grid& grid, Real omega, std::uint64_t seed = 1,
                      const std::string& path = {});

// Point source: Gaussian of standard deviation 2h, unit discrete mass.
// Wave packet: Gaussian envelope with full width at half maximum of one
// wavelength times exp(i omega k.x), unit discrete mass of the envelope.
CVector make_forcing(ForcingKind kind, const Grid& grid, Real omega);

// Raw grid file: int64 dim, int64 n, then n^dim float64 values in layer-major
// order (x1 fastest), all little-endian.
struct GridFile {
  int dim = 0;
  int n = 0;
  RVector values;
};
GridFile read_grid_file(const std::string& path);
void write_grid_file(const std::string& path, int dim, int n, const RVector& values);

}  // namespace sweep
