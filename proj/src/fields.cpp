#include "sweep/fields.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <vector>

namespace sweep {

std::string to_string(FieldKind k) {
  switch (k) {
    case FieldKind::Lens: return "lens";
    case FieldKind::Waveguide: return "waveguide";
    case FieldKind::Random: return "random";
    case FieldKind::Constant: return "constant";
    case FieldKind::ExternalFile: return "external-file";
  }
  return "?";
}

std::string to_string(ForcingKind k) {
  return k == ForcingKind::PointSource ? "point-source" : "wave-packet";
}

FieldKind parse_field(const std::string& s) {
  if (s == "lens") return FieldKind::Lens;
  if (s == "waveguide") return FieldKind::Waveguide;
  if (s == "random") return FieldKind::Random;
  if (s == "constant") return FieldKind::Constant;
  if (s == "external-file" || s == "file") return FieldKind::ExternalFile;
  throw DomainError("unknown velocity field '" + s + "'");
}

ForcingKind parse_forcing(const std::string& s) {
  if (s == "point-source" || s == "point") return ForcingKind::PointSource;
  if (s == "wave-packet" || s == "packet") return ForcingKind::WavePacket;
  throw DomainError("unknown forcing '" + s + "'");
}

namespace {

std::array<Real, 3> coords(const Grid& g, Index flat) {
  const Index n = g.n;
  std::array<Real, 3> x{};
  x[0] = Real(flat % n + 1) * g.h;
  x[1] = Real((flat / n) % n + 1) * g.h;
  x[2] = g.dim == 3 ? Real(flat / (n * n) + 1) * g.h : 0.0;
  return x;
}

// Uniform in [-1, 1] from the top 53 bits; stable across standard libraries.
Real unit_noise(std::mt19937_64& rng) {
  return 2.0 * (Real(rng() >> 11) * 0x1.0p-53) - 1.0;
}

RVector blurred_noise(const Grid& g, Real omega, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RVector v(g.N);
  for (Index k = 0; k < g.N; ++k) v[k] = unit_noise(rng);

  const Real wavelength = 2.0 * std::numbers::pi / omega;
  const Real sd = 0.5 * wavelength / g.h;
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sd)));
  std::vector<Real> kernel(2 * radius + 1);
  for (int t = -radius; t <= radius; ++t) kernel[t + radius] = std::exp(-0.5 * t * t / (sd * sd));

  const int n = g.n;
  const Index strides[3] = {1, n, Index(n) * n};
  RVector tmp(g.N);
  for (int axis = 0; axis < g.dim; ++axis) {
    const Index stride = strides[axis];
    for (Index k = 0; k < g.N; ++k) {
      const int pos = static_cast<int>((k / stride) % n);
      Real acc = 0.0, wsum = 0.0;
      for (int t = std::max(-radius, -pos); t <= std::min(radius, n - 1 - pos); ++t) {
        acc += kernel[t + radius] * v[k + t * stride];
        wsum += kernel[t + radius];
      }
      tmp[k] = acc / wsum;
    }
    v.swap(tmp);
  }
  v.array() -= v.mean();
  const Real peak = v.cwiseAbs().maxCoeff();
  if (peak > 0.0) v /= peak;
  return v;
}

}  // namespace

RVector make_velocity(FieldKind kind, const Grid& g, Real omega, std::uint64_t seed,
                      const std::string& path) {
  RVector c(g.N);
  switch (kind) {
    case FieldKind::Constant:
      c.setOnes();
      break;
    case FieldKind::Lens:
    case FieldKind::Waveguide:
      for (Index k = 0; k < g.N; ++k) {
        const auto x = coords(g, k);
        Real r2 = (x[0] - 0.5) * (x[0] - 0.5);
        if (g.dim == 3) r2 += (x[1] - 0.5) * (x[1] - 0.5);
        if (kind == FieldKind::Lens) r2 += (x[g.dim - 1] - 0.5) * (x[g.dim - 1] - 0.5);
        c[k] = 1.0 - 0.4 * std::exp(-32.0 * r2);
      }
      break;
    case FieldKind::Random:
      c = RVector::Ones(g.N) + 0.3 * blurred_noise(g, omega, seed);
      break;
    case FieldKind::ExternalFile: {
      const GridFile f = read_grid_file(path);
      if (f.dim != g.dim || f.n != g.n)
        throw ShapeError("velocity file holds a " + std::to_string(f.n) + "^" +
                         std::to_string(f.dim) + " grid, problem needs " + std::to_string(g.n) +
                         "^" + std::to_string(g.dim));
      c = f.values;
      break;
    }
  }
  return c;
}

CVector make_forcing(ForcingKind kind, const Grid& g, Real omega) {
  CVector f(g.N);
  const Real cell = std::pow(g.h, g.dim);
  if (kind == ForcingKind::PointSource) {
    const std::array<Real, 3> c0 = g.dim == 2 ? std::array<Real, 3>{0.5, 0.125, 0.0}
                                              : std::array<Real, 3>{0.5, 0.5, 0.25};
    const Real w = 2.0 * g.h;
    for (Index k = 0; k < g.N; ++k) {
      const auto x = coords(g, k);
      Real r2 = 0.0;
      for (int a = 0; a < g.dim; ++a) r2 += (x[a] - c0[a]) * (x[a] - c0[a]);
      f[k] = std::exp(-0.5 * r2 / (w * w));
    }
    f /= f.real().sum() * cell;
    return f;
  }
  const Real s = std::sqrt(0.5);
  const std::array<Real, 3> c0 = g.dim == 2 ? std::array<Real, 3>{0.125, 0.125, 0.0}
                                            : std::array<Real, 3>{0.5, 0.25, 0.25};
  const std::array<Real, 3> dir = g.dim == 2 ? std::array<Real, 3>{s, s, 0.0}
                                             : std::array<Real, 3>{0.0, s, s};
  const Real wavelength = 2.0 * std::numbers::pi / omega;
  const Real sd = wavelength / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  Real mass = 0.0;
  for (Index k = 0; k < g.N; ++k) {
    const auto x = coords(g, k);
    Real r2 = 0.0, phase = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      r2 += (x[a] - c0[a]) * (x[a] - c0[a]);
      phase += dir[a] * x[a];
    }
    const Real env = std::exp(-0.5 * r2 / (sd * sd));
    mass += env;
    f[k] = env * std::exp(kI * (omega * phase));
  }
  f /= mass * cell;
  return f;
}

GridFile read_grid_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::int64_t header[2];
  if (!in.read(reinterpret_cast<char*>(header), sizeof header)) throw ShapeError("truncated grid file header");
  if ((header[0] != 2 && header[0] != 3) || header[1] < 1) throw ShapeError("bad grid file header");
  GridFile f;
  f.dim = static_cast<int>(header[0]);
  f.n = static_cast<int>(header[1]);
  const Index count = f.dim == 2 ? Index(f.n) * f.n : Index(f.n) * f.n * f.n;
  f.values.resize(count);
  if (!in.read(reinterpret_cast<char*>(f.values.data()), count * sizeof(Real)))
    throw ShapeError("grid file holds fewer samples than its header declares");
  return f;
}

void write_grid_file(const std::string& path, int dim, int n, const RVector& values) {
  const Index count = dim == 2 ? Index(n) * n : Index(n) * n * n;
  if (values.size() != count) throw ShapeError("grid values do not match the header");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  const std::int64_t header[2] = {dim, n};
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  out.write(reinterpret_cast<const char*>(values.data()), count * sizeof(Real));
}

}  // namespace sweep
