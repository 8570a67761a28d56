#include "trdiff/xsec.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "trdiff/errors.hpp"
#include "trdiff/units.hpp"

namespace trdiff::xsec {

namespace {

constexpr double unit_tol = 1e-12;

void require_unit(const Eigen::Vector3d& v, const char* name) {
  if (std::abs(v.norm() - 1.0) > unit_tol)
    throw DomainError("stationary_xsec", std::string(name) + " is not a unit vector");
}

// Two orthonormal vectors spanning the plane perpendicular to `axis`.
std::pair<Eigen::Vector3d, Eigen::Vector3d> transverse_basis(const Eigen::Vector3d& axis) {
  const Eigen::Vector3d seed =
      std::abs(axis.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  Eigen::Vector3d e1 = (seed - axis * axis.dot(seed)).normalized();
  Eigen::Vector3d e2 = axis.cross(e1);
  return {e1, e2};
}

}  // namespace

ProbeGeometry ProbeGeometry::make(const Eigen::Vector3d& k_in_dir, const Eigen::Vector3d& k_s_dir, double k_mag,
                                  const Eigen::Vector3d& pol_in) {
  require_unit(k_in_dir, "k_in_dir");
  require_unit(k_s_dir, "k_s_dir");
  require_unit(pol_in, "pol_in");
  if (!(k_mag > 0)) throw DomainError("stationary_xsec", "|k| must be positive");
  return ProbeGeometry{k_in_dir, k_s_dir, k_mag, pol_in};
}

double ProbeGeometry::angle() const {
  const double c = std::clamp(k_in_dir.dot(k_s_dir), -1.0, 1.0);
  // atan2 form keeps precision near 0 and pi.
  return std::atan2(k_in_dir.cross(k_s_dir).norm(), c);
}

double DensityGrid::voxel_volume() const { return std::abs(cell.determinant()) / (double(nx) * ny * nz); }

Eigen::Vector3d DensityGrid::point(int i, int j, int k) const {
  return origin + cell * Eigen::Vector3d(double(i) / nx, double(j) / ny, double(k) / nz);
}

double DensityGrid::electron_count() const {
  double sum = 0;
  for (double v : values) sum += v;
  return sum * voxel_volume();
}

DensityGrid DensityGrid::zeros(int nx, int ny, int nz, const Eigen::Matrix3d& cell, const Eigen::Vector3d& origin) {
  DensityGrid g;
  g.nx = nx;
  g.ny = ny;
  g.nz = nz;
  g.cell = cell;
  g.origin = origin;
  g.values.assign(static_cast<std::size_t>(nx) * ny * nz, 0.0);
  return g;
}

DensityGrid read_density_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("stationary_xsec", "cannot open density grid file " + path.string());
  std::stringstream body;
  for (std::string line; std::getline(in, line);) {
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    body << line << '\n';
  }
  DensityGrid g;
  if (!(body >> g.nx >> g.ny >> g.nz) || g.nx < 1 || g.ny < 1 || g.nz < 1)
    throw DomainError("stationary_xsec", "density grid: bad dimension header in " + path.string());
  for (int c = 0; c < 3; ++c)
    if (!(body >> g.cell(0, c) >> g.cell(1, c) >> g.cell(2, c)))
      throw DomainError("stationary_xsec", "density grid: bad cell vectors in " + path.string());
  if (!(body >> g.origin.x() >> g.origin.y() >> g.origin.z()))
    throw DomainError("stationary_xsec", "density grid: bad origin in " + path.string());
  const std::size_t n = static_cast<std::size_t>(g.nx) * g.ny * g.nz;
  g.values.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    if (!(body >> g.values[i]))
      throw DomainError("stationary_xsec", "density grid: expected " + std::to_string(n) + " values, got " +
                                               std::to_string(i));
  return g;
}

void write_density_grid(const std::filesystem::path& path, const DensityGrid& grid) {
  std::ofstream out(path);
  if (!out) throw DomainError("stationary_xsec", "cannot write density grid file " + path.string());
  out.precision(17);
  out << grid.nx << ' ' << grid.ny << ' ' << grid.nz << '\n';
  for (int c = 0; c < 3; ++c) out << grid.cell(0, c) << ' ' << grid.cell(1, c) << ' ' << grid.cell(2, c) << '\n';
  out << grid.origin.x() << ' ' << grid.origin.y() << ' ' << grid.origin.z() << '\n';
  for (double v : grid.values) out << v << '\n';
}

double thomson_prefactor(const ProbeGeometry& geom, double basis_angle) {
  if (std::abs(geom.pol_in.dot(geom.k_in_dir)) > unit_tol)
    throw DomainError("stationary_xsec", "thomson_prefactor: incident polarization is not transverse to k_in");
  auto [e1, e2] = transverse_basis(geom.k_s_dir);
  const double c = std::cos(basis_angle), s = std::sin(basis_angle);
  const Eigen::Vector3d p1 = c * e1 + s * e2;
  const Eigen::Vector3d p2 = -s * e1 + c * e2;
  const double overlap = std::pow(p1.dot(geom.pol_in), 2) + std::pow(p2.dot(geom.pol_in), 2);
  return std::pow(units::alpha, 4) * overlap;
}

double rutherford_prefactor(double kinetic_energy, double theta) {
  if (!(kinetic_energy > 0)) throw DomainError("stationary_xsec", "rutherford_prefactor: energy must be positive");
  if (!(theta > 1e-6) || theta > std::numbers::pi + 1e-12)
    throw DomainError("stationary_xsec", "rutherford_prefactor: theta must lie in (0, pi]; forward limit diverges");
  const double s = std::sin(0.5 * theta);
  return 1.0 / (16.0 * kinetic_energy * kinetic_energy * std::pow(s, 4));
}

double rutherford_from_transfer(double transfer) {
  if (!(transfer > 0)) throw DomainError("stationary_xsec", "rutherford_from_transfer: zero momentum transfer");
  return 4.0 / std::pow(transfer, 4);
}

std::complex<double> form_factor(const DensityGrid& rho, const Eigen::Vector3d& s) {
  const std::array<int, 3> n{rho.nx, rho.ny, rho.nz};
  for (int axis = 0; axis < 3; ++axis) {
    const double phase_step = std::abs(s.dot(rho.cell.col(axis))) / n[static_cast<std::size_t>(axis)];
    if (phase_step >= std::numbers::pi) {
      const double needed = std::ceil(std::abs(s.dot(rho.cell.col(axis))) / std::numbers::pi) + 1;
      throw DomainError("stationary_xsec", "form_factor: grid under-resolves |s| along axis " + std::to_string(axis) +
                                               " (need at least " + std::to_string(int(needed)) + " samples)");
    }
  }
  // Separable phase factors: exp(i s.r) = exp(i s.o) * ex[i] * ey[j] * ez[k]
  const auto axis_phases = [&](int axis, int count) {
    std::vector<std::complex<double>> ph(static_cast<std::size_t>(count));
    const double step = s.dot(rho.cell.col(axis)) / count;
    for (int i = 0; i < count; ++i) ph[static_cast<std::size_t>(i)] = std::polar(1.0, step * i);
    return ph;
  };
  const auto ex = axis_phases(0, rho.nx), ey = axis_phases(1, rho.ny), ez = axis_phases(2, rho.nz);
  std::complex<double> total(0);
  for (int k = 0; k < rho.nz; ++k) {
    std::complex<double> plane(0);
    for (int j = 0; j < rho.ny; ++j) {
      std::complex<double> row(0);
      for (int i = 0; i < rho.nx; ++i) row += rho.at(i, j, k) * ex[static_cast<std::size_t>(i)];
      plane += row * ey[static_cast<std::size_t>(j)];
    }
    total += plane * ez[static_cast<std::size_t>(k)];
  }
  return total * std::polar(rho.voxel_volume(), s.dot(rho.origin));
}

double elastic_dsigma(Probe probe, const ProbeGeometry& geom, const DensityGrid& rho) {
  const double f2 = std::norm(form_factor(rho, geom.transfer()));
  if (probe == Probe::xray) return thomson_prefactor(geom) * f2;
  const double energy = 0.5 * geom.k_mag * geom.k_mag;
  return rutherford_prefactor(energy, geom.angle()) * f2;
}

double probability_to_dsigma(double dp_domega, double fluence_factor) {
  if (!(fluence_factor > 0)) throw DomainError("stationary_xsec", "probability_to_dsigma: fluence factor must be > 0");
  return dp_domega * fluence_factor;
}

double fluence_factor(double n_in, double flux, double duration) {
  if (!(flux > 0) || !(duration > 0)) throw DomainError("stationary_xsec", "fluence_factor: zero fluence");
  return n_in / (flux * duration);
}

double xray_photon_flux(double photons, double volume) { return photons / (units::alpha * volume); }

double electron_flux(double k_mag, double volume) { return k_mag / volume; }

double xray_dp_domega(const ProbeGeometry& geom, double form_factor_sq, double volume, double duration) {
  return std::pow(units::alpha, 3) / volume * duration * (thomson_prefactor(geom) / std::pow(units::alpha, 4)) *
         form_factor_sq;
}

double electron_dp_domega(const ProbeGeometry& geom, double form_factor_sq, double volume, double duration) {
  return 4.0 / volume * duration * geom.k_mag / std::pow(geom.transfer().norm(), 4) * form_factor_sq;
}

}  // namespace trdiff::xsec
