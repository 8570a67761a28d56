#pragma once

// Stationary elastic scattering in atomic units: Thomson and Rutherford
// free-electron prefactors, target form factors, and the conversion between
// differential scattering probability and differential cross section.

#include <complex>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

namespace trdiff::xsec {

enum class Probe { xray, electron };

// Elastic geometry: |k_in| = |k_s| = k_mag. pol_in is only used for x-rays.
struct ProbeGeometry {
  Eigen::Vector3d k_in_dir;
  Eigen::Vector3d k_s_dir;
  double k_mag = 1.0;
  Eigen::Vector3d pol_in = Eigen::Vector3d::UnitX();

  // Validates unit directions and (for x-rays) polarization transversality.
  static ProbeGeometry make(const Eigen::Vector3d& k_in_dir, const Eigen::Vector3d& k_s_dir, double k_mag,
                            const Eigen::Vector3d& pol_in = Eigen::Vector3d::UnitX());

  Eigen::Vector3d transfer() const { return k_mag * (k_in_dir - k_s_dir); }  // k_in - k_s
  double angle() const;
};

// Real samples on a uniform 3D grid. `cell` columns are the full edge vectors
// of the sampled box; sample (i,j,k) sits at origin + cell * (i/nx, j/ny, k/nz).
struct DensityGrid {
  int nx = 1, ny = 1, nz = 1;
  Eigen::Matrix3d cell = Eigen::Matrix3d::Identity();
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  std::vector<double> values;  // x-fastest

  double voxel_volume() const;
  Eigen::Vector3d point(int i, int j, int k) const;
  double& at(int i, int j, int k) { return values[static_cast<std::size_t>(i + nx * (j + ny * k))]; }
  double at(int i, int j, int k) const { return values[static_cast<std::size_t>(i + nx * (j + ny * k))]; }
  double electron_count() const;

  static DensityGrid zeros(int nx, int ny, int nz, const Eigen::Matrix3d& cell, const Eigen::Vector3d& origin);
};

// Plain-text grid file: optional '#' comment lines, then
//   nx ny nz
//   three lines with the cell edge vectors
//   one line with the origin
//   nx*ny*nz values, one per line, x fastest.
DensityGrid read_density_grid(const std::filesystem::path& path);
void write_density_grid(const std::filesystem::path& path, const DensityGrid& grid);

// alpha^4 sum_{lambda_s} |eps_s* . eps_in|^2 over two orthonormal scattered
// polarizations; `basis_angle` rotates that basis about k_s.
double thomson_prefactor(const ProbeGeometry& geom, double basis_angle = 0.0);

// 1 / (16 E^2 sin^4(theta/2)) for kinetic energy E (a.u.).
double rutherford_prefactor(double kinetic_energy, double theta);
// 4 / |k_in - k_s|^4
double rutherford_from_transfer(double transfer);

// integral rho(r) exp(i s.r) dV by direct Riemann summation.
std::complex<double> form_factor(const DensityGrid& rho, const Eigen::Vector3d& s);

double elastic_dsigma(Probe probe, const ProbeGeometry& geom, const DensityGrid& rho);

// dsigma/dOmega = dP/dOmega * N_in / integral F dt
double probability_to_dsigma(double dp_domega, double fluence_factor);

// N_in / (flux * T) for a time-independent flux over duration T.
double fluence_factor(double n_in, double flux, double duration);
double xray_photon_flux(double photons, double volume);  // (1/alpha) n / V
double electron_flux(double k_mag, double volume);       // |k| / V

// Stationary differential scattering probabilities before the fluence
// conversion. `form_factor_sq` is |F(k_in - k_s)|^2.
double xray_dp_domega(const ProbeGeometry& geom, double form_factor_sq, double volume, double duration);
double electron_dp_domega(const ProbeGeometry& geom, double form_factor_sq, double volume, double duration);

}  // namespace trdiff::xsec
