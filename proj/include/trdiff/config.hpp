#pragma once

// Run configuration (JSON), unit handling, and the resolved physical
// parameters in atomic units.

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "trdiff/diffraction.hpp"
#include "trdiff/graphene.hpp"
#include "trdiff/sbe.hpp"

namespace trdiff {

struct UnitTable {
  double energy_eV = 0;
  double time_fs = 0;
  double field_V_per_nm = 0;
  double length_angstrom = 0;

  static UnitTable atomic();
};

struct RunConfig {
  struct Lattice {
    double a_angstrom = 2.46;
    double t_hop_eV = 2.7;
    double orbital_width_au = 0.5;
  } lattice;
  struct Pump {
    double E0_V_per_nm = 2.5;
    double photon_eV = 1.55;
    double tau_fs = 21.0;
    std::array<double, 2> pol{1.0, 0.0};
  } pump;
  struct Grid {
    int nk = 48;
    int cell_grid_n = 48;
    int halo = 1;
  } grid;
  struct Propagation {
    double dt_au = 0.1;
    double T2_fs = 10.0;  // infinity disables dephasing
    int record_stride = 40;
    double t_end_fs = 0;  // 0: end of the pulse
    std::vector<double> snapshots_fs{9.8, 11.2, 11.8, 20.0};
  } propagation;
  struct Beam {
    double kinetic_eV = 1e6;
    double incidence_deg = 45.0;
    std::string probe = "electron_rel";
    double probe_fwhm_fs = 0;
  } beam;
  std::vector<std::array<int, 2>> spots{{1, 1}, {1, -1}};
  std::filesystem::path output_dir = "out";

  // Atomic-unit views.
  graphene::Lattice make_lattice() const;
  double t_hop() const;
  graphene::OrbitalProfile orbital() const;
  graphene::CellGrid cell_grid(const graphene::Lattice& lat) const;
  graphene::KGrid kgrid(const graphene::Lattice& lat) const;
  sbe::LaserPulse pulse() const;
  sbe::PropagatorConfig propagator(unsigned threads) const;
  diffraction::BeamConfig beam_config() const;
  std::vector<graphene::Spot> make_spots(const graphene::Lattice& lat) const;

  // Checks every invariant; throws ConfigError naming the offending key.
  void validate() const;

  std::string to_json() const;  // fully resolved, canonical formatting
  std::string hash() const;     // FNV-1a of to_json(), 16 hex digits
};

// Parses a JSON config, filling defaults. Unknown keys, type mismatches and
// invariant violations raise ConfigError naming the key.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text);

// Creates output_dir and writes resolved_config.json into it.
void write_resolved_config(const RunConfig& cfg);

}  // namespace trdiff
