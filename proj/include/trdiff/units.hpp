#pragma once

// Atomic-unit conversion constants (CODATA 2018).
namespace trdiff::units {

inline constexpr double hartree_eV = 27.211386245988;
inline constexpr double time_fs = 0.024188843265857;
inline constexpr double field_V_per_nm = 514.220674763;
inline constexpr double bohr_angstrom = 0.529177210903;

inline constexpr double alpha = 1.0 / 137.035999084;
inline constexpr double speed_of_light = 1.0 / alpha;
inline constexpr double electron_rest_energy_eV = 510998.95;

inline constexpr double ev_to_au(double e) { return e / hartree_eV; }
inline constexpr double au_to_ev(double e) { return e * hartree_eV; }
inline constexpr double fs_to_au(double t) { return t / time_fs; }
inline constexpr double au_to_fs(double t) { return t * time_fs; }
inline constexpr double field_to_au(double v_per_nm) { return v_per_nm / field_V_per_nm; }
inline constexpr double field_to_v_per_nm(double e) { return e * field_V_per_nm; }
inline constexpr double angstrom_to_au(double l) { return l / bohr_angstrom; }
inline constexpr double au_to_angstrom(double l) { return l * bohr_angstrom; }

}  // namespace trdiff::units
