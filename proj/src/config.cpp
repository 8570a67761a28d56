#include "trdiff/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "trdiff/errors.hpp"
#include "trdiff/units.hpp"

namespace trdiff {

using nlohmann::json;

namespace {

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError("cli_io", "'" + key + "' " + what);
}

// Reads obj[name] into out when present, reporting type mismatches by key.
template <typename T>
void read(const json& obj, const char* name, const std::string& prefix, T& out) {
  const auto it = obj.find(name);
  if (it == obj.end()) return;
  try {
    out = it->template get<T>();
  } catch (const json::exception&) {
    throw ConfigError("cli_io", "'" + prefix + name + "' has the wrong type (got " + it->type_name() + ")");
  }
}

void reject_unknown(const json& obj, const std::string& prefix, std::initializer_list<const char*> known) {
  if (!obj.is_object()) throw ConfigError("cli_io", "'" + prefix + "' must be an object");
  for (const auto& item : obj.items()) {
    bool found = false;
    for (const char* k : known) found = found || item.key() == k;
    if (!found) throw ConfigError("cli_io", "unknown key '" + prefix + item.key() + "'");
  }
}

const json& section(const json& root, const char* name) {
  static const json empty = json::object();
  const auto it = root.find(name);
  return it == root.end() ? empty : *it;
}

RunConfig from_json(const json& root) {
  RunConfig cfg;
  reject_unknown(root, "", {"lattice", "pump", "grid", "propagation", "beam", "spots", "output_dir"});

  const json& lat = section(root, "lattice");
  reject_unknown(lat, "lattice.", {"a_angstrom", "t_hop_eV", "orbital_width_au"});
  read(lat, "a_angstrom", "lattice.", cfg.lattice.a_angstrom);
  read(lat, "t_hop_eV", "lattice.", cfg.lattice.t_hop_eV);
  read(lat, "orbital_width_au", "lattice.", cfg.lattice.orbital_width_au);

  const json& pump = section(root, "pump");
  reject_unknown(pump, "pump.", {"E0_V_per_nm", "photon_eV", "tau_fs", "pol"});
  read(pump, "E0_V_per_nm", "pump.", cfg.pump.E0_V_per_nm);
  read(pump, "photon_eV", "pump.", cfg.pump.photon_eV);
  read(pump, "tau_fs", "pump.", cfg.pump.tau_fs);
  read(pump, "pol", "pump.", cfg.pump.pol);

  const json& grid = section(root, "grid");
  reject_unknown(grid, "grid.", {"nk", "cell_grid_n", "halo"});
  read(grid, "nk", "grid.", cfg.grid.nk);
  read(grid, "cell_grid_n", "grid.", cfg.grid.cell_grid_n);
  read(grid, "halo", "grid.", cfg.grid.halo);

  const json& prop = section(root, "propagation");
  reject_unknown(prop, "propagation.", {"dt_au", "T2_fs", "record_stride", "t_end_fs", "snapshots_fs"});
  read(prop, "dt_au", "propagation.", cfg.propagation.dt_au);
  if (const auto it = prop.find("T2_fs"); it != prop.end()) {
    if (it->is_string()) {
      require(it->get<std::string>() == "inf", "propagation.T2_fs", "must be a number or \"inf\"");
      cfg.propagation.T2_fs = std::numeric_limits<double>::infinity();
    } else {
      read(prop, "T2_fs", "propagation.", cfg.propagation.T2_fs);
    }
  }
  read(prop, "record_stride", "propagation.", cfg.propagation.record_stride);
  read(prop, "t_end_fs", "propagation.", cfg.propagation.t_end_fs);
  read(prop, "snapshots_fs", "propagation.", cfg.propagation.snapshots_fs);

  const json& beam = section(root, "beam");
  reject_unknown(beam, "beam.", {"kinetic_eV", "incidence_deg", "probe", "probe_fwhm_fs"});
  read(beam, "kinetic_eV", "beam.", cfg.beam.kinetic_eV);
  read(beam, "incidence_deg", "beam.", cfg.beam.incidence_deg);
  read(beam, "probe", "beam.", cfg.beam.probe);
  read(beam, "probe_fwhm_fs", "beam.", cfg.beam.probe_fwhm_fs);

  read(root, "spots", "", cfg.spots);
  std::string out = cfg.output_dir.string();
  read(root, "output_dir", "", out);
  cfg.output_dir = out;

  cfg.validate();
  return cfg;
}

std::string format_number(double v) {
  if (std::isinf(v)) return "\"inf\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

UnitTable UnitTable::atomic() {
  return UnitTable{units::hartree_eV, units::time_fs, units::field_V_per_nm, units::bohr_angstrom};
}

graphene::Lattice RunConfig::make_lattice() const {
  return graphene::Lattice::make(units::angstrom_to_au(lattice.a_angstrom));
}

double RunConfig::t_hop() const { return units::ev_to_au(lattice.t_hop_eV); }

graphene::OrbitalProfile RunConfig::orbital() const { return graphene::gaussian_orbital(lattice.orbital_width_au); }

graphene::CellGrid RunConfig::cell_grid(const graphene::Lattice& lat) const {
  return graphene::make_cell_grid(lat, grid.cell_grid_n, grid.halo);
}

graphene::KGrid RunConfig::kgrid(const graphene::Lattice& lat) const { return graphene::make_kgrid(lat, grid.nk); }

sbe::LaserPulse RunConfig::pulse() const {
  sbe::LaserPulse p;
  p.E0 = units::field_to_au(pump.E0_V_per_nm);
  p.omega = units::ev_to_au(pump.photon_eV);
  p.tau = units::fs_to_au(pump.tau_fs);
  p.pol = Eigen::Vector2d(pump.pol[0], pump.pol[1]).normalized();
  return p;
}

sbe::PropagatorConfig RunConfig::propagator(unsigned threads) const {
  sbe::PropagatorConfig c;
  c.dt = propagation.dt_au;
  c.T2 = std::isinf(propagation.T2_fs) ? std::numeric_limits<double>::infinity()
                                       : units::fs_to_au(propagation.T2_fs);
  c.record_stride = propagation.record_stride;
  c.t_end = units::fs_to_au(propagation.t_end_fs > 0 ? propagation.t_end_fs : pump.tau_fs);
  c.threads = threads;
  return c;
}

diffraction::BeamConfig RunConfig::beam_config() const {
  return diffraction::BeamConfig::make(beam.kinetic_eV, beam.incidence_deg, diffraction::parse_probe(beam.probe));
}

std::vector<graphene::Spot> RunConfig::make_spots(const graphene::Lattice& lat) const {
  std::vector<graphene::Spot> out;
  for (const auto& hk : spots) out.push_back(graphene::make_spot(lat, hk[0], hk[1]));
  return out;
}

void RunConfig::validate() const {
  require(lattice.a_angstrom > 0, "lattice.a_angstrom", "must be > 0");
  require(lattice.t_hop_eV > 0, "lattice.t_hop_eV", "must be > 0");
  require(lattice.orbital_width_au > 0, "lattice.orbital_width_au", "must be > 0");
  require(pump.E0_V_per_nm >= 0, "pump.E0_V_per_nm", "must be >= 0");
  require(pump.photon_eV > 0, "pump.photon_eV", "must be > 0");
  require(pump.tau_fs > 0, "pump.tau_fs", "must be > 0");
  require(std::hypot(pump.pol[0], pump.pol[1]) > 0, "pump.pol", "must be a nonzero 2-vector");
  require(grid.nk >= 2 && grid.nk % 2 == 0, "grid.nk", "must be even and >= 2");
  require(grid.cell_grid_n >= 2, "grid.cell_grid_n", "must be >= 2");
  require(grid.halo >= 0, "grid.halo", "must be >= 0");
  require(propagation.dt_au > 0, "propagation.dt_au", "must be > 0");
  const double omega = units::ev_to_au(pump.photon_eV);
  require(propagation.dt_au <= 2.0 * std::numbers::pi / (40.0 * omega), "propagation.dt_au",
          "must resolve the carrier (dt <= 2 pi / (40 omega))");
  require(propagation.T2_fs > 0, "propagation.T2_fs", "must be > 0 or \"inf\"");
  require(propagation.record_stride >= 1, "propagation.record_stride", "must be >= 1");
  require(propagation.t_end_fs >= 0, "propagation.t_end_fs", "must be >= 0");
  for (double t : propagation.snapshots_fs) require(t >= 0, "propagation.snapshots_fs", "entries must be >= 0");
  require(beam.kinetic_eV >= 0, "beam.kinetic_eV", "must be >= 0");
  require(beam.incidence_deg > 0 && beam.incidence_deg <= 90, "beam.incidence_deg", "must be in (0, 90]");
  require(beam.probe == "xray" || beam.probe == "electron_nonrel" || beam.probe == "electron_rel", "beam.probe",
          "must be xray, electron_nonrel or electron_rel");
  require(beam.probe_fwhm_fs >= 0, "beam.probe_fwhm_fs", "must be >= 0");
  for (const auto& hk : spots) require(hk[0] != 0 || hk[1] != 0, "spots", "must not contain [0, 0]");
  require(!output_dir.empty(), "output_dir", "must not be empty");
}

std::string RunConfig::to_json() const {
  std::ostringstream os;
  const auto num = [](double v) { return format_number(v); };
  os << "{\n";
  os << "  \"lattice\": {\"a_angstrom\": " << num(lattice.a_angstrom) << ", \"t_hop_eV\": " << num(lattice.t_hop_eV)
     << ", \"orbital_width_au\": " << num(lattice.orbital_width_au) << "},\n";
  os << "  \"pump\": {\"E0_V_per_nm\": " << num(pump.E0_V_per_nm) << ", \"photon_eV\": " << num(pump.photon_eV)
     << ", \"tau_fs\": " << num(pump.tau_fs) << ", \"pol\": [" << num(pump.pol[0]) << ", " << num(pump.pol[1])
     << "]},\n";
  os << "  \"grid\": {\"nk\": " << grid.nk << ", \"cell_grid_n\": " << grid.cell_grid_n << ", \"halo\": " << grid.halo
     << "},\n";
  os << "  \"propagation\": {\"dt_au\": " << num(propagation.dt_au) << ", \"T2_fs\": " << num(propagation.T2_fs)
     << ", \"record_stride\": " << propagation.record_stride << ", \"t_end_fs\": " << num(propagation.t_end_fs)
     << ", \"snapshots_fs\": [";
  for (std::size_t i = 0; i < propagation.snapshots_fs.size(); ++i)
    os << (i ? ", " : "") << num(propagation.snapshots_fs[i]);
  os << "]},\n";
  os << "  \"beam\": {\"kinetic_eV\": " << num(beam.kinetic_eV) << ", \"incidence_deg\": " << num(beam.incidence_deg)
     << ", \"probe\": " << json(beam.probe).dump() << ", \"probe_fwhm_fs\": " << num(beam.probe_fwhm_fs) << "},\n";
  os << "  \"spots\": [";
  for (std::size_t i = 0; i < spots.size(); ++i) os << (i ? ", " : "") << "[" << spots[i][0] << ", " << spots[i][1] << "]";
  os << "],\n";
  os << "  \"output_dir\": " << json(output_dir.string()).dump() << "\n";
  os << "}\n";
  return os.str();
}

std::string RunConfig::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : to_json()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("cli_io", std::string("malformed JSON: ") + e.what());
  }
  return from_json(root);
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cli_io", "cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void write_resolved_config(const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) throw ConfigError("cli_io", "cannot create output_dir " + cfg.output_dir.string() + ": " + ec.message());
  std::ofstream out(cfg.output_dir / "resolved_config.json");
  if (!out) throw ConfigError("cli_io", "cannot write into output_dir " + cfg.output_dir.string());
  out << cfg.to_json();
}

}  // namespace trdiff
