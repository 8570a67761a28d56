#include "trdiff/pipeline.hpp"

#include <cmath>
#include <cstdio>

#include "trdiff/csv.hpp"
#include "trdiff/diffraction.hpp"
#include "trdiff/errors.hpp"
#include "trdiff/units.hpp"

namespace trdiff {

namespace {

std::string time_label(double t_fs) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", t_fs);
  return buf;
}

void run_bands(const RunConfig& cfg, std::ostream& log) {
  const graphene::Lattice lat = cfg.make_lattice();
  const double t_hop = cfg.t_hop();
  const Eigen::Vector2d gamma = Eigen::Vector2d::Zero(), k = lat.dirac_point(), m = 0.5 * lat.b1;
  const std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>> legs{{gamma, k}, {k, m}, {m, gamma}};
  constexpr int per_leg = 200;

  CsvWriter csv(cfg.output_dir / "bands.csv", cfg.hash(), {"path", "kx", "ky", "eps_v_eV", "eps_c_eV"});
  double path = 0;
  for (std::size_t leg = 0; leg < legs.size(); ++leg) {
    const auto& [a, b] = legs[leg];
    const int count = leg + 1 == legs.size() ? per_leg + 1 : per_leg;
    for (int i = 0; i < count; ++i) {
      const Eigen::Vector2d p = a + (b - a) * (double(i) / per_leg);
      const auto st = graphene::band_state(lat, t_hop, p);
      csv.row({path + (b - a).norm() * i / per_leg, p.x(), p.y(), units::au_to_ev(st.eps_v),
               units::au_to_ev(st.eps_c)});
    }
    path += (b - a).norm();
  }
  log << "bands: wrote " << (cfg.output_dir / "bands.csv").string() << "\n";
}

sbe::DensityMatrixTrajectory run_dynamics(const RunConfig& cfg, const graphene::Lattice& lat, unsigned threads) {
  return sbe::propagate(lat, cfg.t_hop(), cfg.kgrid(lat), cfg.pulse(), cfg.propagator(threads));
}

void run_propagate(const RunConfig& cfg, unsigned threads, std::ostream& log) {
  const graphene::Lattice lat = cfg.make_lattice();
  const auto traj = run_dynamics(cfg, lat, threads);
  const auto nc = sbe::conduction_population(traj);
  {
    CsvWriter csv(cfg.output_dir / "population.csv", cfg.hash(), {"t_fs", "N_c"});
    for (std::size_t i = 0; i < nc.size(); ++i) csv.row({units::au_to_fs(traj.times[i]), nc[i]});
  }
  log << "propagate: N_c(end) = " << format_double(nc.back()) << "\n";

  std::vector<std::size_t> indices;
  for (double t_fs : cfg.propagation.snapshots_fs) indices.push_back(traj.nearest(units::fs_to_au(t_fs)));
  const auto snaps = sbe::realspace_snapshots(traj, indices, lat, cfg.t_hop(), cfg.orbital(), cfg.cell_grid(lat),
                                              threads);
  for (std::size_t s = 0; s < snaps.size(); ++s) {
    const auto path = cfg.output_dir / ("snapshot_" + time_label(cfg.propagation.snapshots_fs[s]) + ".csv");
    CsvWriter csv(path, cfg.hash(), {"x", "y", "d_rho", "jx", "jy"});
    const auto& snap = snaps[s];
    for (std::size_t i = 0; i < snap.points.size(); ++i) {
      const auto e = static_cast<Eigen::Index>(i);
      csv.row({snap.points[i].x(), snap.points[i].y(), snap.d_rho(e), snap.jx(e), snap.jy(e)});
    }
  }
  log << "propagate: wrote population.csv and " << snaps.size() << " snapshot(s)\n";
}

std::vector<diffraction::DiffractionTrace> run_diffract(const RunConfig& cfg, unsigned threads, std::ostream& log,
                                                        bool write_files) {
  const graphene::Lattice lat = cfg.make_lattice();
  const auto traj = run_dynamics(cfg, lat, threads);
  const auto beam = cfg.beam_config();
  const auto orbital = cfg.orbital();
  const auto grid = cfg.cell_grid(lat);
  const double h = std::sqrt(0.5);
  const bool beam_45 = (beam.k_in_dir - Eigen::Vector3d(h, 0.0, -h)).norm() < 1e-9;

  std::vector<diffraction::DiffractionTrace> traces;
  for (const graphene::Spot& spot : cfg.make_spots(lat)) {
    const graphene::FormFactorEvaluator table(lat, cfg.t_hop(), orbital, grid, spot.s);
    diffraction::DiffractionTrace trace;
    if (std::abs(spot.s.y()) <= 1e-9 * spot.s.norm())
      trace = diffraction::intensity_x_spot(traj, spot, table, beam, threads);
    else if (std::abs(spot.s.x()) <= 1e-9 * spot.s.norm() && beam_45)
      trace = diffraction::intensity_y_spot(traj, spot, table, beam, threads);
    else
      trace = diffraction::general_kernel(traj, spot, table, beam, threads);
    if (cfg.beam.probe_fwhm_fs > 0)
      trace = diffraction::convolve_probe_envelope(trace, units::fs_to_au(cfg.beam.probe_fwhm_fs));

    if (write_files) {
      CsvWriter csv(cfg.output_dir / ("diffraction_" + spot.label() + ".csv"), cfg.hash(),
                    {"t_fs", "I_dd", "I_dj", "I_jj", "I_total"});
      for (std::size_t i = 0; i < trace.times.size(); ++i)
        csv.row({units::au_to_fs(trace.times[i]), trace.dd[i], trace.dj[i], trace.jj[i], trace.total[i]});
      const auto ff = graphene::build_form_factor_table(lat, cfg.t_hop(), cfg.kgrid(lat), {spot}, orbital, grid);
      graphene::write_form_factor_csv(cfg.output_dir / ("formfactor_" + spot.label() + ".csv"), ff,
                                      csv_header(cfg.hash()));
      log << "diffract: spot " << spot.label() << " imaginary residue " << format_double(trace.imag_residue) << "\n";
    }
    traces.push_back(std::move(trace));
  }
  return traces;
}

void run_spectrum(const RunConfig& cfg, unsigned threads, std::ostream& log) {
  const auto traces = run_diffract(cfg, threads, log, false);
  const auto pulse = cfg.pulse();
  for (const auto& trace : traces) {
    CsvWriter csv(cfg.output_dir / ("spectrum_" + trace.spot.label() + ".csv"), cfg.hash(),
                  {"channel", "amp_omega", "amp_2omega", "ratio"});
    const std::vector<std::pair<const char*, const std::vector<double>*>> channels{
        {"dd", &trace.dd}, {"dj", &trace.dj}, {"jj", &trace.jj}, {"total", &trace.total}};
    for (const auto& [name, values] : channels) {
      const auto sc = diffraction::spectral_content(trace.times, *values, pulse.omega, pulse.tau);
      csv.row(name, {sc.amp_omega, sc.amp_2omega, sc.ratio});
    }
    log << "spectrum: wrote spectrum_" << trace.spot.label() << ".csv\n";
  }
}

int run_validate(const RunConfig& cfg, unsigned threads, std::ostream& log) {
  const auto results = run_validation_suite(cfg, threads);
  bool all = true;
  std::ofstream out(cfg.output_dir / "validation.csv");
  out << csv_header(cfg.hash()) << "module,check,result,detail\n";
  for (const auto& r : results) {
    log << (r.pass ? "PASS " : "FAIL ") << r.module << " " << r.name << ": " << r.detail << "\n";
    out << r.module << ',' << r.name << ',' << (r.pass ? "pass" : "fail") << ",\"" << r.detail << "\"\n";
    all = all && r.pass;
  }
  log << "validate: " << (all ? "all checks passed" : "some checks failed") << "\n";
  return all ? exit_ok : exit_validation;
}

}  // namespace

int run_pipeline(const RunConfig& cfg, const std::string& subcommand, unsigned threads, std::ostream& log) {
  try {
    write_resolved_config(cfg);
    if (subcommand == "bands") {
      run_bands(cfg, log);
    } else if (subcommand == "propagate") {
      run_propagate(cfg, threads, log);
    } else if (subcommand == "diffract") {
      run_diffract(cfg, threads, log, true);
    } else if (subcommand == "spectrum") {
      run_spectrum(cfg, threads, log);
    } else if (subcommand == "validate") {
      return run_validate(cfg, threads, log);
    } else {
      log << "error: unknown subcommand '" << subcommand << "'\n";
      return exit_config;
    }
    return exit_ok;
  } catch (const ConfigError& e) {
    log << "error [" << e.module() << "]: " << e.what() << "\n";
    return exit_config;
  } catch (const Error& e) {
    log << "error [" << e.module() << "]: " << e.what() << "\n";
    return exit_numerical;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return exit_numerical;
  }
}

}  // namespace trdiff
