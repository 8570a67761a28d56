#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "trdiff/diffraction.hpp"
#include "trdiff/errors.hpp"
#include "trdiff/units.hpp"

using namespace trdiff;
using namespace trdiff::diffraction;

namespace {

const graphene::Lattice lat = graphene::Lattice::make(units::angstrom_to_au(2.46));
const double t_hop = units::ev_to_au(2.7);

sbe::LaserPulse reference_pulse() {
  sbe::LaserPulse p;
  p.E0 = units::field_to_au(2.5);
  p.omega = units::ev_to_au(1.55);
  p.tau = units::fs_to_au(21.0);
  return p;
}

sbe::PropagatorConfig fast_config() {
  sbe::PropagatorConfig c;
  c.dt = 0.1;
  c.T2 = units::fs_to_au(10.0);
  c.record_stride = 40;
  return c;
}

const sbe::DensityMatrixTrajectory& shared_trajectory() {
  static const auto traj = sbe::propagate(lat, t_hop, graphene::make_kgrid(lat, 12), reference_pulse(), fast_config());
  return traj;
}

double kinetic_for_beta(double beta) {
  return units::electron_rest_energy_eV * (1.0 / std::sqrt(1.0 - beta * beta) - 1.0);
}

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  const double scale = std::max(max_abs(a), max_abs(b));
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return scale > 0 ? m / scale : m;
}

}  // namespace

TEST_CASE("beam kinematics") {
  const auto rest = beam_kinematics(0.0);
  CHECK(rest.gamma == 1.0);
  CHECK(rest.beta == 0.0);
  const auto one = beam_kinematics(units::electron_rest_energy_eV);
  CHECK(std::abs(one.gamma - 2.0) <= 1e-15);
  CHECK(std::abs(one.beta - std::sqrt(3.0) / 2) <= 1e-15);
  const auto mev = beam_kinematics(1e6);
  const double mc2 = units::electron_rest_energy_eV;
  CHECK(std::abs(mev.beta - std::sqrt(1.0 - std::pow(mc2 / (1e6 + mc2), 2))) <= 1e-15);
  CHECK(std::abs(mev.beta - 0.9411) <= 1e-4);
  CHECK(std::abs(mev.k - mev.gamma * mev.beta * units::speed_of_light) <= 1e-12 * mev.k);
  CHECK(std::abs(mev.energy * mev.energy - (mev.k * mev.k * units::speed_of_light * units::speed_of_light +
                                             std::pow(units::speed_of_light, 4))) <=
        1e-12 * mev.energy * mev.energy);
  CHECK_THROWS_AS(beam_kinematics(-1.0), DomainError);
}

TEST_CASE("probe parsing and beam construction") {
  CHECK(parse_probe("xray") == ProbeKind::xray);
  CHECK(to_string(parse_probe("electron_nonrel")) == "electron_nonrel");
  CHECK_THROWS_AS(parse_probe("neutron"), DomainError);
  CHECK_THROWS_AS(BeamConfig::make(1e6, 0.0, ProbeKind::electron_rel), DomainError);
  const auto b = BeamConfig::make(1e6, 45.0, ProbeKind::electron_rel);
  CHECK(std::abs(b.k_in_dir.x() - std::sqrt(0.5)) <= 1e-15);
  CHECK(std::abs(b.k_in_dir.z() + std::sqrt(0.5)) <= 1e-15);
}

TEST_CASE("coupling weights") {
  const auto beam = BeamConfig::make(1e6, 45.0, ProbeKind::electron_rel);
  const double beta = beam.kinematics().beta;
  const auto wx = coupling_weights(graphene::bragg_vector(lat, 1, 1), beam);
  CHECK(wx(0) == 1.0);
  CHECK(std::abs(wx(1)) <= 1e-15);
  CHECK(std::abs(wx(2)) <= 1e-15);
  const auto wy = coupling_weights(graphene::bragg_vector(lat, 1, -1), beam);
  CHECK(std::abs(wy(1) + std::sqrt(0.5) * beta * units::alpha) <= 1e-12 * beta * units::alpha);
  CHECK(std::abs(wy(2)) <= 1e-15);
  for (auto kind : {ProbeKind::xray, ProbeKind::electron_nonrel}) {
    const auto w = coupling_weights(graphene::bragg_vector(lat, 1, -1), BeamConfig::make(1e6, 45.0, kind));
    CHECK(w(0) == 1.0);
    CHECK(w.tail<3>().norm() == 0.0);
  }
}

TEST_CASE("channel intensities") {
  Eigen::Matrix2cd rho;
  rho << 0.7, std::complex<double>(0.1, 0.2), std::complex<double>(0.1, -0.2), 0.3;
  Eigen::Matrix2cd x, w;
  x << std::complex<double>(0.5, 0.1), 0.2, std::complex<double>(0.0, 0.3), -0.4;
  w << 0.01, std::complex<double>(0.02, -0.01), 0.005, std::complex<double>(0.0, 0.03);
  const auto c = channel_intensities(rho, x, w);
  const Eigen::Matrix2cd a = x + w;
  const double total = (rho * a.adjoint() * a).trace().real();
  CHECK(std::abs(c.dd + c.dj + c.jj - total) <= 1e-15);
  CHECK(c.imag <= 1e-15);
  const auto none = channel_intensities(rho, x, Eigen::Matrix2cd::Zero());
  CHECK(none.dj == 0.0);
  CHECK(none.jj == 0.0);
}

TEST_CASE("[1,1] selection rule with both evaluators") {
  const auto& traj = shared_trajectory();
  const auto beam = BeamConfig::make(1e6, 45.0, ProbeKind::electron_rel);
  const auto spot = graphene::make_spot(lat, 1, 1);
  const graphene::FormFactorEvaluator table(lat, t_hop, graphene::gaussian_orbital(0.5),
                                            graphene::make_cell_grid(lat, 48, 1), spot.s);
  const auto special = intensity_x_spot(traj, spot, table, beam);
  const auto general = general_kernel(traj, spot, table, beam);
  const double scale = max_abs(special.dd);
  CHECK(scale > 0);
  CHECK(max_abs(general.dj) <= 1e-12 * scale);
  CHECK(max_abs(general.jj) <= 1e-12 * scale);
  CHECK(max_abs(special.dj) <= 1e-12 * scale);
  CHECK(max_rel_diff(special.total, general.total) <= 1e-10);
  CHECK(general.imag_residue <= 1e-12 * scale);
}

TEST_CASE("[1,-1] specialized evaluator matches the general kernel") {
  const auto& traj = shared_trajectory();
  const auto beam = BeamConfig::make(1e6, 45.0, ProbeKind::electron_rel);
  const auto spot = graphene::make_spot(lat, 1, -1);
  const graphene::FormFactorEvaluator table(lat, t_hop, graphene::gaussian_orbital(0.5),
                                            graphene::make_cell_grid(lat, 48, 1), spot.s);
  const auto special = intensity_y_spot(traj, spot, table, beam);
  const auto general = general_kernel(traj, spot, table, beam);
  CHECK(max_rel_diff(special.dd, general.dd) <= 1e-10);
  CHECK(max_rel_diff(special.dj, general.dj) <= 1e-10);
  CHECK(max_rel_diff(special.jj, general.jj) <= 1e-10);
  CHECK(max_abs(general.dj) > 0.0);
  for (std::size_t i = 0; i < general.times.size(); ++i)
    CHECK(std::abs(general.total[i] - general.dd[i] - general.dj[i] - general.jj[i]) <=
          1e-14 * std::abs(general.total[i]));

  CHECK_THROWS_AS(intensity_x_spot(traj, spot, table, beam), DomainError);
  const auto other = graphene::make_spot(lat, 1, 1);
  CHECK_THROWS_AS(general_kernel(traj, other, table, beam), DomainError);
  CHECK_THROWS_AS(intensity_y_spot(traj, spot, table, BeamConfig::make(1e6, 30.0, ProbeKind::electron_rel)),
                  DomainError);
}

TEST_CASE("beta scaling of the current channels") {
  const auto& traj = shared_trajectory();
  const auto spot = graphene::make_spot(lat, 1, -1);
  const graphene::FormFactorEvaluator table(lat, t_hop, graphene::gaussian_orbital(0.5),
                                            graphene::make_cell_grid(lat, 48, 1), spot.s);
  const auto at = [&](double beta) {
    return general_kernel(traj, spot, table, BeamConfig::make(kinetic_for_beta(beta), 45.0, ProbeKind::electron_rel));
  };
  const auto zero = at(0.0);
  CHECK(max_abs(zero.dj) == 0.0);
  CHECK(max_abs(zero.jj) == 0.0);
  const auto a = at(0.3), b = at(0.6);
  const std::size_t i = a.times.size() / 2;
  CHECK(std::abs(b.dj[i] / a.dj[i] - 2.0) <= 1e-9);
  CHECK(std::abs(b.jj[i] / a.jj[i] - 4.0) <= 1e-9);
  CHECK(max_rel_diff(a.dd, b.dd) == 0.0);
}

TEST_CASE("x-ray and non-relativistic probes see only the density channel") {
  const auto& traj = shared_trajectory();
  const auto spot = graphene::make_spot(lat, 1, -1);
  const graphene::FormFactorEvaluator table(lat, t_hop, graphene::gaussian_orbital(0.5),
                                            graphene::make_cell_grid(lat, 48, 1), spot.s);
  const auto rel = general_kernel(traj, spot, table, BeamConfig::make(1e6, 45.0, ProbeKind::electron_rel));
  for (auto kind : {ProbeKind::xray, ProbeKind::electron_nonrel}) {
    const auto tr = general_kernel(traj, spot, table, BeamConfig::make(1e6, 45.0, kind));
    CHECK(max_abs(tr.dj) == 0.0);
    CHECK(max_abs(tr.jj) == 0.0);
    CHECK(max_rel_diff(tr.dd, rel.dd) == 0.0);
  }
}

TEST_CASE("crystal translation leaves intensities unchanged") {
  const auto& traj = shared_trajectory();
  graphene::Lattice moved = lat;
  const Eigen::Vector2d d(0.41, -0.17);
  moved.r_a += d;
  moved.r_b += d;
  const auto beam = BeamConfig::make(1e6, 45.0, ProbeKind::electron_rel);
  const auto spot = graphene::make_spot(lat, 1, -1);
  const auto orbital = graphene::gaussian_orbital(0.5);
  const graphene::FormFactorEvaluator base(lat, t_hop, orbital, graphene::make_cell_grid(lat, 48, 1), spot.s);
  const graphene::FormFactorEvaluator shifted(moved, t_hop, orbital, graphene::make_cell_grid(moved, 48, 1), spot.s);
  const auto a = general_kernel(traj, spot, base, beam), b = general_kernel(traj, spot, shifted, beam);
  CHECK(max_rel_diff(a.dd, b.dd) <= 1e-10);
  CHECK(max_rel_diff(a.dj, b.dj) <= 1e-8);
}

TEST_CASE("static target gives time-independent intensities") {
  auto pulse = reference_pulse();
  pulse.E0 = 0;
  const auto traj = sbe::propagate(lat, t_hop, graphene::make_kgrid(lat, 8), pulse, fast_config());
  const auto spot = graphene::make_spot(lat, 1, -1);
  const graphene::FormFactorEvaluator table(lat, t_hop, graphene::gaussian_orbital(0.5),
                                            graphene::make_cell_grid(lat, 48, 1), spot.s);
  const auto tr = general_kernel(traj, spot, table, BeamConfig::make(1e6, 45.0, ProbeKind::electron_rel));
  for (std::size_t i = 1; i < tr.times.size(); ++i) {
    CHECK(tr.dd[i] == tr.dd[0]);
    CHECK(tr.dj[i] == tr.dj[0]);
  }
}

TEST_CASE("thread count does not change the trace") {
  const auto& traj = shared_trajectory();
  const auto spot = graphene::make_spot(lat, 1, -1);
  const graphene::FormFactorEvaluator table(lat, t_hop, graphene::gaussian_orbital(0.5),
                                            graphene::make_cell_grid(lat, 48, 1), spot.s);
  const auto beam = BeamConfig::make(1e6, 45.0, ProbeKind::electron_rel);
  const auto one = general_kernel(traj, spot, table, beam, 1), four = general_kernel(traj, spot, table, beam, 4);
  CHECK(one.total == four.total);
}

TEST_CASE("spectral content of synthetic traces") {
  const double omega = 0.057, tau = 868.0, dt = 4.0;
  std::vector<double> t, second, first, mixed, flat;
  for (double s = 0; s <= tau; s += dt) {
    t.push_back(s);
    second.push_back(3.0 + std::cos(2 * omega * s));
    first.push_back(0.5 * std::cos(omega * s + 0.3));
    mixed.push_back(2.0 * std::cos(omega * s) + 0.5 * std::sin(2 * omega * s));
    flat.push_back(1.0);
  }
  const auto a = spectral_content(t, second, omega, tau);
  CHECK(a.ratio < 0.05);
  CHECK(std::abs(a.amp_2omega - 1.0) <= 0.05);
  const auto b = spectral_content(t, first, omega, tau);
  CHECK(std::abs(b.amp_omega - 0.5) <= 0.025);
  CHECK(b.ratio > 20.0);
  const auto c = spectral_content(t, mixed, omega, tau);
  CHECK(std::abs(c.ratio - 4.0) <= 0.4);
  CHECK(std::isnan(spectral_content(t, flat, omega, tau).ratio));

  std::vector<double> short_t(t.begin(), t.begin() + 20), short_v(second.begin(), second.begin() + 20);
  CHECK_THROWS_AS(spectral_content(short_t, short_v, omega, tau), DomainError);
  std::vector<double> coarse_t, coarse_v;
  for (std::size_t i = 0; i < t.size(); i += 10) {
    coarse_t.push_back(t[i]);
    coarse_v.push_back(second[i]);
  }
  CHECK_THROWS_AS(spectral_content(coarse_t, coarse_v, omega, tau), DomainError);
  CHECK_THROWS_AS(spectral_content(t, flat, -1.0, tau), DomainError);
}

TEST_CASE("probe-envelope convolution") {
  std::vector<double> t, fast, constant, ramp;
  for (int i = 0; i < 400; ++i) {
    t.push_back(0.5 * i);
    fast.push_back(std::cos(2.0 * std::numbers::pi * i / 8.0));
    constant.push_back(2.5);
    ramp.push_back(0.01 * i * i - 3.0 * i);
  }
  CHECK(convolve_probe_envelope(t, ramp, 0.0) == ramp);
  const auto c = convolve_probe_envelope(t, constant, 10.0);
  for (double v : c) CHECK(std::abs(v - 2.5) <= 1e-14);
  // Period 4 in time units, FWHM 6: Gaussian transfer exp(-sigma^2 Omega^2 / 2) ~ 1e-8.
  const auto f = convolve_probe_envelope(t, fast, 6.0);
  double peak_in = 0, peak_out = 0;
  for (std::size_t i = 50; i < 350; ++i) {
    peak_in = std::max(peak_in, std::abs(fast[i]));
    peak_out = std::max(peak_out, std::abs(f[i]));
  }
  CHECK(peak_out < peak_in / 10.0);
  const auto r = convolve_probe_envelope(t, ramp, 7.0);
  double sum_in = 0, sum_out = 0;
  for (std::size_t i = 0; i < ramp.size(); ++i) {
    sum_in += ramp[i];
    sum_out += r[i];
  }
  CHECK(std::abs(sum_out - sum_in) <= 1e-10 * std::abs(sum_in));
  std::vector<double> uneven = t;
  uneven[5] += 0.1;
  CHECK_THROWS_AS(convolve_probe_envelope(uneven, ramp, 2.0), DomainError);
  CHECK_THROWS_AS(convolve_probe_envelope(t, ramp, -1.0), DomainError);

  DiffractionTrace tr;
  tr.times = t;
  tr.dd = fast;
  tr.dj = ramp;
  tr.jj = constant;
  tr.total.resize(t.size());
  const auto ct = convolve_probe_envelope(tr, 3.0);
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(std::abs(ct.total[i] - ct.dd[i] - ct.dj[i] - ct.jj[i]) <= 1e-12);
}
