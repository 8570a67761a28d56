#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "trdiff/diffraction.hpp"
#include "trdiff/dirac.hpp"
#include "trdiff/errors.hpp"
#include "trdiff/fock.hpp"
#include "trdiff/pipeline.hpp"
#include "trdiff/units.hpp"
#include "trdiff/xsec.hpp"

namespace trdiff {

namespace {

using Eigen::Vector2d;
using Eigen::Vector3d;

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

// A check returns the measured quantity and the bound it must stay below.
struct Measure {
  double value;
  double bound;
};

class Suite {
public:
  void add(const std::string& module, const std::string& name, const std::function<Measure()>& check) {
    CheckResult r{module, name, false, ""};
    try {
      const Measure m = check();
      r.pass = m.value <= m.bound;
      r.detail = sci(m.value) + " <= " + sci(m.bound);
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    results_.push_back(r);
  }
  std::vector<CheckResult> take() { return std::move(results_); }

private:
  std::vector<CheckResult> results_;
};

dirac::FourVectord random_on_shell(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  return dirac::FourVectord::on_shell(u(rng), u(rng), u(rng));
}

void dirac_checks(Suite& s) {
  using namespace dirac;
  const auto g = gamma_matrices<double>();
  s.add("dirac_algebra", "gamma anticommutation", [&] {
    double worst = 0;
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) {
        const Matrix4c<double> ac = g[mu] * g[nu] + g[nu] * g[mu];
        const Matrix4c<double> expect = 2.0 * metric(mu, nu) * Matrix4c<double>::Identity();
        worst = std::max(worst, (ac - expect).cwiseAbs().maxCoeff());
      }
    return Measure{worst, 1e-14};
  });
  s.add("dirac_algebra", "spinor normalization and completeness", [&] {
    std::mt19937_64 rng(11);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
      const FourVectord k = random_on_shell(rng);
      Matrix4c<double> sum = Matrix4c<double>::Zero();
      for (Spin a : both_spins) {
        const auto ua = dirac_spinor(k, a);
        sum += ua.c * ua.adjoint();
        for (Spin b : both_spins) {
          const auto ub = dirac_spinor(k, b);
          const double expect = a == b ? 2.0 * electron_mass : 0.0;
          worst = std::max(worst, std::abs((ua.adjoint() * ub.c)(0, 0) - expect));
        }
      }
      const Matrix4c<double> expect = slash(k, g) + electron_mass * Matrix4c<double>::Identity();
      worst = std::max(worst, (sum - expect).cwiseAbs().maxCoeff());
    }
    return Measure{worst, 1e-12};
  });
  s.add("dirac_algebra", "bilinear equals 2k delta", [&] {
    std::mt19937_64 rng(12);
    double worst = 0;
    for (int i = 0; i < 20; ++i) {
      const FourVectord k = random_on_shell(rng);
      for (int nu = 0; nu < 4; ++nu)
        for (Spin a : both_spins)
          for (Spin b : both_spins)
            worst = std::max(worst, std::abs(spinor_bilinear(k, a, nu, k, b, g) - (a == b ? 2.0 * k[nu] : 0.0)));
    }
    return Measure{worst, 1e-12};
  });
  s.add("dirac_algebra", "contraction sum exact at zero transfer", [&] {
    const FourVectord k = FourVectord::on_shell(0.3, -0.7, 1.1);
    double worst = 0;
    for (Spin a : both_spins)
      for (Spin b : both_spins)
        for (int nu = 0; nu < 4; ++nu)
          for (int al = 0; al < 4; ++al)
            worst = std::max(worst, std::abs(contraction_sum(k, a, b, k, nu, al, g) -
                                             small_transfer_contraction(k, a, b, nu, al)));
    return Measure{worst, 1e-12};
  });
  s.add("dirac_algebra", "contraction deviation slope in |Q|/|k|", [&] {
    const double kmag = 1.0;
    const FourVectord k_in = FourVectord::on_shell(0.0, 0.0, kmag);
    std::vector<double> xs, ys;
    for (double r : {1e-4, 1e-3, 1e-2, 1e-1}) {
      const double th = 2.0 * std::asin(0.5 * r);
      const FourVectord k_s = FourVectord::on_shell(kmag * std::sin(th), 0.0, kmag * std::cos(th));
      double dev = 0, scale = 0;
      for (int nu = 0; nu < 4; ++nu)
        for (int al = 0; al < 4; ++al) {
          const double approx = small_transfer_contraction(k_in, Spin::up, Spin::up, nu, al);
          dev = std::max(dev, std::abs(contraction_sum(k_in, Spin::up, Spin::up, k_s, nu, al, g) - approx));
          scale = std::max(scale, std::abs(approx));
        }
      xs.push_back(std::log(r));
      ys.push_back(std::log(dev / scale));
    }
    const double slope = (ys.back() - ys.front()) / (xs.back() - xs.front());
    return Measure{std::abs(slope - 1.0), 0.1};
  });
  s.add("dirac_algebra", "dtilde spatial eigenvalues {0,-1,-1}", [&] {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> n(0.0, 1.0);
    double worst = 0;
    for (int i = 0; i < 50; ++i) {
      const auto d = dtilde(Vector3d(n(rng), n(rng), n(rng)));
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(d.spatial_block());
      const Vector3d ev = es.eigenvalues();
      worst = std::max({worst, std::abs(ev(0) + 1), std::abs(ev(1) + 1), std::abs(ev(2))});
    }
    return Measure{worst, 1e-12};
  });
}

void fock_checks(Suite& s) {
  using namespace fock;
  s.add("fock_algebra", "boson commutator off boundary", [] {
    const ModeBasis b(2, 6, Statistics::boson);
    return Measure{std::max(commutator_check(b, 0, 0).interior, commutator_check(b, 0, 1).interior), 1e-14};
  });
  s.add("fock_algebra", "fermion anticommutators", [] {
    const ModeBasis b(3, 1, Statistics::fermion);
    double worst = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const auto r = anticommutator_check(b, i, j);
        worst = std::max({worst, r.creation_pair, r.annihilation_pair});
      }
    return Measure{worst, 1e-14};
  });
  s.add("fock_algebra", "x-ray transition element 2 sqrt(n)", [] {
    double worst = 0;
    for (int n = 1; n <= 5; ++n) worst = std::max(worst, std::abs(xray_transition_element(n, 5) - 2.0 * std::sqrt(n)));
    return Measure{worst, 1e-12};
  });
  s.add("fock_algebra", "ladder sparsity", [] {
    long worst = 0;
    for (auto stat : {Statistics::boson, Statistics::fermion}) {
      const ModeBasis b(3, stat == Statistics::boson ? 4 : 1, stat);
      for (int m = 0; m < 3; ++m)
        for (auto kind : {LadderKind::create, LadderKind::annihilate})
          worst = std::max(worst, max_nonzeros_per_column(build_ladder(b, m, kind).matrix));
    }
    return Measure{double(worst), 1.0};
  });
}

void xsec_checks(Suite& s) {
  using namespace xsec;
  s.add("stationary_xsec", "Rutherford closed form vs 4/|dk|^4", [] {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> e(0.1, 1e4), th(1e-3, std::numbers::pi);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
      const double energy = e(rng), theta = th(rng);
      const double dk = 2.0 * std::sqrt(2.0 * energy) * std::sin(0.5 * theta);
      const double ref = rutherford_from_transfer(dk);
      worst = std::max(worst, std::abs(rutherford_prefactor(energy, theta) - ref) / ref);
    }
    return Measure{worst, 1e-12};
  });
  s.add("stationary_xsec", "Thomson zero along polarization", [] {
    const auto geom = ProbeGeometry::make(Vector3d::UnitZ(), Vector3d::UnitX(), 1.0, Vector3d::UnitX());
    return Measure{thomson_prefactor(geom) / std::pow(units::alpha, 4), 1e-14};
  });
  s.add("stationary_xsec", "Gaussian form factor", [] {
    const int n = 48;
    const double half = 8.0;
    auto rho = DensityGrid::zeros(n, n, n, 2.0 * half * Eigen::Matrix3d::Identity(), Vector3d::Constant(-half));
    const double norm = std::pow(2.0 * std::numbers::pi, -1.5);
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) rho.at(i, j, k) = norm * std::exp(-0.5 * rho.point(i, j, k).squaredNorm());
    double worst = 0;
    for (double q : {0.5, 1.5, 3.0}) {
      const Vector3d sv = q * Vector3d(1.0, 2.0, 2.0) / 3.0;
      const double expect = std::exp(-0.5 * q * q);
      worst = std::max(worst, std::abs(std::abs(form_factor(rho, sv)) - expect) / expect);
    }
    return Measure{worst, 1e-4};
  });
}

void graphene_checks(Suite& s, const RunConfig& cfg) {
  using namespace graphene;
  const Lattice lat = cfg.make_lattice();
  const double t = cfg.t_hop();
  s.add("graphene_model", "reciprocity b_i . a_j = 2 pi delta", [&] {
    const double w = std::max({std::abs(lat.b1.dot(lat.a1) - 2 * std::numbers::pi), std::abs(lat.b1.dot(lat.a2)),
                               std::abs(lat.b2.dot(lat.a1)), std::abs(lat.b2.dot(lat.a2) - 2 * std::numbers::pi)});
    return Measure{w, 1e-12};
  });
  s.add("graphene_model", "Gamma eigenvalues +-3t", [&] {
    const auto st = eigensystem(hamiltonian_k(lat, t, Vector2d::Zero()));
    return Measure{std::max(std::abs(st.eps_v + 3 * t), std::abs(st.eps_c - 3 * t)) / t, 1e-12};
  });
  s.add("graphene_model", "Dirac point gap", [&] {
    return Measure{std::abs(structure_factor(lat, lat.dirac_point())), 1e-12};
  });
  s.add("graphene_model", "C6 symmetry and particle-hole symmetry", [&] {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    const double c = 0.5, sn = std::sqrt(3.0) / 2;
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
      const Vector2d p(u(rng), u(rng));
      const Vector2d r(c * p.x() - sn * p.y(), sn * p.x() + c * p.y());
      const auto a = band_state(lat, t, p), b = band_state(lat, t, r);
      worst = std::max({worst, std::abs(a.eps_c - b.eps_c) / t, std::abs(a.eps_v + a.eps_c) / t});
    }
    return Measure{worst, 1e-10};
  });
  s.add("graphene_model", "Bragg spots [1,1] along x and [1,-1] along y", [&] {
    const Vector2d s11 = bragg_vector(lat, 1, 1), s1m = bragg_vector(lat, 1, -1);
    return Measure{std::max(std::abs(s11.y()) / s11.norm(), std::abs(s1m.x()) / s1m.norm()), 1e-12};
  });
  s.add("graphene_model", "form-factor Hermiticity and direct-grid agreement", [&] {
    const auto orbital = cfg.orbital();
    const auto grid = cfg.cell_grid(lat);
    const Vector2d sv = bragg_vector(lat, 1, -1);
    const FormFactorEvaluator plus(lat, t, orbital, grid, sv), minus(lat, t, orbital, grid, -sv);
    const BlochSampler sampler(lat, orbital, grid);
    double worst = 0;
    for (const Vector2d& p : {Vector2d(0.3, 0.1), Vector2d(-0.4, 0.7)}) {
      const auto a = plus.at(p), b = minus.at(p);
      worst = std::max(worst, (a.q - b.q.adjoint()).cwiseAbs().maxCoeff());
      const auto f = cell_matrix_elements(sampler, band_state(lat, t, p));
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          worst = std::max(worst, std::abs(fourier_at_bragg(grid, f.density(i, j), sv) - a.q(i, j)));
          worst = std::max(worst, std::abs(fourier_at_bragg(grid, f.current_x(i, j), sv) - a.jx(i, j)));
        }
    }
    return Measure{worst, 1e-8};
  });
}

void dynamics_checks(Suite& s, const RunConfig& cfg, unsigned threads) {
  const graphene::Lattice lat = cfg.make_lattice();
  const double t = cfg.t_hop();
  const sbe::LaserPulse pulse = cfg.pulse();
  s.add("sbe_dynamics", "vector potential after the pulse", [&] {
    const sbe::VectorPotential a(pulse, 0.05);
    double peak = 0;
    for (int i = 0; i <= 2000; ++i) peak = std::max(peak, std::abs(a.scalar(pulse.tau * i / 2000.0)));
    return Measure{std::abs(a.scalar(1.5 * pulse.tau)) / peak, 1e-3};
  });
  s.add("sbe_dynamics", "peak |A| near E0/omega", [&] {
    const sbe::VectorPotential a(pulse, 0.05);
    double peak = 0;
    for (int i = 0; i <= 2000; ++i) peak = std::max(peak, std::abs(a.scalar(pulse.tau * i / 2000.0)));
    return Measure{std::abs(peak / (pulse.E0 / pulse.omega) - 1.0), 0.25};
  });

  const auto kgrid = graphene::make_kgrid(lat, 12);
  auto pcfg = cfg.propagator(threads);
  pcfg.T2 = std::numeric_limits<double>::infinity();
  pcfg.t_end = pulse.tau;
  std::optional<sbe::DensityMatrixTrajectory> traj;
  s.add("sbe_dynamics", "trace and Hermiticity", [&] {
    traj = sbe::propagate(lat, t, kgrid, pulse, pcfg);
    double worst = 0;
    for (const auto& r : traj->rho)
      worst = std::max({worst, std::abs(r.trace() - 1.0), (r - r.adjoint()).cwiseAbs().maxCoeff()});
    return Measure{worst, 1e-10};
  });
  s.add("sbe_dynamics", "unitary eigenvalues at T2 = inf", [&] {
    if (!traj) throw NumericalError("sbe_dynamics", "propagation failed");
    double worst = 0;
    for (const auto& r : traj->rho) {
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(r);
      worst = std::max({worst, std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(1) - 1.0)});
    }
    return Measure{worst, 1e-8};
  });
  s.add("sbe_dynamics", "no field leaves rho unchanged", [&] {
    sbe::LaserPulse off = pulse;
    off.E0 = 0;
    const auto still = sbe::propagate(lat, t, kgrid, off, pcfg);
    double worst = 0;
    for (const auto& r : still.rho)
      worst = std::max({worst, std::abs(r(0, 0) - 1.0), std::abs(r(0, 1)), std::abs(r(1, 1))});
    return Measure{worst, 1e-14};
  });

  s.add("diffraction_signal", "beta at 1 MeV", [] {
    return Measure{std::abs(diffraction::beam_kinematics(1e6).beta - 0.9411), 1e-4};
  });
  s.add("diffraction_signal", "x-spot current weights vanish", [&] {
    const auto beam = diffraction::BeamConfig::make(1e6, 45.0, diffraction::ProbeKind::electron_rel);
    const auto w = diffraction::coupling_weights(graphene::bragg_vector(lat, 1, 1), beam);
    return Measure{std::max(std::abs(w(1)), std::abs(w(2))), 1e-15};
  });
  s.add("diffraction_signal", "y-spot weight -sqrt2/2 beta alpha", [&] {
    const auto beam = diffraction::BeamConfig::make(1e6, 45.0, diffraction::ProbeKind::electron_rel);
    const auto w = diffraction::coupling_weights(graphene::bragg_vector(lat, 1, -1), beam);
    const double expect = -std::sqrt(0.5) * beam.kinematics().beta * units::alpha;
    return Measure{std::abs(w(1) - expect) / std::abs(expect), 1e-12};
  });
  s.add("diffraction_signal", "channel closure and realness", [&] {
    if (!traj) throw NumericalError("sbe_dynamics", "propagation failed");
    const auto beam = cfg.beam_config();
    const auto spot = graphene::make_spot(lat, 1, -1);
    const graphene::FormFactorEvaluator table(lat, t, cfg.orbital(), cfg.cell_grid(lat), spot.s);
    const auto tr = diffraction::general_kernel(*traj, spot, table, beam, threads);
    double worst = 0, scale = 0;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      worst = std::max(worst, std::abs(tr.total[i] - tr.dd[i] - tr.dj[i] - tr.jj[i]));
      scale = std::max(scale, std::abs(tr.total[i]));
    }
    return Measure{std::max(worst, tr.imag_residue) / scale, 1e-10};
  });
}

void io_checks(Suite& s) {
  s.add("cli_io", "unit round trip", [] {
    const double x = 1.2345678;
    const double w = std::max({std::abs(units::au_to_ev(units::ev_to_au(x)) / x - 1),
                               std::abs(units::au_to_fs(units::fs_to_au(x)) / x - 1),
                               std::abs(units::field_to_v_per_nm(units::field_to_au(x)) / x - 1),
                               std::abs(units::au_to_angstrom(units::angstrom_to_au(x)) / x - 1)});
    return Measure{w, 1e-12};
  });
}

}  // namespace

std::vector<CheckResult> run_validation_suite(const RunConfig& cfg, unsigned threads) {
  Suite s;
  dirac_checks(s);
  fock_checks(s);
  xsec_checks(s);
  graphene_checks(s, cfg);
  dynamics_checks(s, cfg, threads);
  io_checks(s);
  return s.take();
}

}  // namespace trdiff
