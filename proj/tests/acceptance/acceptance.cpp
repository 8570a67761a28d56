// Acceptance criteria runner. `acceptance N` runs criterion N; no argument runs all.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "trdiff/config.hpp"
#include "trdiff/diffraction.hpp"
#include "trdiff/dirac.hpp"
#include "trdiff/fock.hpp"
#include "trdiff/graphene.hpp"
#include "trdiff/sbe.hpp"
#include "trdiff/units.hpp"
#include "trdiff/xsec.hpp"

using namespace trdiff;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double ptp(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

struct Reference {
  RunConfig cfg;
  graphene::Lattice lat = cfg.make_lattice();
  double t = cfg.t_hop();
};

sbe::DensityMatrixTrajectory reference_trajectory(const Reference& p, unsigned threads = 1) {
  return sbe::propagate(p.lat, p.t, p.cfg.kgrid(p.lat), p.cfg.pulse(), p.cfg.propagator(threads));
}

Outcome algebra() {
  using namespace dirac;
  const auto g = gamma_matrices<double>();
  double anti = 0;
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu)
      anti = std::max(anti, (g[mu] * g[nu] + g[nu] * g[mu] - 2.0 * metric(mu, nu) * Matrix4c<double>::Identity())
                                .cwiseAbs()
                                .maxCoeff());
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3, 3);
  double norm = 0, complete = 0, bilinear = 0, zero_q = 0;
  for (int i = 0; i < 100; ++i) {
    const auto k = FourVectord::on_shell(u(rng), u(rng), u(rng));
    Matrix4c<double> sum = Matrix4c<double>::Zero();
    for (Spin s : both_spins) {
      const auto sp = dirac_spinor(k, s);
      sum += sp.c * sp.adjoint();
      norm = std::max(norm, std::abs((sp.adjoint() * sp.c)(0, 0) - 2.0));
      for (int nu = 0; nu < 4; ++nu)
        bilinear = std::max(bilinear, std::abs(spinor_bilinear(k, s, nu, k, s) - 2.0 * k[nu]));
    }
    complete = std::max(complete, (sum - slash(k, g) - Matrix4c<double>::Identity()).cwiseAbs().maxCoeff());
    for (int nu = 0; nu < 4; ++nu)
      for (int al = 0; al < 4; ++al)
        zero_q = std::max(zero_q, std::abs(contraction_sum(k, Spin::up, Spin::up, k, nu, al) -
                                           small_transfer_contraction(k, Spin::up, Spin::up, nu, al)));
  }
  const auto deviation = [](double q) {
    const double kmag = 2.0, th = 2.0 * std::asin(0.5 * q);
    const auto kin = FourVectord::on_shell(0, 0, kmag);
    const auto ks = FourVectord::on_shell(kmag * std::sin(th), 0, kmag * std::cos(th));
    double dev = 0, scale = 0;
    for (int nu = 0; nu < 4; ++nu)
      for (int al = 0; al < 4; ++al) {
        const double a = small_transfer_contraction(kin, Spin::up, Spin::up, nu, al);
        dev = std::max(dev, std::abs(contraction_sum(kin, Spin::up, Spin::up, ks, nu, al) - a));
        scale = std::max(scale, std::abs(a));
      }
    return dev / scale;
  };
  const double slope = std::log(deviation(1e-1) / deviation(1e-4)) / std::log(1e3);
  const bool ok = anti <= 1e-14 && norm <= 1e-12 && complete <= 1e-12 && bilinear <= 1e-12 && zero_q <= 1e-12 &&
                  std::abs(slope - 1) <= 0.1;
  return {ok, fmt("anticomm %.1e, norm %.1e, completeness %.1e, bilinear %.1e", anti, norm, complete, bilinear) +
                  fmt(", Q=0 %.1e, slope %.4f", zero_q, slope)};
}

Outcome fock_suite() {
  using namespace fock;
  const ModeBasis bos(3, 4, Statistics::boson);
  double comm = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) comm = std::max(comm, commutator_check(bos, i, j).interior);
  const ModeBasis fer(4, 1, Statistics::fermion);
  double anti = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const auto r = anticommutator_check(fer, i, j);
      anti = std::max({anti, r.creation_pair, r.annihilation_pair});
    }
  const ModeBasis two(2, 1, Statistics::fermion);
  const Eigen::MatrixXcd b2 = Eigen::MatrixXcd(build_ladder(two, 1, LadderKind::annihilate).matrix);
  const double sign = b2(two.index({1, 0}), two.index({1, 1})).real();
  double xray = 0;
  for (int n = 1; n <= 5; ++n) xray = std::max(xray, std::abs(xray_transition_element(n, 6) - 2.0 * std::sqrt(n)));
  const bool ok = comm <= 1e-14 && anti <= 1e-14 && sign == -1.0 && xray <= 1e-12;
  return {ok, fmt("[a,a^dag] %.1e, {b,b^dag} %.1e, JW sign %+.0f, 2 sqrt n %.1e", comm, anti, sign, xray)};
}

Outcome stationary() {
  using namespace xsec;
  using Eigen::Vector3d;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> le(-3, 4), th(1e-2, std::numbers::pi);
  double ruth = 0;
  for (int i = 0; i < 1000; ++i) {
    const double e = std::pow(10.0, le(rng)), t = th(rng);
    const auto g = ProbeGeometry::make(Vector3d::UnitZ(), Vector3d(std::sin(t), 0, std::cos(t)), std::sqrt(2 * e));
    ruth = std::max(ruth, std::abs(rutherford_prefactor(e, t) / rutherford_from_transfer(g.transfer().norm()) - 1));
  }
  const double a4 = std::pow(units::alpha, 4);
  const double zero = thomson_prefactor(ProbeGeometry::make(Vector3d::UnitZ(), Vector3d::UnitX(), 1, Vector3d::UnitX()));
  const double maxy = thomson_prefactor(ProbeGeometry::make(Vector3d::UnitZ(), Vector3d::UnitY(), 1, Vector3d::UnitX()));
  const double fwd = thomson_prefactor(ProbeGeometry::make(Vector3d::UnitZ(), Vector3d::UnitZ(), 1, Vector3d::UnitX()));
  const double thomson = std::max({zero / a4, std::abs(maxy / a4 - 1), std::abs(fwd / a4 - 1)});

  const int n = 48;
  const double edge = 16.0, sigma = 1.0;
  auto rho = DensityGrid::zeros(n, n, n, edge * Eigen::Matrix3d::Identity(), Vector3d::Constant(-edge / 2));
  const double norm = std::pow(2 * std::numbers::pi * sigma * sigma, -1.5);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        rho.at(i, j, k) = norm * std::exp(-rho.point(i, j, k).squaredNorm() / (2 * sigma * sigma));
  double gauss = 0;
  for (double s : {0.5, 1.0, 2.0, 3.0}) {
    const Vector3d sv = s * Vector3d(1, 2, -2).normalized();
    const double exact = std::exp(-0.5 * s * s * sigma * sigma);
    gauss = std::max(gauss, std::abs(form_factor(rho, sv) - exact) / exact);
  }
  const bool ok = ruth <= 1e-12 && thomson <= 1e-12 && gauss <= 1e-4;
  return {ok, fmt("Rutherford %.1e, Thomson %.1e, Gaussian form factor %.1e", ruth, thomson, gauss)};
}

Outcome conservation() {
  Reference p;
  auto pc = p.cfg.propagator(1);
  const auto kg = p.cfg.kgrid(p.lat);
  const auto pulse = p.cfg.pulse();
  double trace = 0, herm = 0, eig = 0;
  const auto scan = [&](const sbe::DensityMatrixTrajectory& traj, bool unitary) {
    for (const auto& r : traj.rho) {
      trace = std::max(trace, std::abs(r.trace() - 1.0));
      herm = std::max(herm, (r - r.adjoint()).cwiseAbs().maxCoeff());
      if (!unitary) continue;
      const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd>(r).eigenvalues();
      eig = std::max({eig, std::abs(ev(0)), std::abs(ev(1) - 1.0)});
    }
  };
  scan(sbe::propagate(p.lat, p.t, kg, pulse, pc), false);
  pc.T2 = std::numeric_limits<double>::infinity();
  scan(sbe::propagate(p.lat, p.t, kg, pulse, pc), true);

  auto weak = pulse;
  weak.E0 = pulse.E0 / 50;
  const double n50 = sbe::conduction_population(sbe::propagate(p.lat, p.t, kg, weak, pc)).back();
  weak.E0 = pulse.E0 / 100;
  const double n100 = sbe::conduction_population(sbe::propagate(p.lat, p.t, kg, weak, pc)).back();
  const double ratio = n100 / n50;
  const bool ok = trace <= 1e-10 && herm <= 1e-10 && eig <= 1e-8 && std::abs(ratio / 0.25 - 1) <= 0.1;
  return {ok, fmt("trace %.1e, Hermiticity %.1e, eigenvalue drift %.1e, E0/100 vs E0/50 population ratio %.4f", trace,
                  herm, eig, ratio)};
}

Outcome selection_rule() {
  Reference p;
  const auto traj = reference_trajectory(p);
  const auto spot = graphene::make_spot(p.lat, 1, 1);
  const graphene::FormFactorEvaluator table(p.lat, p.t, p.cfg.orbital(), p.cfg.cell_grid(p.lat), spot.s);
  const auto beam = p.cfg.beam_config();
  const auto special = diffraction::intensity_x_spot(traj, spot, table, beam);
  const auto general = diffraction::general_kernel(traj, spot, table, beam);
  const double scale = max_abs(general.dd);
  const double leak = std::max({max_abs(general.dj), max_abs(general.jj), max_abs(special.dj), max_abs(special.jj)});
  double agree = 0;
  for (std::size_t i = 0; i < general.total.size(); ++i)
    agree = std::max(agree, std::abs(general.total[i] - special.total[i]));
  agree /= scale;
  const bool ok = leak <= 1e-12 * scale && agree <= 1e-10;
  return {ok, fmt("max|I_dj|,|I_jj| / max I_dd = %.1e, evaluator agreement %.1e", leak / scale, agree)};
}

struct SpotTrace {
  diffraction::DiffractionTrace trace;
  sbe::LaserPulse pulse;
};

SpotTrace reference_y_spot() {
  Reference p;
  const auto traj = reference_trajectory(p);
  const auto spot = graphene::make_spot(p.lat, 1, -1);
  const graphene::FormFactorEvaluator table(p.lat, p.t, p.cfg.orbital(), p.cfg.cell_grid(p.lat), spot.s);
  return {diffraction::general_kernel(traj, spot, table, p.cfg.beam_config()), p.cfg.pulse()};
}

Outcome frequency() {
  const auto [tr, pulse] = reference_y_spot();
  const auto dd = diffraction::spectral_content(tr.times, tr.dd, pulse.omega, pulse.tau);
  const auto dj = diffraction::spectral_content(tr.times, tr.dj, pulse.omega, pulse.tau);
  const double r_dd = dd.amp_2omega / dd.amp_omega, r_dj = dj.amp_omega / dj.amp_2omega;
  return {r_dd > 3 && r_dj > 3, fmt("I_dd amp(2w)/amp(w) = %.3g, I_dj amp(w)/amp(2w) = %.3g", r_dd, r_dj)};
}

Outcome ordering() {
  const auto [tr, pulse] = reference_y_spot();
  const double dd = ptp(tr.dd), dj = ptp(tr.dj), jj = ptp(tr.jj);
  const bool ok = dj > dd && jj < dd && jj < dj;
  return {ok, fmt("peak-to-peak I_dd %.3e, I_dj %.3e, I_jj %.3e (I_dj/I_dd = %.3g)", dd, dj, jj, dj / dd)};
}

Outcome scaling() {
  Reference p;
  p.cfg.grid.nk = 24;
  const auto traj = reference_trajectory(p);
  const auto spot = graphene::make_spot(p.lat, 1, -1);
  const graphene::FormFactorEvaluator table(p.lat, p.t, p.cfg.orbital(), p.cfg.cell_grid(p.lat), spot.s);
  const std::size_t it = traj.num_times() / 2;
  std::vector<double> lb, ldj, ljj;
  for (int i = 1; i <= 9; ++i) {
    const double beta = 0.1 * i;
    const double kinetic = units::electron_rest_energy_eV * (1 / std::sqrt(1 - beta * beta) - 1);
    const auto beam = diffraction::BeamConfig::make(kinetic, 45.0, diffraction::ProbeKind::electron_rel);
    const auto tr = diffraction::general_kernel(traj, spot, table, beam);
    lb.push_back(std::log(beam.kinematics().beta));
    ldj.push_back(std::log(std::abs(tr.dj[it])));
    ljj.push_back(std::log(std::abs(tr.jj[it])));
  }
  const auto slope = [&](const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < y.size(); ++i) mx += lb[i], my += y[i];
    mx /= double(y.size());
    my /= double(y.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < y.size(); ++i) sxy += (lb[i] - mx) * (y[i] - my), sxx += (lb[i] - mx) * (lb[i] - mx);
    return sxy / sxx;
  };
  const double s1 = slope(ldj), s2 = slope(ljj), beta = diffraction::beam_kinematics(1e6).beta;
  const bool ok = std::abs(s1 - 1) <= 1e-6 && std::abs(s2 - 2) <= 1e-6 && std::abs(beta - 0.9411) <= 1e-4;
  return {ok, fmt("slope I_dj %.9f, slope I_jj %.9f, beta(1 MeV) %.6f", s1, s2, beta)};
}

Outcome determinism() {
  Reference p;
  const auto one = reference_trajectory(p, 1), four = reference_trajectory(p, 4);
  const auto n1 = sbe::conduction_population(one), n4 = sbe::conduction_population(four);
  bool identical = n1 == n4;
  const auto spot = graphene::make_spot(p.lat, 1, -1);
  const graphene::FormFactorEvaluator table(p.lat, p.t, p.cfg.orbital(), p.cfg.cell_grid(p.lat), spot.s);
  identical = identical && diffraction::general_kernel(one, spot, table, p.cfg.beam_config(), 1).total ==
                               diffraction::general_kernel(four, spot, table, p.cfg.beam_config(), 4).total;

  Reference half = p;
  half.cfg.propagation.dt_au = 0.05;
  const double nc_half = sbe::conduction_population(reference_trajectory(half)).back();
  Reference fine = p;
  fine.cfg.grid.nk = 96;
  const double nc_fine = sbe::conduction_population(reference_trajectory(fine)).back();
  const double dt_change = std::abs(nc_half / n1.back() - 1), k_change = std::abs(nc_fine / n1.back() - 1);
  const bool ok = identical && dt_change < 1e-6 && k_change < 0.02;
  return {ok, std::string(identical ? "1 vs 4 threads identical" : "1 vs 4 threads DIFFER") +
                  fmt(", N_c(tau) %.6e, dt-halving %.1e, 48->96 grid %.2e", n1.back(), dt_change, k_change)};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
    {"algebraic identity suite", algebra},
    {"Fock-space suite", fock_suite},
    {"stationary cross sections", stationary},
    {"dynamics conservation at the reference pulse", conservation},
    {"[1,1] geometry selection rule", selection_rule},
    {"[1,-1] frequency content", frequency},
    {"[1,-1] channel ordering", ordering},
    {"channel scaling with beta", scaling},
    {"determinism and convergence", determinism},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::size_t> which;
  if (argc > 1) {
    const long n = std::strtol(argv[1], nullptr, 10);
    if (n < 1 || n > static_cast<long>(criteria.size())) {
      std::fprintf(stderr, "usage: %s [1-%zu]\n", argv[0], criteria.size());
      return 2;
    }
    which.push_back(static_cast<std::size_t>(n));
  } else {
    for (std::size_t i = 1; i <= criteria.size(); ++i) which.push_back(i);
  }
  bool all = true;
  for (std::size_t n : which) {
    const auto& [name, run] = criteria[n - 1];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %zu: %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", n, name.c_str(), o.detail.c_str(),
                secs);
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
