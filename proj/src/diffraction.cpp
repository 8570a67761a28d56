#include "trdiff/diffraction.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "trdiff/dirac.hpp"
#include "trdiff/errors.hpp"
#include "trdiff/parallel.hpp"
#include "trdiff/units.hpp"

namespace trdiff::diffraction {

namespace {

constexpr double alignment_tol = 1e-9;

using Weights = Eigen::Vector4d;

void check_table(const graphene::Spot& spot, const graphene::FormFactorEvaluator& table) {
  if ((table.bragg() - spot.s).norm() > 1e-12 * std::max(1.0, spot.s.norm()))
    throw DomainError("diffraction_signal", "form-factor table was built for a different Bragg vector than spot " +
                                                spot.label());
}

DiffractionTrace assemble(const sbe::DensityMatrixTrajectory& traj, const graphene::Spot& spot,
                          const graphene::FormFactorEvaluator& table, const Weights& w, unsigned threads) {
  check_table(spot, table);
  const std::size_t nt = traj.num_times(), nk = traj.num_k();
  const double norm = 1.0 / (2.0 * table.lattice().cell_area() * static_cast<double>(nk));
  const bool currents = w(1) != 0.0 || w(2) != 0.0;

  DiffractionTrace trace;
  trace.spot = spot;
  trace.times = traj.times;
  trace.dd.assign(nt, 0.0);
  trace.dj.assign(nt, 0.0);
  trace.jj.assign(nt, 0.0);
  trace.total.assign(nt, 0.0);
  std::vector<double> imag(nt, 0.0);

  parallel_for(nt, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t it = begin; it < end; ++it) {
      double dd = 0, dj = 0, jj = 0, im = 0;
      for (std::size_t ik = 0; ik < nk; ++ik) {
        const graphene::BandFormFactors ff = table.at(traj.momentum(it, ik));
        Eigen::Matrix2cd x = w(0) * ff.q;
        Eigen::Matrix2cd wj = Eigen::Matrix2cd::Zero();
        if (currents) wj = w(1) * ff.jx + w(2) * ff.jy;
        const ChannelValues c = channel_intensities(traj.at(it, ik), x, wj);
        dd += c.dd;
        dj += c.dj;
        jj += c.jj;
        im = std::max(im, c.imag);
      }
      trace.dd[it] = dd * norm;
      trace.dj[it] = dj * norm;
      trace.jj[it] = jj * norm;
      trace.total[it] = trace.dd[it] + trace.dj[it] + trace.jj[it];
      imag[it] = im * norm;
    }
  });
  trace.imag_residue = *std::max_element(imag.begin(), imag.end());
  return trace;
}

}  // namespace

ProbeKind parse_probe(const std::string& name) {
  if (name == "xray") return ProbeKind::xray;
  if (name == "electron_nonrel") return ProbeKind::electron_nonrel;
  if (name == "electron_rel") return ProbeKind::electron_rel;
  throw DomainError("diffraction_signal", "unknown probe '" + name + "' (xray, electron_nonrel, electron_rel)");
}

std::string to_string(ProbeKind kind) {
  switch (kind) {
    case ProbeKind::xray: return "xray";
    case ProbeKind::electron_nonrel: return "electron_nonrel";
    default: return "electron_rel";
  }
}

BeamKinematics beam_kinematics(double kinetic_eV) {
  if (!(kinetic_eV >= 0)) throw DomainError("diffraction_signal", "beam kinetic energy must be >= 0");
  BeamKinematics b;
  b.gamma = 1.0 + kinetic_eV / units::electron_rest_energy_eV;
  b.beta = std::sqrt(1.0 - 1.0 / (b.gamma * b.gamma));
  const double c = units::speed_of_light;
  b.k = b.gamma * b.beta * c;
  b.energy = b.gamma * c * c;
  return b;
}

BeamConfig BeamConfig::make(double kinetic_eV, double incidence_deg, ProbeKind probe) {
  if (!(incidence_deg > 0 && incidence_deg <= 90))
    throw DomainError("diffraction_signal", "incidence angle must be in (0, 90] degrees");
  beam_kinematics(kinetic_eV);
  const double th = incidence_deg * std::numbers::pi / 180.0;
  BeamConfig b;
  b.kinetic_eV = kinetic_eV;
  b.k_in_dir = Eigen::Vector3d(std::cos(th), 0.0, -std::sin(th));
  b.probe = probe;
  return b;
}

Eigen::Vector4d coupling_weights(const Eigen::Vector2d& s, const BeamConfig& beam) {
  const auto kernel = dirac::dtilde(Eigen::Vector3d(s.x(), s.y(), 0.0));
  const BeamKinematics kin = beam.kinematics();
  // k^mu in units of m c
  Eigen::Vector4d k4;
  k4 << kin.gamma, kin.gamma * kin.beta * beam.k_in_dir;
  Eigen::Vector4d w = kernel.entries * k4 / kin.gamma;
  w.tail<3>() *= beam.has_current_channels() ? units::alpha : 0.0;
  return w;
}

ChannelValues channel_intensities(const Eigen::Matrix2cd& rho, const Eigen::Matrix2cd& x,
                                  const Eigen::Matrix2cd& w) {
  const std::complex<double> dd = (rho * (x.adjoint() * x)).trace();
  const std::complex<double> dj = (rho * (x.adjoint() * w + w.adjoint() * x)).trace();
  const std::complex<double> jj = (rho * (w.adjoint() * w)).trace();
  ChannelValues c;
  c.dd = dd.real();
  c.dj = dj.real();
  c.jj = jj.real();
  c.imag = std::max({std::abs(dd.imag()), std::abs(dj.imag()), std::abs(jj.imag())});
  return c;
}

DiffractionTrace intensity_x_spot(const sbe::DensityMatrixTrajectory& traj, const graphene::Spot& spot,
                                  const graphene::FormFactorEvaluator& table, const BeamConfig& beam,
                                  unsigned threads) {
  (void)beam;
  if (std::atan2(std::abs(spot.s.y()), std::abs(spot.s.x())) > alignment_tol)
    throw DomainError("diffraction_signal", "spot " + spot.label() + " is not aligned with x");
  return assemble(traj, spot, table, Weights(1.0, 0.0, 0.0, 0.0), threads);
}

DiffractionTrace intensity_y_spot(const sbe::DensityMatrixTrajectory& traj, const graphene::Spot& spot,
                                  const graphene::FormFactorEvaluator& table, const BeamConfig& beam,
                                  unsigned threads) {
  if (std::atan2(std::abs(spot.s.x()), std::abs(spot.s.y())) > alignment_tol)
    throw DomainError("diffraction_signal", "spot " + spot.label() + " is not aligned with y");
  const double h = std::sqrt(0.5);
  if ((beam.k_in_dir - Eigen::Vector3d(h, 0.0, -h)).norm() > alignment_tol)
    throw DomainError("diffraction_signal", "y-spot evaluator needs the beam at 45 degrees in the xz-plane");
  const double wx = beam.has_current_channels() ? -h * beam.kinematics().beta * units::alpha : 0.0;
  return assemble(traj, spot, table, Weights(1.0, wx, 0.0, 0.0), threads);
}

DiffractionTrace general_kernel(const sbe::DensityMatrixTrajectory& traj, const graphene::Spot& spot,
                                const graphene::FormFactorEvaluator& table, const BeamConfig& beam,
                                unsigned threads) {
  return assemble(traj, spot, table, coupling_weights(spot.s, beam), threads);
}

SpectralContent spectral_content(const std::vector<double>& times, const std::vector<double>& values, double omega,
                                 double tau) {
  if (times.size() != values.size()) throw DomainError("diffraction_signal", "times and values differ in length");
  if (!(omega > 0) || !(tau > 0)) throw DomainError("diffraction_signal", "omega and tau must be positive");
  const double period = 2.0 * std::numbers::pi / omega;
  if (times.size() < 2 || times.back() - times.front() < 4.0 * period)
    throw DomainError("diffraction_signal", "trace shorter than four carrier periods");

  const double t0 = 0.25 * tau, t1 = 0.75 * tau;
  std::vector<double> t, x, w;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t0 || times[i] > t1) continue;
    t.push_back(times[i]);
    x.push_back(values[i]);
    const double s = std::sin(std::numbers::pi * (times[i] - t0) / (t1 - t0));
    w.push_back(s * s);
  }
  const double step = t.size() > 1 ? (t.back() - t.front()) / static_cast<double>(t.size() - 1) : 0.0;
  if (t.size() < 16 || step > period / 8.0)
    throw DomainError("diffraction_signal", "trace too coarse or too short inside the analysis window");

  double wsum = 0, mean = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    wsum += w[i];
    mean += w[i] * x[i];
  }
  mean /= wsum;
  const auto amplitude = [&](double freq) {
    std::complex<double> acc(0);
    for (std::size_t i = 0; i < t.size(); ++i) acc += w[i] * (x[i] - mean) * std::polar(1.0, -freq * t[i]);
    return 2.0 * std::abs(acc) / wsum;
  };
  SpectralContent out;
  out.amp_omega = amplitude(omega);
  out.amp_2omega = amplitude(2.0 * omega);
  out.ratio = out.amp_2omega > 0 ? out.amp_omega / out.amp_2omega : std::numeric_limits<double>::quiet_NaN();
  return out;
}

std::vector<double> convolve_probe_envelope(const std::vector<double>& times, const std::vector<double>& values,
                                            double fwhm) {
  if (!(fwhm >= 0)) throw DomainError("diffraction_signal", "probe FWHM must be >= 0");
  if (times.size() != values.size()) throw DomainError("diffraction_signal", "times and values differ in length");
  const std::size_t n = values.size();
  if (fwhm == 0 || n < 2) return values;
  const double step = times[1] - times[0];
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(times[i] - times[i - 1] - step) > 1e-6 * step)
      throw DomainError("diffraction_signal", "probe convolution needs uniform sampling");

  const double sigma = fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0))) / step;
  const auto half = static_cast<long>(std::ceil(6.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * half + 1));
  double ksum = 0;
  for (long j = -half; j <= half; ++j) {
    const double v = std::exp(-0.5 * (j / sigma) * (j / sigma));
    kernel[static_cast<std::size_t>(j + half)] = v;
    ksum += v;
  }
  for (double& v : kernel) v /= ksum;

  const long len = static_cast<long>(n);
  const auto reflect = [len](long j) {
    long m = j % (2 * len);
    if (m < 0) m += 2 * len;
    return m < len ? m : 2 * len - 1 - m;
  };
  std::vector<double> out(n, 0.0);
  for (long i = 0; i < len; ++i) {
    double acc = 0;
    for (long j = -half; j <= half; ++j)
      acc += kernel[static_cast<std::size_t>(j + half)] * values[static_cast<std::size_t>(reflect(i + j))];
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

DiffractionTrace convolve_probe_envelope(const DiffractionTrace& trace, double fwhm) {
  DiffractionTrace out = trace;
  out.dd = convolve_probe_envelope(trace.times, trace.dd, fwhm);
  out.dj = convolve_probe_envelope(trace.times, trace.dj, fwhm);
  out.jj = convolve_probe_envelope(trace.times, trace.jj, fwhm);
  for (std::size_t i = 0; i < out.total.size(); ++i) out.total[i] = out.dd[i] + out.dj[i] + out.jj[i];
  return out;
}

}  // namespace trdiff::diffraction
