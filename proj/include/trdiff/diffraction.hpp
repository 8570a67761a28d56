#pragma once

// Channel-decomposed diffraction intensities of the pumped target in the
// instantaneous-probe limit. The probe couples to the target four-current
// J = (Q, J^x, J^y, 0) through weights w_mu = Dtilde_{mu nu}(S) k^nu / E, with
// the spatial weights carrying an extra alpha for the current normalization:
//   A_fn = sum_mu w_mu F_S[J^mu]_fn,
//   I = sum_p sum_nmf rho_nm conj(A_fm) A_fn / (2 cell_area N_k)
// and split into density-density, density-current and current-current parts.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trdiff/graphene.hpp"
#include "trdiff/sbe.hpp"

namespace trdiff::diffraction {

enum class ProbeKind { xray, electron_nonrel, electron_rel };

ProbeKind parse_probe(const std::string& name);
std::string to_string(ProbeKind kind);

struct BeamKinematics {
  double gamma = 1;
  double beta = 0;
  double k = 0;       // momentum, atomic units
  double energy = 0;  // total energy gamma m c^2, atomic units
};

// gamma = 1 + T / (m c^2), beta = sqrt(1 - 1/gamma^2).
BeamKinematics beam_kinematics(double kinetic_eV);

struct BeamConfig {
  double kinetic_eV = 1e6;
  Eigen::Vector3d k_in_dir = Eigen::Vector3d::UnitZ();
  ProbeKind probe = ProbeKind::electron_rel;

  // k_in = (cos theta, 0, -sin theta): in the xz-plane at `incidence_deg` to the
  // sample plane, in-plane projection along +x.
  static BeamConfig make(double kinetic_eV, double incidence_deg, ProbeKind probe);

  BeamKinematics kinematics() const { return beam_kinematics(kinetic_eV); }
  bool has_current_channels() const { return probe == ProbeKind::electron_rel; }
};

// Probe coupling weights (w_0, w_x, w_y, w_z) for Bragg vector s.
Eigen::Vector4d coupling_weights(const Eigen::Vector2d& s, const BeamConfig& beam);

struct ChannelValues {
  double dd = 0, dj = 0, jj = 0;
  double imag = 0;  // largest imaginary part encountered before taking real parts
};

// tr(rho X^dag X), tr(rho (X^dag W + W^dag X)), tr(rho W^dag W) for density
// table X = F_S[Q] and weighted current table W = sum_i w_i F_S[J^i].
ChannelValues channel_intensities(const Eigen::Matrix2cd& rho, const Eigen::Matrix2cd& x,
                                  const Eigen::Matrix2cd& w);

struct DiffractionTrace {
  graphene::Spot spot;
  std::vector<double> times;
  std::vector<double> dd, dj, jj, total;
  double imag_residue = 0;
};

// Bragg vector along +-x; density channel only.
DiffractionTrace intensity_x_spot(const sbe::DensityMatrixTrajectory& traj, const graphene::Spot& spot,
                                  const graphene::FormFactorEvaluator& table, const BeamConfig& beam,
                                  unsigned threads = 1);

// Bragg vector along +-y with the beam at 45 degrees in the xz-plane:
// dj and jj enter through the J^x table with weight -(sqrt2/2) beta alpha.
DiffractionTrace intensity_y_spot(const sbe::DensityMatrixTrajectory& traj, const graphene::Spot& spot,
                                  const graphene::FormFactorEvaluator& table, const BeamConfig& beam,
                                  unsigned threads = 1);

// Any spot and beam direction, weights from the Dtilde tensor.
DiffractionTrace general_kernel(const sbe::DensityMatrixTrajectory& traj, const graphene::Spot& spot,
                                const graphene::FormFactorEvaluator& table, const BeamConfig& beam,
                                unsigned threads = 1);

struct SpectralContent {
  double amp_omega = 0;
  double amp_2omega = 0;
  double ratio = 0;  // amp_omega / amp_2omega
};

// Hann-windowed Fourier amplitudes of the mean-removed signal at omega and
// 2 omega over [tau/4, 3tau/4].
SpectralContent spectral_content(const std::vector<double>& times, const std::vector<double>& values, double omega,
                                 double tau);

// Gaussian smoothing of a uniformly sampled trace with half-sample reflective
// boundaries. fwhm in the same units as times.
std::vector<double> convolve_probe_envelope(const std::vector<double>& times, const std::vector<double>& values,
                                            double fwhm);
DiffractionTrace convolve_probe_envelope(const DiffractionTrace& trace, double fwhm);

}  // namespace trdiff::diffraction
