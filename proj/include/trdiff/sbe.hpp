#pragma once

// Two-band semiconductor Bloch equations for pumped graphene in the moving
// (Houston) frame: crystal momenta follow p_t = p + A(t) with A = -int E dt,
// and rho(p, t) is stored in the instantaneous band basis at p_t.

#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "trdiff/graphene.hpp"

namespace trdiff::sbe {

using Eigen::Matrix2cd;
using Eigen::Vector2d;

// E(t) = pol E0 sin^4(pi t / tau) cos(omega t) on [0, tau], zero outside.
struct LaserPulse {
  double E0 = 0;
  double omega = 0;
  double tau = 0;
  Vector2d pol = Vector2d::UnitX();

  double amplitude(double t) const;
  Vector2d field(double t) const { return pol * amplitude(t); }
};

// A(t) = -int_0^t E dt' by composite Simpson with step h/2, cumulative values
// cached on the nodes t_i = i h. Off-node times integrate from the previous node.
class VectorPotential {
public:
  VectorPotential(const LaserPulse& pulse, double h);

  Vector2d operator()(double t) const { return pulse_.pol * scalar(t); }
  double scalar(double t) const;
  double node_spacing() const { return h_; }
  // Value at node i (exact cache entry).
  double node(std::size_t i) const;

private:
  LaserPulse pulse_;
  double h_;
  std::vector<double> cumulative_;
};

struct PropagatorConfig {
  double dt = 0.1;
  double T2 = std::numeric_limits<double>::infinity();  // coherence lifetime
  int record_stride = 40;                                // steps between stored samples
  double t_end = 0;                                      // 0: end of the pulse
  unsigned threads = 1;
};

// rho[it * num_k + ik] is the band-basis density matrix (0 = valence,
// 1 = conduction) of k-point ik at times[it].
struct DensityMatrixTrajectory {
  std::vector<double> times;
  std::vector<Vector2d> kpoints;
  std::vector<Vector2d> vector_potential;  // A at each stored time
  std::vector<Matrix2cd> rho;
  double dt = 0;  // step actually used

  std::size_t num_times() const { return times.size(); }
  std::size_t num_k() const { return kpoints.size(); }
  const Matrix2cd& at(std::size_t it, std::size_t ik) const { return rho[it * num_k() + ik]; }
  Vector2d momentum(std::size_t it, std::size_t ik) const { return kpoints[ik] + vector_potential[it]; }
  // Index of the stored sample closest to t.
  std::size_t nearest(double t) const;
};

// Two-band Hamiltonian in the band basis at momentum p under field E,
// [[eps_v, E.d_cv], [E.d_cv, eps_c]] (d_cv is real in the fixed gauge).
Matrix2cd moving_frame_hamiltonian(const graphene::Lattice& lat, double t_hop, const Vector2d& p,
                                   const Vector2d& field);

// Integrates d rho/dt = -i [H, rho] - Gamma o rho from rho = diag(1, 0) at every
// k-point with fixed-step RK4. The step is shrunk so that the step count is a
// multiple of the record stride and the run ends exactly on t_end.
DensityMatrixTrajectory propagate(const graphene::Lattice& lat, double t_hop, const graphene::KGrid& kgrid,
                                  const LaserPulse& pulse, const PropagatorConfig& cfg);

// N_c(t) = mean over k of rho_cc.
std::vector<double> conduction_population(const DensityMatrixTrajectory& traj);

struct Snapshot {
  double time = 0;
  std::vector<Vector2d> points;
  Eigen::VectorXd d_rho, jx, jy;  // changes relative to the unpumped state
};

// Cell-resolved density and current change at stored sample `it`:
// sum_nm mean_p rho_nm(p, t) X_mn(p_t, r) minus the same at t = 0.
Snapshot realspace_snapshot(const DensityMatrixTrajectory& traj, std::size_t it, const graphene::Lattice& lat,
                            double t_hop, const graphene::OrbitalProfile& orbital, const graphene::CellGrid& grid,
                            unsigned threads = 1);
// Several samples sharing one t = 0 reference.
std::vector<Snapshot> realspace_snapshots(const DensityMatrixTrajectory& traj, const std::vector<std::size_t>& indices,
                                          const graphene::Lattice& lat, double t_hop,
                                          const graphene::OrbitalProfile& orbital, const graphene::CellGrid& grid,
                                          unsigned threads = 1);

}  // namespace trdiff::sbe
