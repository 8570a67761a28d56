#include "trdiff/sbe.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <sstream>

#include "trdiff/errors.hpp"
#include "trdiff/parallel.hpp"

namespace trdiff::sbe {

namespace {

constexpr std::complex<double> I(0.0, 1.0);

double simpson(const LaserPulse& pulse, double a, double b) {
  const double m = 0.5 * (a + b);
  return (b - a) / 6.0 * (pulse.amplitude(a) + 4.0 * pulse.amplitude(m) + pulse.amplitude(b));
}

Matrix2cd rhs(const Matrix2cd& h, const Matrix2cd& rho, double gamma) {
  Matrix2cd d = -I * (h * rho - rho * h);
  d(0, 1) -= gamma * rho(0, 1);
  d(1, 0) -= gamma * rho(1, 0);
  return d;
}

bool finite(const Matrix2cd& m) {
  for (int i = 0; i < 4; ++i)
    if (!std::isfinite(m(i).real()) || !std::isfinite(m(i).imag())) return false;
  return true;
}

std::string describe_k(std::size_t ik, const Vector2d& p) {
  std::ostringstream os;
  os.precision(10);
  os << "k-point " << ik << " (" << p.x() << ", " << p.y() << ")";
  return os.str();
}

// Number of fixed blocks for reductions over k; independent of the thread count.
constexpr std::size_t reduction_blocks = 64;

}  // namespace

double LaserPulse::amplitude(double t) const {
  if (t < 0 || t > tau) return 0.0;
  const double s = std::sin(std::numbers::pi * t / tau);
  const double s2 = s * s;
  return E0 * s2 * s2 * std::cos(omega * t);
}

VectorPotential::VectorPotential(const LaserPulse& pulse, double h) : pulse_(pulse), h_(h) {
  if (!(h > 0)) throw DomainError("sbe_dynamics", "vector potential node spacing must be positive");
  if (!(pulse.tau > 0)) throw DomainError("sbe_dynamics", "pulse duration must be positive");
  const auto nodes = static_cast<std::size_t>(std::floor(pulse.tau / h)) + 1;
  cumulative_.resize(nodes + 1);
  cumulative_[0] = 0.0;
  for (std::size_t i = 1; i < nodes; ++i)
    cumulative_[i] = cumulative_[i - 1] - simpson(pulse_, (i - 1) * h, i * h);
  // Last entry: value at tau.
  cumulative_[nodes] = cumulative_[nodes - 1] - simpson(pulse_, (nodes - 1) * h, pulse.tau);
}

double VectorPotential::node(std::size_t i) const { return scalar(i * h_); }

double VectorPotential::scalar(double t) const {
  if (t <= 0) return 0.0;
  if (t >= pulse_.tau) return cumulative_.back();
  const auto i = std::min(static_cast<std::size_t>(std::floor(t / h_)), cumulative_.size() - 2);
  const double t0 = i * h_;
  if (t == t0) return cumulative_[i];
  return cumulative_[i] - simpson(pulse_, t0, t);
}

std::size_t DensityMatrixTrajectory::nearest(double t) const {
  if (times.empty()) throw DomainError("sbe_dynamics", "empty trajectory");
  const auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return 0;
  if (it == times.end()) return times.size() - 1;
  const auto i = static_cast<std::size_t>(it - times.begin());
  return (t - times[i - 1] <= times[i] - t) ? i - 1 : i;
}

Matrix2cd moving_frame_hamiltonian(const graphene::Lattice& lat, double t_hop, const Vector2d& p,
                                   const Vector2d& field) {
  std::complex<double> f(0);
  Eigen::Vector2cd grad = Eigen::Vector2cd::Zero();
  for (const auto& d : lat.delta) {
    const std::complex<double> e = std::polar(1.0, p.dot(d));
    f += e;
    grad += (I * e) * d.cast<std::complex<double>>();
  }
  const double mag2 = std::norm(f);
  if (mag2 < 1e-24) throw NumericalError("sbe_dynamics", "trajectory reached a Dirac point");
  const double eps = std::abs(t_hop) * std::sqrt(mag2);
  const double gx = (std::conj(f) * grad(0)).imag() / mag2;
  const double gy = (std::conj(f) * grad(1)).imag() / mag2;
  const double coupling = -0.5 * (field.x() * gx + field.y() * gy);
  Matrix2cd h;
  h << -eps, coupling, coupling, eps;
  return h;
}

DensityMatrixTrajectory propagate(const graphene::Lattice& lat, double t_hop, const graphene::KGrid& kgrid,
                                  const LaserPulse& pulse, const PropagatorConfig& cfg) {
  if (!(cfg.dt > 0)) throw DomainError("sbe_dynamics", "time step must be positive");
  if (pulse.omega > 0 && cfg.dt > 2.0 * std::numbers::pi / (40.0 * pulse.omega))
    throw DomainError("sbe_dynamics", "time step " + std::to_string(cfg.dt) +
                                          " does not resolve the carrier (need dt <= 2 pi / (40 omega))");
  if (!(cfg.T2 > 0)) throw DomainError("sbe_dynamics", "T2 must be positive");
  if (cfg.record_stride < 1) throw DomainError("sbe_dynamics", "record stride must be >= 1");
  const double t_end = cfg.t_end > 0 ? cfg.t_end : pulse.tau;
  if (!(t_end > 0)) throw DomainError("sbe_dynamics", "end time must be positive");

  const auto stride = static_cast<std::size_t>(cfg.record_stride);
  const auto min_steps = static_cast<std::size_t>(std::ceil(t_end / cfg.dt - 1e-9));
  const std::size_t steps = (min_steps + stride - 1) / stride * stride;
  const double dt = t_end / static_cast<double>(steps);
  const double gamma = std::isinf(cfg.T2) ? 0.0 : 1.0 / cfg.T2;

  const VectorPotential potential(pulse, 0.5 * dt);
  std::vector<Vector2d> a_half(2 * steps + 1), e_half(2 * steps + 1);
  for (std::size_t j = 0; j <= 2 * steps; ++j) {
    const double t = j == 2 * steps ? t_end : 0.5 * dt * static_cast<double>(j);
    a_half[j] = potential(t);
    e_half[j] = pulse.field(t);
  }

  std::vector<std::size_t> record_steps;
  for (std::size_t s = 0; s <= steps; s += stride) record_steps.push_back(s);

  DensityMatrixTrajectory traj;
  traj.dt = dt;
  traj.kpoints = kgrid.points;
  for (std::size_t s : record_steps) {
    traj.times.push_back(s == steps ? t_end : dt * static_cast<double>(s));
    traj.vector_potential.push_back(a_half[2 * s]);
  }
  const std::size_t nk = kgrid.points.size();
  traj.rho.resize(record_steps.size() * nk);

  parallel_for(nk, cfg.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t ik = begin; ik < end; ++ik) {
      const Vector2d& p = kgrid.points[ik];
      const auto hamiltonian = [&](std::size_t j) {
        try {
          return moving_frame_hamiltonian(lat, t_hop, p + a_half[j], e_half[j]);
        } catch (const NumericalError&) {
          throw NumericalError("sbe_dynamics", "trajectory of " + describe_k(ik, p) + " reached a Dirac point at t = " +
                                                   std::to_string(0.5 * dt * static_cast<double>(j)));
        }
      };
      Matrix2cd rho = Matrix2cd::Zero();
      rho(0, 0) = 1.0;
      std::size_t next_record = 0;
      Matrix2cd h0 = hamiltonian(0);
      for (std::size_t s = 0;; ++s) {
        if (next_record < record_steps.size() && record_steps[next_record] == s) {
          traj.rho[next_record * nk + ik] = rho;
          ++next_record;
        }
        if (s == steps) break;
        const Matrix2cd hm = hamiltonian(2 * s + 1);
        const Matrix2cd h1 = hamiltonian(2 * s + 2);
        const Matrix2cd k1 = rhs(h0, rho, gamma);
        const Matrix2cd k2 = rhs(hm, rho + 0.5 * dt * k1, gamma);
        const Matrix2cd k3 = rhs(hm, rho + 0.5 * dt * k2, gamma);
        const Matrix2cd k4 = rhs(h1, rho + dt * k3, gamma);
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!finite(rho))
          throw NumericalError("sbe_dynamics", "non-finite density matrix at " + describe_k(ik, p) +
                                                   ", t = " + std::to_string(dt * static_cast<double>(s + 1)));
        h0 = h1;
      }
    }
  });
  return traj;
}

std::vector<double> conduction_population(const DensityMatrixTrajectory& traj) {
  const std::size_t nk = traj.num_k();
  std::vector<double> out(traj.num_times());
  std::vector<double> column(nk);
  for (std::size_t it = 0; it < traj.num_times(); ++it) {
    for (std::size_t ik = 0; ik < nk; ++ik) column[ik] = traj.at(it, ik)(1, 1).real();
    out[it] = pairwise_sum(std::span<const double>(column)) / static_cast<double>(nk);
  }
  return out;
}

namespace {

struct FieldSums {
  Eigen::VectorXcd q, jx, jy;
};

FieldSums cell_fields(const DensityMatrixTrajectory& traj, std::size_t it, double t_hop,
                      const graphene::BlochSampler& sampler, unsigned threads) {
  const std::size_t nk = traj.num_k();
  const auto npts = static_cast<Eigen::Index>(sampler.grid().points.size());
  std::vector<FieldSums> blocks(reduction_blocks);
  parallel_for(reduction_blocks, threads, [&](std::size_t b0, std::size_t b1) {
    for (std::size_t b = b0; b < b1; ++b) {
      FieldSums acc{Eigen::VectorXcd::Zero(npts), Eigen::VectorXcd::Zero(npts), Eigen::VectorXcd::Zero(npts)};
      const std::size_t k0 = nk * b / reduction_blocks, k1 = nk * (b + 1) / reduction_blocks;
      for (std::size_t ik = k0; ik < k1; ++ik) {
        const auto state = graphene::band_state(sampler.lattice(), t_hop, traj.momentum(it, ik));
        const graphene::CellFields f = graphene::cell_matrix_elements(sampler, state);
        const Matrix2cd& rho = traj.at(it, ik);
        for (int n = 0; n < 2; ++n) {
          for (int m = 0; m < 2; ++m) {
            if (rho(n, m) == 0.0) continue;
            acc.q += rho(n, m) * f.density(m, n);
            acc.jx += rho(n, m) * f.current_x(m, n);
            acc.jy += rho(n, m) * f.current_y(m, n);
          }
        }
      }
      blocks[b] = std::move(acc);
    }
  });
  FieldSums total = blocks[0];
  for (std::size_t b = 1; b < reduction_blocks; ++b) {
    total.q += blocks[b].q;
    total.jx += blocks[b].jx;
    total.jy += blocks[b].jy;
  }
  const double inv = 1.0 / static_cast<double>(nk);
  total.q *= inv;
  total.jx *= inv;
  total.jy *= inv;
  return total;
}

}  // namespace

std::vector<Snapshot> realspace_snapshots(const DensityMatrixTrajectory& traj, const std::vector<std::size_t>& indices,
                                          const graphene::Lattice& lat, double t_hop,
                                          const graphene::OrbitalProfile& orbital, const graphene::CellGrid& grid,
                                          unsigned threads) {
  for (std::size_t it : indices)
    if (it >= traj.num_times()) throw DomainError("sbe_dynamics", "snapshot index out of range");
  const graphene::BlochSampler sampler(lat, orbital, grid);
  const FieldSums ref = cell_fields(traj, 0, t_hop, sampler, threads);
  std::vector<Snapshot> out;
  for (std::size_t it : indices) {
    const FieldSums now = cell_fields(traj, it, t_hop, sampler, threads);
    Snapshot snap;
    snap.time = traj.times[it];
    snap.points = grid.points;
    snap.d_rho = (now.q - ref.q).real();
    snap.jx = (now.jx - ref.jx).real();
    snap.jy = (now.jy - ref.jy).real();
    out.push_back(std::move(snap));
  }
  return out;
}

Snapshot realspace_snapshot(const DensityMatrixTrajectory& traj, std::size_t it, const graphene::Lattice& lat,
                            double t_hop, const graphene::OrbitalProfile& orbital, const graphene::CellGrid& grid,
                            unsigned threads) {
  return realspace_snapshots(traj, {it}, lat, t_hop, orbital, grid, threads).front();
}

}  // namespace trdiff::sbe
