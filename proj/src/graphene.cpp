#include "trdiff/graphene.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "trdiff/errors.hpp"

namespace trdiff::graphene {

namespace {

constexpr std::complex<double> I(0.0, 1.0);

// Rotate v so that its first component with magnitude above `tiny` is real
// and non-negative.
void fix_gauge(Vector2cd& v) {
  constexpr double tiny = 1e-12;
  for (int i = 0; i < 2; ++i) {
    const double mag = std::abs(v(i));
    if (mag > tiny) {
      v *= std::conj(v(i)) / mag;
      v(i) = mag;
      return;
    }
  }
}

}  // namespace

Lattice Lattice::make(double a) {
  if (!(a > 0)) throw DomainError("graphene_model", "lattice constant must be positive");
  const double d = a / std::sqrt(3.0);
  Lattice lat;
  lat.a = a;
  lat.delta = {Vector2d(d, 0.0), Vector2d(-0.5 * d, 0.5 * std::sqrt(3.0) * d),
               Vector2d(-0.5 * d, -0.5 * std::sqrt(3.0) * d)};
  lat.a1 = lat.delta[0] - lat.delta[1];
  lat.a2 = lat.delta[0] - lat.delta[2];
  Eigen::Matrix2d direct;
  direct.row(0) = lat.a1.transpose();
  direct.row(1) = lat.a2.transpose();
  const Eigen::Matrix2d recip = 2.0 * std::numbers::pi * direct.inverse();  // columns b1, b2
  lat.b1 = recip.col(0);
  lat.b2 = recip.col(1);
  lat.r_a = Vector2d::Zero();
  lat.r_b = lat.delta[0];
  return lat;
}

double Lattice::cell_area() const { return std::abs(a1.x() * a2.y() - a1.y() * a2.x()); }

Vector2d Lattice::dirac_point() const { return (2.0 * b1 + b2) / 3.0; }

std::complex<double> structure_factor(const Lattice& lat, const Vector2d& p) {
  std::complex<double> f(0);
  for (const auto& d : lat.delta) f += std::polar(1.0, p.dot(d));
  return f;
}

Vector2cd structure_factor_gradient(const Lattice& lat, const Vector2d& p) {
  Vector2cd g = Vector2cd::Zero();
  for (const auto& d : lat.delta) g += I * std::polar(1.0, p.dot(d)) * d.cast<std::complex<double>>();
  return g;
}

Matrix2cd hamiltonian_k(const Lattice& lat, double t_hop, const Vector2d& p) {
  const std::complex<double> off = t_hop * structure_factor(lat, p);
  Matrix2cd h;
  h << 0.0, off, std::conj(off), 0.0;
  return h;
}

Matrix2cd BandState::basis() const {
  Matrix2cd u;
  u.col(0) = evec_v;
  u.col(1) = evec_c;
  return u;
}

BandState eigensystem(const Matrix2cd& h, const Vector2d& p) {
  BandState st;
  st.p = p;
  Eigen::SelfAdjointEigenSolver<Matrix2cd> solver(h);
  st.eps_v = solver.eigenvalues()(0);
  st.eps_c = solver.eigenvalues()(1);
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if (st.eps_c - st.eps_v < 1e-14 * scale) {
    st.degenerate = true;
    st.evec_v = Vector2cd::UnitX();
    st.evec_c = Vector2cd::UnitY();
    return st;
  }
  st.evec_v = solver.eigenvectors().col(0);
  st.evec_c = solver.eigenvectors().col(1);
  fix_gauge(st.evec_v);
  fix_gauge(st.evec_c);
  return st;
}

BandState band_state(const Lattice& lat, double t_hop, const Vector2d& p) {
  const std::complex<double> f = structure_factor(lat, p);
  const double mag = std::abs(f);
  const double half_gap = std::abs(t_hop) * mag;
  if (half_gap < 1e-14 * std::max(1.0, std::abs(t_hop))) return eigensystem(hamiltonian_k(lat, t_hop, p), p);

  BandState st;
  st.p = p;
  st.eps_v = -half_gap;
  st.eps_c = half_gap;
  const std::complex<double> phase = std::conj(f) / mag;  // exp(-i arg f)
  const double r = 1.0 / std::sqrt(2.0);
  const Vector2cd minus(r, -r * phase), plus(r, r * phase);
  st.evec_v = t_hop > 0 ? minus : plus;
  st.evec_c = t_hop > 0 ? plus : minus;
  return st;
}

Vector2cd interband_coupling(const Lattice& lat, double t_hop, const Vector2d& p, double dp) {
  if (!(dp > 0)) throw DomainError("graphene_model", "interband_coupling: step must be positive");
  const BandState centre = eigensystem(hamiltonian_k(lat, t_hop, p), p);
  const double gap_floor = 1e-8 * std::abs(t_hop);
  if (centre.eps_c - centre.eps_v < gap_floor)
    throw DomainError("graphene_model", "interband_coupling: p is at a Dirac point (coupling is singular)");

  const auto aligned_valence = [&](const Vector2d& q) {
    const BandState st = eigensystem(hamiltonian_k(lat, t_hop, q), q);
    if (st.eps_c - st.eps_v < gap_floor)
      throw DomainError("graphene_model", "interband_coupling: stencil touches a Dirac point; reduce dp");
    Vector2cd v = st.evec_v;
    const std::complex<double> overlap = centre.evec_v.dot(v);
    return Vector2cd(v * (std::conj(overlap) / std::abs(overlap)));
  };

  Vector2cd d;
  for (int axis = 0; axis < 2; ++axis) {
    const Vector2d step = dp * Vector2d::Unit(axis);
    const Vector2cd deriv = (aligned_valence(p + step) - aligned_valence(p - step)) / (2.0 * dp);
    d(axis) = I * centre.evec_c.dot(deriv);
  }
  return d;
}

Vector2d interband_coupling_exact(const Lattice& lat, const Vector2d& p) {
  const std::complex<double> f = structure_factor(lat, p);
  const double mag2 = std::norm(f);
  if (mag2 < 1e-28) throw DomainError("graphene_model", "interband_coupling_exact: p is at a Dirac point");
  const Vector2cd grad = structure_factor_gradient(lat, p);
  // grad arg f = Im(conj(f) grad f) / |f|^2
  Vector2d grad_phase((std::conj(f) * grad(0)).imag(), (std::conj(f) * grad(1)).imag());
  return -0.5 * grad_phase / mag2;
}

KGrid make_kgrid(const Lattice& lat, int nk, const Vector2d& offset) {
  if (nk < 2 || nk % 2 != 0) throw DomainError("graphene_model", "k-grid size must be even and >= 2");
  KGrid grid;
  grid.nk = nk;
  grid.weight = 1.0 / (double(nk) * nk);
  grid.points.reserve(static_cast<std::size_t>(nk) * nk);
  for (int j = 0; j < nk; ++j)
    for (int i = 0; i < nk; ++i)
      grid.points.push_back(offset + (i + 0.5) / nk * lat.b1 + double(j) / nk * lat.b2);
  return grid;
}

}  // namespace trdiff::graphene
