#pragma once

// Dirac algebra in natural units with the electron mass set to one: gamma
// matrices (Dirac representation), on-shell spinors with covariant
// normalization, spinor bilinears, and the momentum-space interaction tensor
// that selects Coulomb and transverse-current couplings.

#include <array>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "trdiff/errors.hpp"

namespace trdiff::dirac {

template <typename Scalar>
using Matrix4c = Eigen::Matrix<std::complex<Scalar>, 4, 4>;
template <typename Scalar>
using Vector4c = Eigen::Matrix<std::complex<Scalar>, 4, 1>;
template <typename Scalar>
using RowVector4c = Eigen::Matrix<std::complex<Scalar>, 1, 4>;
template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix4 = Eigen::Matrix<Scalar, 4, 4>;

inline constexpr double electron_mass = 1.0;

// Metric signature (+,-,-,-).
template <typename Scalar = double>
constexpr Scalar metric(int mu, int nu) {
  if (mu != nu) return Scalar(0);
  return mu == 0 ? Scalar(1) : Scalar(-1);
}

enum class Spin { up, down };  // +1/2, -1/2 along z in the rest frame

inline constexpr std::array<Spin, 2> both_spins{Spin::up, Spin::down};

template <typename Scalar = double>
struct FourVector {
  Scalar e{};
  Scalar kx{};
  Scalar ky{};
  Scalar kz{};

  static FourVector on_shell(Scalar kx, Scalar ky, Scalar kz, Scalar mass = Scalar(electron_mass)) {
    using std::sqrt;
    return FourVector{sqrt(kx * kx + ky * ky + kz * kz + mass * mass), kx, ky, kz};
  }
  static FourVector on_shell(const Vector3<Scalar>& k, Scalar mass = Scalar(electron_mass)) {
    return on_shell(k.x(), k.y(), k.z(), mass);
  }

  // Contravariant component k^mu.
  Scalar operator[](int mu) const {
    switch (mu) {
      case 0: return e;
      case 1: return kx;
      case 2: return ky;
      default: return kz;
    }
  }
  // Covariant component k_mu.
  Scalar lower(int mu) const { return metric<Scalar>(mu, mu) * (*this)[mu]; }

  Vector3<Scalar> spatial() const { return Vector3<Scalar>(kx, ky, kz); }

  bool is_on_shell(Scalar mass = Scalar(electron_mass), Scalar rel_tol = Scalar(1e-12)) const {
    using std::abs, std::sqrt;
    const Scalar expected = sqrt(kx * kx + ky * ky + kz * kz + mass * mass);
    return abs(e - expected) <= rel_tol * expected;
  }
};

template <typename Scalar = double>
struct GammaSet {
  std::array<Matrix4c<Scalar>, 4> g;

  const Matrix4c<Scalar>& operator[](int mu) const { return g[static_cast<std::size_t>(mu)]; }
};

template <typename Scalar = double>
GammaSet<Scalar> gamma_matrices() {
  using C = std::complex<Scalar>;
  const C i(0, 1);
  Eigen::Matrix<C, 2, 2> sx, sy, sz;
  sx << 0, 1, 1, 0;
  sy << 0, -i, i, 0;
  sz << 1, 0, 0, -1;
  const std::array<Eigen::Matrix<C, 2, 2>, 3> pauli{sx, sy, sz};

  GammaSet<Scalar> set;
  set.g[0].setZero();
  set.g[0].diagonal() << C(1), C(1), C(-1), C(-1);
  for (int k = 0; k < 3; ++k) {
    auto& g = set.g[static_cast<std::size_t>(k + 1)];
    g.setZero();
    g.template block<2, 2>(0, 2) = pauli[static_cast<std::size_t>(k)];
    g.template block<2, 2>(2, 0) = -pauli[static_cast<std::size_t>(k)];
  }
  return set;
}

// gamma^mu k_mu
template <typename Scalar>
Matrix4c<Scalar> slash(const FourVector<Scalar>& k, const GammaSet<Scalar>& gamma = gamma_matrices<Scalar>()) {
  Matrix4c<Scalar> out = Matrix4c<Scalar>::Zero();
  for (int mu = 0; mu < 4; ++mu) out += gamma[mu] * std::complex<Scalar>(k.lower(mu));
  return out;
}

template <typename Scalar = double>
struct DiracSpinor {
  Vector4c<Scalar> c;
  FourVector<Scalar> momentum;
  Spin spin = Spin::up;

  // u-bar = u^dagger gamma^0
  RowVector4c<Scalar> adjoint() const {
    RowVector4c<Scalar> out = c.adjoint();
    out.template tail<2>() *= Scalar(-1);
    return out;
  }
};

// Positive-energy spinor u(k, sigma) with u-bar u = 2m. Spin is quantized
// along z in the rest frame and boosted along k.
template <typename Scalar>
DiracSpinor<Scalar> dirac_spinor(const FourVector<Scalar>& k, Spin spin) {
  using C = std::complex<Scalar>;
  using std::sqrt;
  if (!k.is_on_shell()) {
    throw DomainError("dirac_algebra", "dirac_spinor: momentum is off-shell (E=" + std::to_string(double(k.e)) +
                                           ", |k|^2+m^2 mismatch)");
  }
  const Scalar m = Scalar(electron_mass);
  const Scalar norm = sqrt(k.e + m);
  Eigen::Matrix<C, 2, 1> chi;
  chi << (spin == Spin::up ? C(1) : C(0)), (spin == Spin::up ? C(0) : C(1));
  // (sigma . k) chi
  Eigen::Matrix<C, 2, 2> sigma_k;
  sigma_k << C(k.kz), C(k.kx, -k.ky), C(k.kx, k.ky), C(-k.kz);

  DiracSpinor<Scalar> u;
  u.momentum = k;
  u.spin = spin;
  u.c.template head<2>() = norm * chi;
  u.c.template tail<2>() = (sigma_k * chi) / norm;
  return u;
}

// u-bar(k2, s2) gamma^nu u(k1, s1)
template <typename Scalar>
std::complex<Scalar> spinor_bilinear(const FourVector<Scalar>& k2, Spin s2, int nu, const FourVector<Scalar>& k1,
                                     Spin s1, const GammaSet<Scalar>& gamma = gamma_matrices<Scalar>()) {
  const auto u2 = dirac_spinor(k2, s2);
  const auto u1 = dirac_spinor(k1, s1);
  return (u2.adjoint() * gamma[nu] * u1.c)(0, 0);
}

// Exact spin sum over the intermediate (scattered) state:
//   sum_s u-bar(k_in,s2) gamma^nu u(k_s,s) u-bar(k_s,s) gamma^alpha u(k_in,s1)
template <typename Scalar>
std::complex<Scalar> contraction_sum(const FourVector<Scalar>& k_in, Spin s1, Spin s2, const FourVector<Scalar>& k_s,
                                     int nu, int alpha, const GammaSet<Scalar>& gamma = gamma_matrices<Scalar>()) {
  const auto u_in1 = dirac_spinor(k_in, s1);
  const auto u_in2 = dirac_spinor(k_in, s2);
  std::complex<Scalar> total(0);
  for (Spin s : both_spins) {
    const auto us = dirac_spinor(k_s, s);
    const auto left = (u_in2.adjoint() * gamma[nu] * us.c)(0, 0);
    const auto right = (us.adjoint() * gamma[alpha] * u_in1.c)(0, 0);
    total += left * right;
  }
  return total;
}

// Small-momentum-transfer approximation of contraction_sum: 4 k^nu k^alpha delta_{s1 s2}.
template <typename Scalar>
Scalar small_transfer_contraction(const FourVector<Scalar>& k_in, Spin s1, Spin s2, int nu, int alpha) {
  return s1 == s2 ? Scalar(4) * k_in[nu] * k_in[alpha] : Scalar(0);
}

template <typename Scalar = double>
struct DTildeKernel {
  Vector3<Scalar> s;
  Matrix4<Scalar> entries;

  Scalar operator()(int mu, int nu) const { return entries(mu, nu); }
  auto spatial_block() const { return entries.template block<3, 3>(1, 1); }
};

// 1 for (0,0); s_mu s_nu / |s|^2 - delta_mu_nu on the spatial block; 0 on mixed entries.
template <typename Scalar>
DTildeKernel<Scalar> dtilde(const Vector3<Scalar>& s) {
  const Scalar norm2 = s.squaredNorm();
  if (!(std::sqrt(norm2) > Scalar(1e-12))) {
    throw DomainError("dirac_algebra", "dtilde: |s| = 0 (forward scattering is excluded)");
  }
  DTildeKernel<Scalar> d;
  d.s = s;
  d.entries.setZero();
  d.entries(0, 0) = Scalar(1);
  d.entries.template block<3, 3>(1, 1) = s * s.transpose() / norm2 - Eigen::Matrix<Scalar, 3, 3>::Identity();
  return d;
}

using FourVectord = FourVector<double>;
using GammaSetd = GammaSet<double>;
using DiracSpinord = DiracSpinor<double>;
using DTildeKerneld = DTildeKernel<double>;

}  // namespace trdiff::dirac
