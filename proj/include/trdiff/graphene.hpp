#pragma once

// Two-band nearest-neighbour tight-binding graphene with C-C bonds along x:
// lattice geometry, Bloch eigensystem, interband couplings, real-space band
// matrix elements of density and current, and their Fourier transforms at
// Bragg vectors. Atomic units throughout.

#include <array>
#include <complex>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace trdiff::graphene {

using Eigen::Matrix2cd;
using Eigen::Vector2cd;
using Eigen::Vector2d;

struct Lattice {
  double a = 0;  // lattice constant
  Vector2d a1, a2;
  Vector2d b1, b2;
  Vector2d r_a, r_b;             // sublattice offsets
  std::array<Vector2d, 3> delta;  // A -> B nearest-neighbour vectors, delta[0] along +x

  // Bond delta[0] = (a/sqrt3, 0); a1 = delta0 - delta1, a2 = delta0 - delta2.
  static Lattice make(double a);

  double cell_area() const;
  Vector2d sublattice(int s) const { return s == 0 ? r_a : r_b; }
  Vector2d dirac_point() const;  // K = (2 b1 + b2) / 3
};

// f(p) = sum_i exp(i p . delta_i) and its gradient.
std::complex<double> structure_factor(const Lattice& lat, const Vector2d& p);
Vector2cd structure_factor_gradient(const Lattice& lat, const Vector2d& p);

// [[0, t f(p)], [t f*(p), 0]] in the (A, B) sublattice basis.
Matrix2cd hamiltonian_k(const Lattice& lat, double t_hop, const Vector2d& p);

// Band index 0 is the valence band, 1 the conduction band.
struct BandState {
  Vector2d p = Vector2d::Zero();
  double eps_v = 0, eps_c = 0;
  Vector2cd evec_v, evec_c;  // gauge: first nonzero component real and >= 0
  bool degenerate = false;   // eigenvectors fell back to coordinate axes

  double energy(int band) const { return band == 0 ? eps_v : eps_c; }
  const Vector2cd& evec(int band) const { return band == 0 ? evec_v : evec_c; }
  Matrix2cd basis() const;  // columns (v, c)
};

// Eigensystem of a 2x2 Hermitian matrix with ordered, gauge-fixed eigenvectors.
BandState eigensystem(const Matrix2cd& h, const Vector2d& p = Vector2d::Zero());

// Closed-form band state for the graphene Hamiltonian (same gauge as eigensystem).
BandState band_state(const Lattice& lat, double t_hop, const Vector2d& p);

// d_cv(p) = i <u_c(p)| grad_p u_v(p)> by central differences of step dp, with
// the neighbouring eigenvectors phase-aligned to the centre point.
Vector2cd interband_coupling(const Lattice& lat, double t_hop, const Vector2d& p, double dp);

// Closed form of the same quantity in this gauge: -grad_p arg f(p) / 2. The
// intraband connections d_vv and d_cc are both +grad arg f / 2 here, so they
// cancel in any commutator.
Vector2d interband_coupling_exact(const Lattice& lat, const Vector2d& p);

// nk x nk grid with fractional coordinates ((i + 1/2)/nk, j/nk) along (b1, b2).
// The half step along b1 keeps every point, and every line through a point
// parallel to x or y, off K and K' for any nk; `offset` is added to every point.
struct KGrid {
  int nk = 0;
  std::vector<Vector2d> points;
  double weight = 0;  // 1 / nk^2
};
KGrid make_kgrid(const Lattice& lat, int nk, const Vector2d& offset = Vector2d::Zero());

// Real-space atomic orbital. `width` is the length scale used for grid
// resolution checks; beyond `cutoff` the profile is treated as zero.
struct OrbitalProfile {
  std::function<double(const Vector2d&)> value;
  std::function<Vector2d(const Vector2d&)> gradient;
  double width = 0;
  double cutoff = 0;
};
// Normalized 2D Gaussian: exp(-r^2 / (2 w^2)) / (sqrt(pi) w).
OrbitalProfile gaussian_orbital(double width);

// Uniform grid over one unit cell: r_ij = origin + (i/n) a1 + (j/n) a2.
// Orbitals are summed over `halo` rings of neighbouring cells.
struct CellGrid {
  int n = 0;
  int halo = 1;
  Vector2d origin = Vector2d::Zero();
  Vector2d a1, a2;
  std::vector<Vector2d> points;
  double weight = 0;  // cell area / n^2
};
CellGrid make_cell_grid(const Lattice& lat, int n, int halo, const Vector2d& origin = Vector2d::Zero());

// Throws DomainError when the grid cannot resolve exp(-i S.r).
void check_nyquist(const CellGrid& grid, const Vector2d& s);

// Samples the sublattice Bloch sums chi_s(p, r) = sum_R exp(i p.(R + r_s)) phi(r - R - r_s)
// and their gradients on a cell grid. Orbital tables are built once.
class BlochSampler {
public:
  BlochSampler(const Lattice& lat, const OrbitalProfile& orbital, const CellGrid& grid);

  struct Sums {
    std::array<Eigen::VectorXcd, 2> chi, dx, dy;
  };
  Sums sample(const Vector2d& p) const;

  const CellGrid& grid() const { return grid_; }
  const Lattice& lattice() const { return lattice_; }

private:
  Lattice lattice_;
  CellGrid grid_;
  struct Image {
    int sublattice;
    Vector2d site;  // R + r_s
    Eigen::VectorXd value, grad_x, grad_y;
  };
  std::vector<Image> images_;
};

// Band-resolved fields on the grid, index (f, n) -> f * 2 + n:
//   Q_fn = psi_f* psi_n,  J^x_fn = (1/2i)(psi_f* d_x psi_n - (d_x psi_f*) psi_n)
// with psi_n normalized to one over the cell.
struct CellFields {
  std::array<Eigen::VectorXcd, 4> q, jx, jy;

  const Eigen::VectorXcd& density(int f, int n) const { return q[static_cast<std::size_t>(2 * f + n)]; }
  const Eigen::VectorXcd& current_x(int f, int n) const { return jx[static_cast<std::size_t>(2 * f + n)]; }
  const Eigen::VectorXcd& current_y(int f, int n) const { return jy[static_cast<std::size_t>(2 * f + n)]; }
};
CellFields cell_matrix_elements(const BlochSampler& sampler, const BandState& state);
CellFields cell_matrix_elements(const Lattice& lat, const BandState& state, const OrbitalProfile& orbital,
                                const CellGrid& grid);

// S = h b1 + k b2
Vector2d bragg_vector(const Lattice& lat, int h, int k);

struct Spot {
  int h = 1, k = 1;
  Vector2d s = Vector2d::Zero();
  std::string label() const;  // e.g. "1_-1"
};
Spot make_spot(const Lattice& lat, int h, int k);

// F_S[g] = sum over the cell grid of g(r) exp(-i S.r) dA.
std::complex<double> fourier_at_bragg(const CellGrid& grid, const Eigen::VectorXcd& field, const Vector2d& s);

// F_S of the band matrix elements, indexed (f, n).
struct BandFormFactors {
  Matrix2cd q = Matrix2cd::Zero();
  Matrix2cd jx = Matrix2cd::Zero();
  Matrix2cd jy = Matrix2cd::Zero();
};

// Fast evaluation of BandFormFactors at arbitrary p. Bloch products are
// decomposed into two-centre pair integrals
//   G_{s s' L}(S) = int phi(r - r_s) O phi(r - L - r_s') exp(-i S.r) d^2r
// (O = 1 or the symmetrized current operator), computed once by quadrature on
// the cell grid; each p then only needs the phases exp(i p.(L + r_s' - r_s)).
class FormFactorEvaluator {
public:
  FormFactorEvaluator(const Lattice& lat, double t_hop, const OrbitalProfile& orbital, const CellGrid& grid,
                      const Vector2d& s);

  BandFormFactors at(const BandState& state) const;
  BandFormFactors at(const Vector2d& p) const { return at(band_state(lattice_, t_hop_, p)); }

  const Vector2d& bragg() const { return s_; }
  const Lattice& lattice() const { return lattice_; }
  double t_hop() const { return t_hop_; }

private:
  struct PairTerm {
    int s = 0, s2 = 0;
    Vector2d displacement;  // L + r_s' - r_s
    std::complex<double> q, jx, jy, norm;
  };
  Lattice lattice_;
  double t_hop_;
  Vector2d s_;
  std::vector<PairTerm> terms_;
};

// Form factors over (spot x k-point), evaluated at the grid momenta plus `shift`.
struct FormFactorTable {
  std::vector<Spot> spots;
  std::vector<Vector2d> kpoints;
  std::vector<std::vector<BandFormFactors>> entries;  // [spot][k]
};
FormFactorTable build_form_factor_table(const Lattice& lat, double t_hop, const KGrid& kgrid,
                                        const std::vector<Spot>& spots, const OrbitalProfile& orbital,
                                        const CellGrid& grid, const Vector2d& shift = Vector2d::Zero());

// CSV export: spot, component, f, n, kx, ky, re, im.
void write_form_factor_csv(const std::filesystem::path& path, const FormFactorTable& table,
                           const std::string& header_comment);

}  // namespace trdiff::graphene
