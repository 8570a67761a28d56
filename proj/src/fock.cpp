#include "trdiff/fock.hpp"

#include <cmath>
#include <string>

#include "trdiff/errors.hpp"

namespace trdiff::fock {

namespace {

double max_abs(const SparseMatrix& m) {
  double out = 0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) out = std::max(out, std::abs(it.value()));
  return out;
}

SparseMatrix identity(long dim) {
  SparseMatrix id(dim, dim);
  id.setIdentity();
  return id;
}

}  // namespace

ModeBasis::ModeBasis(int num_modes, int max_occ, Statistics statistics)
    : num_modes_(num_modes), max_occ_(max_occ), statistics_(statistics), dimension_(1) {
  if (num_modes < 1) throw DomainError("fock_algebra", "ModeBasis: need at least one mode");
  if (max_occ < 1) throw DomainError("fock_algebra", "ModeBasis: max_occ must be >= 1");
  if (statistics == Statistics::fermion && max_occ != 1)
    throw DomainError("fock_algebra", "ModeBasis: fermionic modes require max_occ = 1");
  for (int m = 0; m < num_modes; ++m) dimension_ *= (max_occ + 1);
}

long ModeBasis::index(const std::vector<int>& occupations) const {
  if (static_cast<int>(occupations.size()) != num_modes_)
    throw DomainError("fock_algebra", "ModeBasis::index: wrong number of occupations");
  long idx = 0;
  for (int n : occupations) {
    if (n < 0 || n > max_occ_) throw DomainError("fock_algebra", "ModeBasis::index: occupation out of range");
    idx = idx * (max_occ_ + 1) + n;
  }
  return idx;
}

std::vector<int> ModeBasis::occupations(long index) const {
  std::vector<int> occ(static_cast<std::size_t>(num_modes_));
  for (int m = num_modes_ - 1; m >= 0; --m) {
    occ[static_cast<std::size_t>(m)] = static_cast<int>(index % (max_occ_ + 1));
    index /= (max_occ_ + 1);
  }
  return occ;
}

LadderOperator build_ladder(const ModeBasis& basis, int mode, LadderKind kind) {
  if (mode < 0 || mode >= basis.num_modes())
    throw DomainError("fock_algebra", "build_ladder: mode " + std::to_string(mode) + " out of range");

  std::vector<Eigen::Triplet<std::complex<double>>> triplets;
  triplets.reserve(static_cast<std::size_t>(basis.dimension()));
  const bool fermion = basis.statistics() == Statistics::fermion;

  for (long col = 0; col < basis.dimension(); ++col) {
    auto occ = basis.occupations(col);
    int& n = occ[static_cast<std::size_t>(mode)];
    const int target = kind == LadderKind::create ? n + 1 : n - 1;
    if (target < 0 || target > basis.max_occ()) continue;

    double amplitude = kind == LadderKind::create ? std::sqrt(double(n + 1)) : std::sqrt(double(n));
    if (fermion) {
      int parity = 0;
      for (int j = 0; j < mode; ++j) parity += occ[static_cast<std::size_t>(j)];
      amplitude = (parity % 2 == 0) ? 1.0 : -1.0;
    }
    n = target;
    triplets.emplace_back(basis.index(occ), col, amplitude);
  }

  LadderOperator op;
  op.mode = mode;
  op.kind = kind;
  op.matrix.resize(basis.dimension(), basis.dimension());
  op.matrix.setFromTriplets(triplets.begin(), triplets.end());
  op.matrix.makeCompressed();
  return op;
}

CommutatorResidual commutator_check(const ModeBasis& basis, int i, int j) {
  if (basis.statistics() != Statistics::boson)
    throw DomainError("fock_algebra", "commutator_check requires a bosonic basis");
  const SparseMatrix a_i = build_ladder(basis, i, LadderKind::annihilate).matrix;
  const SparseMatrix ad_j = build_ladder(basis, j, LadderKind::create).matrix;
  SparseMatrix residual = SparseMatrix(a_i * ad_j) - SparseMatrix(ad_j * a_i);
  if (i == j) residual -= identity(basis.dimension());

  CommutatorResidual out;
  for (int col = 0; col < residual.outerSize(); ++col) {
    const bool on_boundary = basis.occupations(col)[static_cast<std::size_t>(i)] == basis.max_occ();
    for (SparseMatrix::InnerIterator it(residual, col); it; ++it) {
      double& slot = on_boundary ? out.boundary : out.interior;
      slot = std::max(slot, std::abs(it.value()));
    }
  }
  return out;
}

AnticommutatorResidual anticommutator_check(const ModeBasis& basis, int i, int j) {
  if (basis.statistics() != Statistics::fermion)
    throw DomainError("fock_algebra", "anticommutator_check requires a fermionic basis");
  const SparseMatrix b_i = build_ladder(basis, i, LadderKind::annihilate).matrix;
  const SparseMatrix b_j = build_ladder(basis, j, LadderKind::annihilate).matrix;
  const SparseMatrix bd_j = build_ladder(basis, j, LadderKind::create).matrix;

  SparseMatrix mixed = SparseMatrix(b_i * bd_j) + SparseMatrix(bd_j * b_i);
  if (i == j) mixed -= identity(basis.dimension());
  const SparseMatrix pair = SparseMatrix(b_i * b_j) + SparseMatrix(b_j * b_i);
  return {max_abs(mixed), max_abs(pair)};
}

double xray_transition_element(int n_in, int max_occ) {
  if (n_in < 1) throw DomainError("fock_algebra", "xray_transition_element: n_in must be >= 1");
  if (n_in > max_occ)
    throw DomainError("fock_algebra", "xray_transition_element: n_in=" + std::to_string(n_in) +
                                          " exceeds truncation max_occ=" + std::to_string(max_occ));
  const ModeBasis basis(2, max_occ, Statistics::boson);
  const SparseMatrix a_in = build_ladder(basis, 0, LadderKind::annihilate).matrix;
  const SparseMatrix ad_s = build_ladder(basis, 1, LadderKind::create).matrix;
  const SparseMatrix op = SparseMatrix(a_in * ad_s) + SparseMatrix(ad_s * a_in);

  Eigen::VectorXcd initial = Eigen::VectorXcd::Zero(basis.dimension());
  initial(basis.index({n_in, 0})) = 1.0;
  const Eigen::VectorXcd final_state = op * initial;
  return final_state(basis.index({n_in - 1, 1})).real();
}

long max_nonzeros_per_column(const SparseMatrix& m) {
  long out = 0;
  for (int k = 0; k < m.outerSize(); ++k) {
    long count = 0;
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) ++count;
    out = std::max(out, count);
  }
  return out;
}

}  // namespace trdiff::fock
