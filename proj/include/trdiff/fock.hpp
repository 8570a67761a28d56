#pragma once

// Truncated bosonic and fermionic number-state bases with sparse ladder
// operators.

#include <complex>
#include <vector>

#include <Eigen/SparseCore>

namespace trdiff::fock {

enum class Statistics { boson, fermion };
enum class LadderKind { create, annihilate };

using SparseMatrix = Eigen::SparseMatrix<std::complex<double>>;

// Occupation-number basis over `num_modes` modes with per-mode cap
// `max_occ`. States are enumerated lexicographically with mode 0 the most
// significant digit; fermionic sign strings follow the same mode order.
class ModeBasis {
public:
  ModeBasis(int num_modes, int max_occ, Statistics statistics);

  int num_modes() const { return num_modes_; }
  int max_occ() const { return max_occ_; }
  Statistics statistics() const { return statistics_; }
  long dimension() const { return dimension_; }

  long index(const std::vector<int>& occupations) const;
  std::vector<int> occupations(long index) const;

private:
  int num_modes_;
  int max_occ_;
  Statistics statistics_;
  long dimension_;
};

struct LadderOperator {
  int mode = 0;
  LadderKind kind = LadderKind::annihilate;
  SparseMatrix matrix;
};

LadderOperator build_ladder(const ModeBasis& basis, int mode, LadderKind kind);

// max |([a_i, a_j^dagger] - delta_ij) applied to basis states|, split into
// states with n_i < max_occ (interior) and the truncation rung n_i = max_occ.
struct CommutatorResidual {
  double interior = 0;
  double boundary = 0;
};
CommutatorResidual commutator_check(const ModeBasis& basis, int i, int j);

// max |{b_i, b_j^dagger} - delta_ij| and max |{b_i, b_j}| over the full basis.
struct AnticommutatorResidual {
  double creation_pair = 0;
  double annihilation_pair = 0;
};
AnticommutatorResidual anticommutator_check(const ModeBasis& basis, int i, int j);

// <n-1, 1_s| a_in a_s^dagger + a_s^dagger a_in |n, 0_s> evaluated by sparse
// matrix application on a two-mode bosonic basis truncated at max_occ.
double xray_transition_element(int n_in, int max_occ);

// Largest number of stored nonzeros in any column.
long max_nonzeros_per_column(const SparseMatrix& m);

}  // namespace trdiff::fock
