#pragma once

#include "ilat/hilbert.hpp"

#include <Eigen/Sparse>

#include <vector>

namespace ilat {

using SparseMat = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

// Operator restricted to a basis. Immutable once built.
class SparseOperator {
 public:
  SparseOperator(BasisPtr basis, SparseMat matrix);

  const SectorBasis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  const SparseMat& matrix() const { return matrix_; }
  std::size_t dim() const { return basis_->dim(); }

  Vec apply(const Vec& v) const { return matrix_ * v; }
  double expectation(const StateVector& state) const;
  // <psi|A^2|psi> = ||A psi||^2 for Hermitian A.
  double expectation_of_square(const StateVector& state) const;
  // max |A - A^dag| over entries.
  double hermiticity_defect() const;
  Mat dense() const { return Mat(matrix_); }

 private:
  BasisPtr basis_;
  SparseMat matrix_;
};

// coefficient * ops[0] * ops[1] * ...
struct PauliTerm {
  cplx coefficient;
  std::vector<PauliOp> ops;
};

// Sums Pauli terms into a sparse matrix on the basis. Terms whose image leaves
// a restricted sector raise SectorEscapeError.
SparseOperator assemble(const BasisPtr& basis, const std::vector<PauliTerm>& terms);

}  // namespace ilat
