#include "ilat/sparse_operator.hpp"

#include "ilat/errors.hpp"

#include <algorithm>
#include <string>

namespace ilat {

SparseOperator::SparseOperator(BasisPtr basis, SparseMat matrix)
    : basis_(std::move(basis)), matrix_(std::move(matrix)) {
  const auto d = static_cast<Eigen::Index>(basis_->dim());
  if (matrix_.rows() != d || matrix_.cols() != d) {
    throw ShapeMismatchError("operator shape does not match basis dimension " + std::to_string(d));
  }
  matrix_.makeCompressed();
}

double SparseOperator::expectation(const StateVector& state) const {
  return state.amplitudes().dot(matrix_ * state.amplitudes()).real();
}

double SparseOperator::expectation_of_square(const StateVector& state) const {
  return (matrix_ * state.amplitudes()).squaredNorm();
}

double SparseOperator::hermiticity_defect() const {
  const SparseMat adjoint = matrix_.adjoint();
  const SparseMat diff = matrix_ - adjoint;
  double worst = 0.0;
  for (Eigen::Index k = 0; k < diff.outerSize(); ++k) {
    for (SparseMat::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

SparseOperator assemble(const BasisPtr& basis, const std::vector<PauliTerm>& terms) {
  std::vector<Eigen::Triplet<cplx>> triplets;
  for (std::size_t col = 0; col < basis->dim(); ++col) {
    for (const auto& term : terms) {
      auto image = apply_pauli_string(basis->config(col), term.ops, basis->sites());
      if (!image) continue;
      auto row = basis->index_of(image->first);
      if (!row) throw SectorEscapeError("operator term leaves the magnetization sector");
      triplets.emplace_back(static_cast<int>(*row), static_cast<int>(col),
                            term.coefficient * image->second);
    }
  }
  const auto d = static_cast<Eigen::Index>(basis->dim());
  SparseMat m(d, d);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.prune(cplx{0.0, 0.0});
  return SparseOperator(basis, std::move(m));
}

}  // namespace ilat
