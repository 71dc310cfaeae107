#include "ledl/dictionary_updater.hpp"

#include <iostream>

namespace ledl {

namespace {

// Shared column update: all three bases follow the same residual-correlation
// rule against their own target matrix.
bool update_column(Matrix& bases, const Matrix& target, const Matrix& codes,
                   const Matrix& gram_offdiag, Index k, const char* what) {
  if (k < 0 || k >= bases.cols()) {
    throw shape_error("update_column: column index out of range");
  }
  if (target.rows() != bases.rows() || target.cols() != codes.cols() ||
      codes.rows() != bases.cols() || gram_offdiag.rows() != codes.rows() ||
      gram_offdiag.cols() != codes.rows()) {
    throw shape_error("update_column: dimension mismatch");
  }

  Vector numerator = target * codes.row(k).transpose();
  numerator.noalias() -= bases * gram_offdiag.col(k);
  const double norm = numerator.norm();
  if (norm == 0.0) {
    std::cerr << "warning: degenerate " << what << " atom " << k
              << " kept unchanged\n";
    return false;
  }
  bases.col(k) = numerator / norm;
  return true;
}

} // namespace

Matrix offdiag_gram(const Matrix& codes) {
  Matrix gram = codes * codes.transpose();
  gram.diagonal().setZero();
  return gram;
}

bool update_basis_column(Matrix& dictionary, const Matrix& features,
                         const Matrix& codes, const Matrix& gram_offdiag,
                         Index k) {
  return update_column(dictionary, features, codes, gram_offdiag, k,
                       "dictionary");
}

bool update_classifier_column(Matrix& classifier, const Matrix& label_matrix,
                              const Matrix& codes, const Matrix& gram_offdiag,
                              Index k) {
  return update_column(classifier, label_matrix, codes, gram_offdiag, k,
                       "classifier");
}

bool update_transform_column(Matrix& transform, const Matrix& discriminative,
                             const Matrix& codes, const Matrix& gram_offdiag,
                             Index k) {
  return update_column(transform, discriminative, codes, gram_offdiag, k,
                       "transform");
}

int sweep_columns(Matrix& bases, const Matrix& target, const Matrix& codes,
                  const Matrix& gram_offdiag) {
  int degenerate = 0;
  for (Index k = 0; k < bases.cols(); ++k) {
    if (!update_column(bases, target, codes, gram_offdiag, k, "swept")) {
      ++degenerate;
    }
  }
  return degenerate;
}

} // namespace ledl
