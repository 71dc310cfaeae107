#pragma once

#include "ledl/types.hpp"

namespace ledl {

/// Code Gram matrix C Ct with the diagonal zeroed. Computed once per outer
/// iteration; lets a column update exclude its own atom in one product.
Matrix offdiag_gram(const Matrix& codes);

/// Replaces column k of bases with the normalized residual correlation
///   normalize(target * codes.row(k)' - bases * gram_offdiag.col(k)).
/// Columns updated earlier in the sweep are already visible (Gauss-Seidel).
/// A zero numerator keeps the previous column and returns false after
/// logging a degenerate-atom warning.
bool update_basis_column(Matrix& dictionary, const Matrix& features,
                         const Matrix& codes, const Matrix& gram_offdiag,
                         Index k);

bool update_classifier_column(Matrix& classifier, const Matrix& label_matrix,
                              const Matrix& codes, const Matrix& gram_offdiag,
                              Index k);

bool update_transform_column(Matrix& transform, const Matrix& discriminative,
                             const Matrix& codes, const Matrix& gram_offdiag,
                             Index k);

/// Full Gauss-Seidel sweep k = 0..K-1 over one basis matrix. Returns the
/// number of degenerate (kept) columns.
int sweep_columns(Matrix& bases, const Matrix& target, const Matrix& codes,
                  const Matrix& gram_offdiag);

} // namespace ledl
