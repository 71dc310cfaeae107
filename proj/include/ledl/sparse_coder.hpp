#pragma once

#include <Eigen/Cholesky>

#include "ledl/types.hpp"

namespace ledl {

/// Cached Cholesky factorization of a symmetric positive definite system.
/// Built once per outer iteration and reused for all sample columns; must be
/// rebuilt whenever any of the bases change.
class SystemFactorization {
public:
  /// Throws numeric_error naming the failing pivot when gram is not SPD.
  explicit SystemFactorization(const Matrix& gram);

  Matrix solve(const Matrix& rhs) const;
  Index size() const { return llt_.matrixLLT().rows(); }

private:
  Eigen::LLT<Matrix> llt_;
};

/// One-shot SPD solve: factorize gram and solve gram * result = rhs.
Matrix solve_spd(const Matrix& gram, const Matrix& rhs);

/// The K x K code system  Bt B + lambda Wt W + omega At A + rho I.
Matrix code_gram(const Matrix& dictionary, const Matrix& classifier,
                 const Matrix& transform, const HyperParams& params);

/// Right-hand side  Bt X + lambda Wt H + omega At Q + rho Z - L.
Matrix code_rhs(const Matrix& features, const Matrix& label_matrix,
                const Matrix& discriminative, const Matrix& dictionary,
                const Matrix& classifier, const Matrix& transform,
                const Matrix& auxiliary, const Matrix& multiplier,
                const HyperParams& params);

/// Closed-form code update using a prebuilt factorization of code_gram.
Matrix update_codes(const SystemFactorization& system, const Matrix& features,
                    const Matrix& label_matrix, const Matrix& discriminative,
                    const Matrix& dictionary, const Matrix& classifier,
                    const Matrix& transform, const Matrix& auxiliary,
                    const Matrix& multiplier, const HyperParams& params);

/// Convenience overload that factorizes the system internally.
Matrix update_codes(const Matrix& features, const Matrix& label_matrix,
                    const Matrix& discriminative, const Matrix& dictionary,
                    const Matrix& classifier, const Matrix& transform,
                    const Matrix& auxiliary, const Matrix& multiplier,
                    const HyperParams& params);

/// Elementwise sign(v) * max(|v| - threshold, 0), the exact proximal
/// operator of threshold * ||.||_1.
Matrix soft_threshold(const Matrix& values, double threshold);

/// Auxiliary update: soft threshold of C + L / rho at epsilon / rho.
Matrix update_auxiliary(const Matrix& codes, const Matrix& multiplier,
                        double epsilon, double rho);

/// Dual ascent: L + theta * (C - Z).
Matrix update_multiplier(const Matrix& multiplier, const Matrix& codes,
                         const Matrix& auxiliary, double theta);

struct EncodeResult {
  Vector code;
  bool converged = false;
  int iterations = 0;
  double kkt_residual = 0.0;
};

/// l1 encoder for a single sample: approximately minimizes
/// ||y - B s||^2 + 2 epsilon ||s||_1 with the same ADMM machinery as
/// training (label and discriminative terms switched off, dual step held at
/// theta0). Stops once the KKT residual drops below kkt_tol; otherwise
/// returns the best iterate seen with converged = false.
EncodeResult encode_l1(const Matrix& dictionary, const Vector& sample,
                       double epsilon, double rho = 1.0, double theta0 = 0.5,
                       int max_iter = 2000, double kkt_tol = 1e-6);

double lasso_objective(const Matrix& dictionary, const Vector& sample,
                       const Vector& code, double epsilon);

/// Max stationarity violation of ||y - B s||^2 + 2 epsilon ||s||_1 at code:
/// off the support, max(|2 Bk' (B s - y)| - 2 epsilon, 0); on the support,
/// |2 Bk' (B s - y) + 2 epsilon sign(s_k)|.
double lasso_kkt_residual(const Matrix& dictionary, const Vector& sample,
                          const Vector& code, double epsilon);

} // namespace ledl
