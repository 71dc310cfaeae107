#include "ledl/sparse_coder.hpp"

#include <cmath>
#include <sstream>

namespace ledl {

namespace {

// Locates the first nonpositive pivot of a failed Cholesky factorization so
// the error message can name it.
Index failing_pivot(const Matrix& gram) {
  const Index n = gram.rows();
  Matrix lower = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    const double d = gram(j, j) - lower.row(j).head(j).squaredNorm();
    if (d <= 0.0 || !std::isfinite(d)) {
      return j;
    }
    lower(j, j) = std::sqrt(d);
    for (Index i = j + 1; i < n; ++i) {
      lower(i, j) =
          (gram(i, j) - lower.row(j).head(j).dot(lower.row(i).head(j))) /
          lower(j, j);
    }
  }
  return n - 1;
}

void check_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream msg;
    msg << what << ": expected " << a.rows() << "x" << a.cols() << ", got "
        << b.rows() << "x" << b.cols();
    throw shape_error(msg.str());
  }
}

} // namespace

SystemFactorization::SystemFactorization(const Matrix& gram) {
  if (gram.rows() != gram.cols()) {
    throw shape_error("SystemFactorization: matrix is not square");
  }
  llt_.compute(gram);
  if (llt_.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "Cholesky factorization failed: nonpositive pivot at index "
        << failing_pivot(gram) << " of " << gram.rows();
    throw numeric_error(msg.str());
  }
}

Matrix SystemFactorization::solve(const Matrix& rhs) const {
  if (rhs.rows() != size()) {
    std::ostringstream msg;
    msg << "solve: rhs has " << rhs.rows() << " rows, system has " << size();
    throw shape_error(msg.str());
  }
  return llt_.solve(rhs);
}

Matrix solve_spd(const Matrix& gram, const Matrix& rhs) {
  return SystemFactorization(gram).solve(rhs);
}

Matrix code_gram(const Matrix& dictionary, const Matrix& classifier,
                 const Matrix& transform, const HyperParams& params) {
  const Index k = dictionary.cols();
  if (classifier.cols() != k || transform.cols() != k ||
      transform.rows() != k) {
    throw shape_error("code_gram: basis column counts disagree");
  }
  if (params.rho <= 0.0) {
    throw config_error("code_gram: rho must be positive");
  }
  Matrix gram = dictionary.transpose() * dictionary;
  gram.noalias() += params.lambda * (classifier.transpose() * classifier);
  gram.noalias() += params.omega * (transform.transpose() * transform);
  gram.diagonal().array() += params.rho;
  return gram;
}

Matrix code_rhs(const Matrix& features, const Matrix& label_matrix,
                const Matrix& discriminative, const Matrix& dictionary,
                const Matrix& classifier, const Matrix& transform,
                const Matrix& auxiliary, const Matrix& multiplier,
                const HyperParams& params) {
  if (features.rows() != dictionary.rows()) {
    throw shape_error("code_rhs: feature dimension does not match dictionary");
  }
  if (label_matrix.rows() != classifier.rows() ||
      label_matrix.cols() != features.cols()) {
    throw shape_error("code_rhs: label matrix shape mismatch");
  }
  if (discriminative.rows() != transform.rows() ||
      discriminative.cols() != features.cols()) {
    throw shape_error("code_rhs: discriminative codes shape mismatch");
  }
  check_same_shape(auxiliary, multiplier, "code_rhs auxiliary/multiplier");
  if (auxiliary.rows() != dictionary.cols() ||
      auxiliary.cols() != features.cols()) {
    throw shape_error("code_rhs: auxiliary shape mismatch");
  }

  Matrix rhs = dictionary.transpose() * features;
  rhs.noalias() += params.lambda * (classifier.transpose() * label_matrix);
  rhs.noalias() += params.omega * (transform.transpose() * discriminative);
  rhs += params.rho * auxiliary - multiplier;
  return rhs;
}

Matrix update_codes(const SystemFactorization& system, const Matrix& features,
                    const Matrix& label_matrix, const Matrix& discriminative,
                    const Matrix& dictionary, const Matrix& classifier,
                    const Matrix& transform, const Matrix& auxiliary,
                    const Matrix& multiplier, const HyperParams& params) {
  return system.solve(code_rhs(features, label_matrix, discriminative,
                               dictionary, classifier, transform, auxiliary,
                               multiplier, params));
}

Matrix update_codes(const Matrix& features, const Matrix& label_matrix,
                    const Matrix& discriminative, const Matrix& dictionary,
                    const Matrix& classifier, const Matrix& transform,
                    const Matrix& auxiliary, const Matrix& multiplier,
                    const HyperParams& params) {
  SystemFactorization system(
      code_gram(dictionary, classifier, transform, params));
  return update_codes(system, features, label_matrix, discriminative,
                      dictionary, classifier, transform, auxiliary, multiplier,
                      params);
}

Matrix soft_threshold(const Matrix& values, double threshold) {
  return (values.array() - threshold).max(0.0) +
         (values.array() + threshold).min(0.0);
}

Matrix update_auxiliary(const Matrix& codes, const Matrix& multiplier,
                        double epsilon, double rho) {
  if (rho <= 0.0) {
    throw config_error("update_auxiliary: rho must be positive");
  }
  check_same_shape(codes, multiplier, "update_auxiliary codes/multiplier");
  return soft_threshold(codes + multiplier / rho, epsilon / rho);
}

Matrix update_multiplier(const Matrix& multiplier, const Matrix& codes,
                         const Matrix& auxiliary, double theta) {
  if (theta <= 0.0) {
    throw config_error("update_multiplier: theta must be positive");
  }
  check_same_shape(codes, auxiliary, "update_multiplier codes/auxiliary");
  check_same_shape(codes, multiplier, "update_multiplier codes/multiplier");
  return multiplier + theta * (codes - auxiliary);
}

double lasso_objective(const Matrix& dictionary, const Vector& sample,
                       const Vector& code, double epsilon) {
  return (sample - dictionary * code).squaredNorm() +
         2.0 * epsilon * code.lpNorm<1>();
}

double lasso_kkt_residual(const Matrix& dictionary, const Vector& sample,
                          const Vector& code, double epsilon) {
  const Vector gradient =
      2.0 * (dictionary.transpose() * (dictionary * code - sample));
  double worst = 0.0;
  for (Index k = 0; k < code.size(); ++k) {
    double violation;
    if (code(k) == 0.0) {
      violation = std::max(std::abs(gradient(k)) - 2.0 * epsilon, 0.0);
    } else {
      const double sign = code(k) > 0.0 ? 1.0 : -1.0;
      violation = std::abs(gradient(k) + 2.0 * epsilon * sign);
    }
    worst = std::max(worst, violation);
  }
  return worst;
}

EncodeResult encode_l1(const Matrix& dictionary, const Vector& sample,
                       double epsilon, double rho, double theta0, int max_iter,
                       double kkt_tol) {
  if (sample.size() != dictionary.rows()) {
    throw shape_error("encode_l1: sample dimension does not match dictionary");
  }
  if (rho <= 0.0 || theta0 <= 0.0) {
    throw config_error("encode_l1: rho and theta0 must be positive");
  }

  const Index k = dictionary.cols();
  Matrix gram = dictionary.transpose() * dictionary;
  gram.diagonal().array() += rho;
  const SystemFactorization system(gram);
  const Vector correlation = dictionary.transpose() * sample;

  Vector codes = Vector::Zero(k);
  Vector auxiliary = Vector::Zero(k);
  Vector multiplier = Vector::Zero(k);

  EncodeResult result;
  result.code = auxiliary;
  double best_objective =
      lasso_objective(dictionary, sample, auxiliary, epsilon);
  result.kkt_residual =
      lasso_kkt_residual(dictionary, sample, auxiliary, epsilon);
  if (result.kkt_residual <= kkt_tol) {
    result.converged = true;
    return result;
  }

  for (int iter = 1; iter <= max_iter; ++iter) {
    codes = system.solve(correlation + rho * auxiliary - multiplier);
    auxiliary = soft_threshold(codes + multiplier / rho, epsilon / rho);
    multiplier += theta0 * (codes - auxiliary);

    const double residual =
        lasso_kkt_residual(dictionary, sample, auxiliary, epsilon);
    const double value =
        lasso_objective(dictionary, sample, auxiliary, epsilon);
    if (value < best_objective) {
      best_objective = value;
      result.code = auxiliary;
      result.kkt_residual = residual;
    }
    result.iterations = iter;
    if (residual <= kkt_tol) {
      result.code = auxiliary;
      result.kkt_residual = residual;
      result.converged = true;
      break;
    }
  }
  return result;
}

} // namespace ledl
