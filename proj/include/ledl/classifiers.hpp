#pragma once

#include <vector>

#include "ledl/data_model.hpp"
#include "ledl/types.hpp"

namespace ledl {

struct Prediction {
  int label = 0;
  Vector scores;                // decision values, one per class
  bool encode_converged = true; // false when the encoder hit max_iter
};

/// Argmax with ties broken toward the lowest index.
int argmax_lowest(const Vector& scores);

/// Encode the sample over the learned dictionary, then score with the
/// linear classifier: label = argmax of W s.
Prediction predict_ledl(const ModelBundle& model, const Vector& sample,
                        const HyperParams& params);

std::vector<Prediction> predict_ledl_batch(const ModelBundle& model,
                                           const Matrix& samples,
                                           const HyperParams& params);

struct SrcOptions {
  double rho = 1.0;
  double theta0 = 0.5;
  int max_iter = 2000;
  double kkt_tol = 1e-6;
};

/// Sparse representation baseline: code the sample over the raw training
/// columns, then pick the class with the smallest class-restricted
/// reconstruction residual. scores hold the negated residuals.
Prediction src_classify(const Matrix& train_features, const Labels& labels,
                        const Vector& sample, double alpha,
                        const SrcOptions& options = {});

std::vector<Prediction> src_classify_batch(const Matrix& train_features,
                                           const Labels& labels,
                                           const Matrix& samples, double alpha,
                                           const SrcOptions& options = {});

} // namespace ledl
