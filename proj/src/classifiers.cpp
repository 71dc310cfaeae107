#include "ledl/classifiers.hpp"

#include <sstream>

#include "ledl/sparse_coder.hpp"

namespace ledl {

int argmax_lowest(const Vector& scores) {
  if (scores.size() == 0) {
    throw shape_error("argmax_lowest: empty score vector");
  }
  int best = 0;
  for (Index i = 1; i < scores.size(); ++i) {
    if (scores(i) > scores(best)) {
      best = static_cast<int>(i);
    }
  }
  return best;
}

Prediction predict_ledl(const ModelBundle& model, const Vector& sample,
                        const HyperParams& params) {
  if (sample.size() != model.dictionary.rows()) {
    std::ostringstream msg;
    msg << "predict_ledl: sample has dimension " << sample.size()
        << ", model expects " << model.dictionary.rows();
    throw shape_error(msg.str());
  }
  const EncodeResult encoded =
      encode_l1(model.dictionary, sample, params.epsilon, params.rho,
                params.theta0);
  Prediction prediction;
  prediction.scores = model.classifier * encoded.code;
  prediction.label = argmax_lowest(prediction.scores);
  prediction.encode_converged = encoded.converged;
  return prediction;
}

std::vector<Prediction> predict_ledl_batch(const ModelBundle& model,
                                           const Matrix& samples,
                                           const HyperParams& params) {
  std::vector<Prediction> predictions;
  predictions.reserve(static_cast<std::size_t>(samples.cols()));
  for (Index j = 0; j < samples.cols(); ++j) {
    predictions.push_back(predict_ledl(model, samples.col(j), params));
  }
  return predictions;
}

Prediction src_classify(const Matrix& train_features, const Labels& labels,
                        const Vector& sample, double alpha,
                        const SrcOptions& options) {
  validate_labels(labels);
  if (train_features.cols() != static_cast<Index>(labels.ids.size())) {
    throw shape_error("src_classify: training columns and label count differ");
  }
  if (sample.size() != train_features.rows()) {
    throw shape_error("src_classify: sample dimension mismatch");
  }

  const EncodeResult encoded =
      encode_l1(train_features, sample, alpha, options.rho, options.theta0,
                options.max_iter, options.kkt_tol);

  // Class-restricted residuals: reconstruct with each class's columns only.
  Prediction prediction;
  prediction.scores = Vector::Zero(labels.num_classes);
  for (int c = 0; c < labels.num_classes; ++c) {
    Vector reconstruction = Vector::Zero(sample.size());
    for (Index j = 0; j < train_features.cols(); ++j) {
      if (labels.ids[static_cast<std::size_t>(j)] == c) {
        reconstruction += encoded.code(j) * train_features.col(j);
      }
    }
    prediction.scores(c) = -(sample - reconstruction).squaredNorm();
  }
  prediction.label = argmax_lowest(prediction.scores);
  prediction.encode_converged = encoded.converged;
  return prediction;
}

std::vector<Prediction> src_classify_batch(const Matrix& train_features,
                                           const Labels& labels,
                                           const Matrix& samples, double alpha,
                                           const SrcOptions& options) {
  std::vector<Prediction> predictions;
  predictions.reserve(static_cast<std::size_t>(samples.cols()));
  for (Index j = 0; j < samples.cols(); ++j) {
    predictions.push_back(
        src_classify(train_features, labels, samples.col(j), alpha, options));
  }
  return predictions;
}

} // namespace ledl
