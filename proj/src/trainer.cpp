#include "ledl/trainer.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "ledl/data_model.hpp"
#include "ledl/dictionary_updater.hpp"
#include "ledl/sparse_coder.hpp"

namespace ledl {

void validate_params(const HyperParams& params, int num_classes) {
  if (params.lambda < 0.0 || params.omega < 0.0 || params.epsilon < 0.0) {
    throw config_error("lambda, omega and epsilon must be nonnegative");
  }
  if (params.rho <= 0.0) {
    throw config_error("rho must be positive");
  }
  if (params.theta0 <= 0.0) {
    throw config_error("theta0 must be positive");
  }
  if (params.theta_decay <= 0.0 || params.theta_decay > 1.0) {
    throw config_error("theta_decay must lie in (0, 1]");
  }
  if (params.dict_size < num_classes) {
    std::ostringstream msg;
    msg << "dict_size " << params.dict_size
        << " must be at least the class count " << num_classes;
    throw config_error(msg.str());
  }
  if (params.max_iter < 0) {
    throw config_error("max_iter must be nonnegative");
  }
}

ObjectiveTerms objective_terms(const Matrix& features,
                               const Matrix& label_matrix,
                               const Matrix& discriminative,
                               const ModelBundle& model,
                               const TrainState& state,
                               const HyperParams& params) {
  ObjectiveTerms terms;
  terms.reconstruction =
      (features - model.dictionary * state.codes).squaredNorm();
  terms.label_fit =
      params.lambda *
      (label_matrix - model.classifier * state.codes).squaredNorm();
  terms.discriminative =
      params.omega *
      (discriminative - model.transform * state.codes).squaredNorm();
  terms.l1_penalty = 2.0 * params.epsilon * state.auxiliary.lpNorm<1>();
  const Matrix gap = state.codes - state.auxiliary;
  terms.multiplier = state.multiplier.cwiseProduct(gap).sum();
  terms.penalty = params.rho * gap.squaredNorm();

  const struct {
    const char* name;
    double value;
  } named[] = {
      {"reconstruction", terms.reconstruction},
      {"label_fit", terms.label_fit},
      {"discriminative", terms.discriminative},
      {"l1_penalty", terms.l1_penalty},
      {"multiplier", terms.multiplier},
      {"penalty", terms.penalty},
  };
  for (const auto& term : named) {
    if (!std::isfinite(term.value)) {
      std::ostringstream msg;
      msg << "objective: term '" << term.name << "' is not finite";
      throw numeric_error(msg.str());
    }
  }
  return terms;
}

double objective(const Matrix& features, const Matrix& label_matrix,
                 const Matrix& discriminative, const ModelBundle& model,
                 const TrainState& state, const HyperParams& params) {
  return objective_terms(features, label_matrix, discriminative, model, state,
                         params)
      .total();
}

double theta_schedule(double theta, const HyperParams& params) {
  if (theta <= 0.0) {
    throw config_error("theta_schedule: theta must be positive");
  }
  return std::max(theta * params.theta_decay, params.theta_min);
}

namespace {

Matrix random_unit_columns(Index rows, Index cols, std::mt19937_64& rng) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      m(i, j) = uniform_unit(rng);
    }
  }
  return l2_normalize_columns(m);
}

} // namespace

std::pair<ModelBundle, TrainState> initialize(const Matrix& features,
                                              const Matrix& label_matrix,
                                              const Matrix& discriminative,
                                              const HyperParams& params) {
  validate_params(params, static_cast<int>(label_matrix.rows()));
  const Index k = params.dict_size;
  const Index n = features.cols();
  if (label_matrix.cols() != n || discriminative.cols() != n) {
    throw shape_error("initialize: supervision column counts disagree");
  }
  if (discriminative.rows() != k) {
    throw shape_error("initialize: discriminative rows must equal dict_size");
  }

  std::mt19937_64 rng(params.seed);
  ModelBundle model;
  model.dictionary = random_unit_columns(features.rows(), k, rng);
  model.classifier = random_unit_columns(label_matrix.rows(), k, rng);
  model.transform = random_unit_columns(k, k, rng);

  TrainState state;
  state.codes = Matrix::Zero(k, n);
  state.auxiliary = Matrix::Zero(k, n);
  state.multiplier = Matrix::Zero(k, n);
  state.iterations = 0;
  state.theta = params.theta0;
  return {std::move(model), std::move(state)};
}

FitResult fit(const Matrix& features, const Matrix& label_matrix,
              const Matrix& discriminative, const HyperParams& params,
              const IterationObserver& observer) {
  const auto started = std::chrono::steady_clock::now();

  FitResult result;
  auto [model, state] = initialize(features, label_matrix, discriminative, params);

  FitReport report;
  report.objective_trace.reserve(static_cast<std::size_t>(params.max_iter));
  report.primal_residual_trace.reserve(
      static_cast<std::size_t>(params.max_iter));
  {
    const ObjectiveTerms at_init = objective_terms(
        features, label_matrix, discriminative, model, state, params);
    report.initial_objective = at_init.total();
    report.initial_objective_doubled = at_init.total_doubled();
  }

  constexpr double kRelChangeTol = 1e-7;
  constexpr double kResidualTol = 1e-5;
  constexpr int kStablePatience = 10;
  int stable_count = 0;
  double previous_objective = report.initial_objective;

  for (int iter = 1; iter <= params.max_iter; ++iter) {
    try {
      const SystemFactorization system(
          code_gram(model.dictionary, model.classifier, model.transform,
                    params));
      state.codes = update_codes(system, features, label_matrix,
                                 discriminative, model.dictionary,
                                 model.classifier, model.transform,
                                 state.auxiliary, state.multiplier, params);
      state.auxiliary = update_auxiliary(state.codes, state.multiplier,
                                         params.epsilon, params.rho);
      state.multiplier = update_multiplier(state.multiplier, state.codes,
                                           state.auxiliary, state.theta);

      const ObjectiveTerms mid = objective_terms(
          features, label_matrix, discriminative, model, state, params);
      report.mid_objective_trace.push_back(mid.total());
      report.mid_objective_doubled_trace.push_back(mid.total_doubled());

      const Matrix gram_offdiag = offdiag_gram(state.codes);
      sweep_columns(model.dictionary, features, state.codes, gram_offdiag);
      sweep_columns(model.classifier, label_matrix, state.codes, gram_offdiag);
      sweep_columns(model.transform, discriminative, state.codes,
                    gram_offdiag);

      const ObjectiveTerms end = objective_terms(
          features, label_matrix, discriminative, model, state, params);
      report.objective_trace.push_back(end.total());
      report.objective_doubled_trace.push_back(end.total_doubled());
      const double residual = (state.codes - state.auxiliary).norm();
      report.primal_residual_trace.push_back(residual);

      state.iterations = iter;
      report.iterations_run = iter;
      if (observer) {
        observer(iter, model, state);
      }

      const double change = std::abs(end.total() - previous_objective);
      const double scale = std::max(std::abs(previous_objective), 1e-12);
      stable_count = (change / scale < kRelChangeTol) ? stable_count + 1 : 0;
      previous_objective = end.total();

      state.theta = theta_schedule(state.theta, params);

      if (params.early_stop && stable_count >= kStablePatience &&
          residual < kResidualTol) {
        report.converged = true;
        break;
      }
    } catch (const numeric_error& err) {
      std::ostringstream msg;
      msg << err.what() << " (at training iteration " << iter << ")";
      throw numeric_error(msg.str());
    }
  }

  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  result.model = std::move(model);
  result.state = std::move(state);
  result.report = std::move(report);
  return result;
}

} // namespace ledl
