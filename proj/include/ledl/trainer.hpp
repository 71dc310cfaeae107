#pragma once

#include <functional>
#include <vector>

#include "ledl/types.hpp"

namespace ledl {

/// Per-fit diagnostics. objective_trace holds the monitored objective at the
/// end of each iteration; mid_* values are taken after the ADMM stage and
/// before the basis sweeps. The *_doubled variants carry the doubled multiplier
/// term; both forms are logged since the updates are unaffected by the
/// choice.
struct FitReport {
  std::vector<double> objective_trace;
  std::vector<double> objective_doubled_trace;
  std::vector<double> mid_objective_trace;
  std::vector<double> mid_objective_doubled_trace;
  std::vector<double> primal_residual_trace;
  double initial_objective = 0.0;
  double initial_objective_doubled = 0.0;
  int iterations_run = 0;
  bool converged = false;
  double wall_time_seconds = 0.0;
};

/// Term-by-term objective breakdown. total() scalarizes the multiplier term
/// as trace(Lt (C - Z)); total_doubled() doubles it.
struct ObjectiveTerms {
  double reconstruction = 0.0;  // ||X - B C||_F^2
  double label_fit = 0.0;       // lambda ||H - W C||_F^2
  double discriminative = 0.0;  // omega ||Q - A C||_F^2
  double l1_penalty = 0.0;      // 2 epsilon ||Z||_1
  double multiplier = 0.0;      // trace(Lt (C - Z))
  double penalty = 0.0;         // rho ||C - Z||_F^2

  double total() const {
    return reconstruction + label_fit + discriminative + l1_penalty +
           multiplier + penalty;
  }
  double total_doubled() const { return total() + multiplier; }
};

/// Throws numeric_error naming the first non-finite term.
ObjectiveTerms objective_terms(const Matrix& features,
                               const Matrix& label_matrix,
                               const Matrix& discriminative,
                               const ModelBundle& model,
                               const TrainState& state,
                               const HyperParams& params);

double objective(const Matrix& features, const Matrix& label_matrix,
                 const Matrix& discriminative, const ModelBundle& model,
                 const TrainState& state, const HyperParams& params);

/// Geometric decay with a floor: max(theta * theta_decay, theta_min).
double theta_schedule(double theta, const HyperParams& params);

/// Zero codes/auxiliary/multiplier; bases drawn i.i.d. uniform on [0,1) from
/// the seeded generator (dictionary, then classifier, then transform, in
/// column-major entry order) and column-normalized.
std::pair<ModelBundle, TrainState> initialize(const Matrix& features,
                                              const Matrix& label_matrix,
                                              const Matrix& discriminative,
                                              const HyperParams& params);

struct FitResult {
  ModelBundle model;
  TrainState state;
  FitReport report;
};

/// Called after every completed iteration.
using IterationObserver =
    std::function<void(int iteration, const ModelBundle&, const TrainState&)>;

/// Runs the full alternating loop: code update, auxiliary update, dual
/// ascent, then Gauss-Seidel sweeps of the three bases, tracking the
/// objective each iteration. Stops early (when params.early_stop) once the
/// relative objective change stays below 1e-7 for 10 consecutive iterations
/// and the primal residual is below 1e-5.
FitResult fit(const Matrix& features, const Matrix& label_matrix,
              const Matrix& discriminative, const HyperParams& params,
              const IterationObserver& observer = {});

} // namespace ledl
