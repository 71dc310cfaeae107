#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace ledl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Error taxonomy. Everything derives from std::runtime_error so callers can
// catch broadly at the CLI boundary and still get a useful message.
struct shape_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Training hyperparameters. dict_size is the number of atoms K.
struct HyperParams {
  double lambda = 0.0;       // weight of the classification error term
  double omega = 0.0;        // weight of the discriminative-codes error term
  double epsilon = 0.0;      // l1 weight
  double rho = 1.0;          // ADMM penalty, > 0
  double theta0 = 0.5;       // initial dual step
  double theta_decay = 0.99; // multiplicative decay in (0, 1]
  double theta_min = 1e-4;   // dual-step floor
  int dict_size = 0;         // K
  int max_iter = 500;
  std::uint64_t seed = 0;
  bool early_stop = true;    // guarded stop; disable for fixed-iteration runs
};

void validate_params(const HyperParams& params, int num_classes);

/// Learned bases: dictionary B (D x K), linear classifier W (C x K),
/// code transform A (K x K). Columns stay unit-norm across update passes.
struct ModelBundle {
  Matrix dictionary;
  Matrix classifier;
  Matrix transform;
};

/// Mutable optimizer state: codes C, auxiliary Z, multiplier L (all K x N),
/// plus the iteration counter and current dual step.
struct TrainState {
  Matrix codes;
  Matrix auxiliary;
  Matrix multiplier;
  int iterations = 0;
  double theta = 0.0;
};

// Portable deterministic draws: identical across platforms for a given seed,
// unlike std::uniform_* distributions whose algorithms are
// implementation-defined.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t bound) {
  return static_cast<std::size_t>(rng() % bound);
}

} // namespace ledl
