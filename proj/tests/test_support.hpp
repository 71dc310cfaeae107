#pragma once

// Shared fixtures and independent oracles. The oracles deliberately avoid the
// library's linear-algebra expressions (plain loops, coordinate descent) so a
// bug in the implementation cannot hide in its own reference values.

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "ledl/data_model.hpp"
#include "ledl/trainer.hpp"
#include "ledl/types.hpp"

namespace support {

using ledl::Index;
using ledl::Matrix;
using ledl::Vector;

inline Matrix uniform_matrix(std::mt19937_64& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      m(i, j) = ledl::uniform_unit(rng);
    }
  }
  return m;
}

inline Matrix signed_matrix(std::mt19937_64& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      m(i, j) = 2.0 * ledl::uniform_unit(rng) - 1.0;
    }
  }
  return m;
}

inline double gaussian(std::mt19937_64& rng) {
  double u1 = ledl::uniform_unit(rng);
  while (u1 == 0.0) {
    u1 = ledl::uniform_unit(rng);
  }
  const double u2 = ledl::uniform_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

/// A fully populated mid-training snapshot for exercising single stages.
struct TestInstance {
  Matrix features;       // D x N
  Matrix label_matrix;   // C x N
  Matrix discriminative; // K x N
  ledl::Labels labels;
  ledl::ModelBundle model;
  ledl::TrainState state;
  ledl::HyperParams params;
};

inline TestInstance make_instance(std::uint64_t seed, Index dim, int atoms,
                                  Index samples, int classes,
                                  ledl::HyperParams params = {}) {
  std::mt19937_64 rng(seed);
  TestInstance t;
  t.params = params;
  t.params.dict_size = atoms;
  t.params.seed = seed;

  t.features = signed_matrix(rng, dim, samples);
  t.labels.num_classes = classes;
  t.labels.ids.resize(static_cast<std::size_t>(samples));
  for (Index i = 0; i < samples; ++i) {
    // First `classes` samples cover every class, the rest draw uniformly.
    t.labels.ids[static_cast<std::size_t>(i)] =
        i < classes ? static_cast<int>(i)
                    : static_cast<int>(ledl::uniform_index(
                          rng, static_cast<std::size_t>(classes)));
  }
  t.label_matrix = ledl::build_label_matrix(t.labels);
  t.discriminative = ledl::build_discriminative_codes(t.labels, atoms).codes;

  t.model.dictionary = ledl::l2_normalize_columns(signed_matrix(rng, dim, atoms));
  t.model.classifier =
      ledl::l2_normalize_columns(signed_matrix(rng, classes, atoms));
  t.model.transform = ledl::l2_normalize_columns(signed_matrix(rng, atoms, atoms));

  t.state.codes = 0.5 * signed_matrix(rng, atoms, samples);
  t.state.auxiliary = 0.5 * signed_matrix(rng, atoms, samples);
  t.state.multiplier = 0.25 * signed_matrix(rng, atoms, samples);
  t.state.theta = t.params.theta0;
  return t;
}

/// A well-posed synthetic training problem: features are sparse combinations
/// of a hidden unit-norm basis, with each sample drawing its active atoms from
/// the block owned by its class, plus bounded noise. Such instances reach the
/// solver's joint fixed point quickly, which makes tight convergence claims
/// (monotone tail, vanishing primal residual) meaningful to assert.
inline TestInstance planted_instance(std::uint64_t seed, Index dim, int atoms,
                                     Index samples, int classes, int active,
                                     double noise, ledl::HyperParams params) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  TestInstance t = make_instance(seed, dim, atoms, samples, classes, params);
  const auto assign = ledl::build_discriminative_codes(t.labels, atoms);

  const Matrix truth = ledl::l2_normalize_columns(signed_matrix(rng, dim, atoms));
  Matrix codes = Matrix::Zero(atoms, samples);
  for (Index j = 0; j < samples; ++j) {
    const int cls = t.labels.ids[static_cast<std::size_t>(j)];
    std::vector<int> own;
    for (int k = 0; k < atoms; ++k) {
      if (assign.atom_class[static_cast<std::size_t>(k)] == cls) {
        own.push_back(k);
      }
    }
    for (int pick = 0; pick < active; ++pick) {
      const int k = own[ledl::uniform_index(rng, own.size())];
      const double sign = ledl::uniform_unit(rng) < 0.5 ? -1.0 : 1.0;
      codes(k, j) += sign * (0.8 + 0.8 * ledl::uniform_unit(rng));
    }
  }
  t.features = truth * codes;
  for (Index j = 0; j < samples; ++j) {
    for (Index i = 0; i < dim; ++i) {
      t.features(i, j) += noise * (2.0 * ledl::uniform_unit(rng) - 1.0);
    }
  }
  t.features = ledl::l2_normalize_columns(t.features);
  return t;
}

/// Hyperparameters under which the pinned planted instances converge to the
/// full fixed point well before iteration 100 of 300. The raised theta floor
/// keeps the dual ascent active so the split variables actually meet.
inline ledl::HyperParams planted_params() {
  ledl::HyperParams params;
  params.lambda = 0.0625;     // 2^-4
  params.omega = 0.00390625;  // 2^-8
  params.epsilon = 0.125;     // 2^-3
  params.rho = 1.0;
  params.theta0 = 0.5;
  params.theta_decay = 0.99;
  params.theta_min = 0.25;
  params.max_iter = 300;
  params.early_stop = false;
  return params;
}

/// The shared planted geometry used by convergence tests.
inline TestInstance pinned_planted(std::uint64_t seed) {
  return planted_instance(seed, /*dim=*/10, /*atoms=*/4, /*samples=*/24,
                          /*classes=*/2, /*active=*/1, /*noise=*/0.005,
                          planted_params());
}

/// Coordinate-descent solver for min_s ||y - B s||^2 + 2 epsilon ||s||_1.
/// Exact per-coordinate minimization; independent of the ADMM encoder.
inline Vector lasso_cd(const Matrix& dictionary, const Vector& sample,
                       double epsilon, int max_sweeps = 100000,
                       double tol = 1e-13) {
  const Index atoms = dictionary.cols();
  Vector code = Vector::Zero(atoms);
  Vector residual = sample; // y - B s, maintained incrementally
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Index k = 0; k < atoms; ++k) {
      const double col_sq = dictionary.col(k).squaredNorm();
      if (col_sq == 0.0) {
        continue;
      }
      const double previous = code(k);
      const double corr = dictionary.col(k).dot(residual) + col_sq * previous;
      double next = 0.0;
      if (corr > epsilon) {
        next = (corr - epsilon) / col_sq;
      } else if (corr < -epsilon) {
        next = (corr + epsilon) / col_sq;
      }
      if (next != previous) {
        residual -= dictionary.col(k) * (next - previous);
        code(k) = next;
        max_change = std::max(max_change, std::abs(next - previous));
      }
    }
    if (max_change < tol) {
      break;
    }
  }
  return code;
}

/// Central finite difference of a scalar function of a matrix argument.
template <typename F>
Matrix fd_gradient(const F& f, Matrix point, double h) {
  Matrix grad(point.rows(), point.cols());
  for (Index j = 0; j < point.cols(); ++j) {
    for (Index i = 0; i < point.rows(); ++i) {
      const double saved = point(i, j);
      point(i, j) = saved + h;
      const double up = f(point);
      point(i, j) = saved - h;
      const double down = f(point);
      point(i, j) = saved;
      grad(i, j) = (up - down) / (2.0 * h);
    }
  }
  return grad;
}

/// Plain-loop squared reconstruction error ||target - bases * codes||_F^2.
inline double loop_sq_error(const Matrix& target, const Matrix& bases,
                            const Matrix& codes) {
  double total = 0.0;
  for (Index j = 0; j < target.cols(); ++j) {
    for (Index i = 0; i < target.rows(); ++i) {
      double fitted = 0.0;
      for (Index k = 0; k < bases.cols(); ++k) {
        fitted += bases(i, k) * codes(k, j);
      }
      const double diff = target(i, j) - fitted;
      total += diff * diff;
    }
  }
  return total;
}

/// Duplicate-arithmetic evaluation of the monitored objective. The
/// doubled_multiplier flag selects between the single and the doubled
/// multiplier-term scalarization.
inline double reference_objective(const Matrix& features,
                                  const Matrix& label_matrix,
                                  const Matrix& discriminative,
                                  const ledl::ModelBundle& model,
                                  const ledl::TrainState& state,
                                  const ledl::HyperParams& params,
                                  bool doubled_multiplier = false) {
  double total = loop_sq_error(features, model.dictionary, state.codes);
  total +=
      params.lambda * loop_sq_error(label_matrix, model.classifier, state.codes);
  total += params.omega *
           loop_sq_error(discriminative, model.transform, state.codes);

  double l1 = 0.0;
  double multiplier = 0.0;
  double penalty = 0.0;
  for (Index j = 0; j < state.codes.cols(); ++j) {
    for (Index i = 0; i < state.codes.rows(); ++i) {
      l1 += std::abs(state.auxiliary(i, j));
      const double gap = state.codes(i, j) - state.auxiliary(i, j);
      multiplier += state.multiplier(i, j) * gap;
      penalty += gap * gap;
    }
  }
  total += 2.0 * params.epsilon * l1;
  total += (doubled_multiplier ? 2.0 : 1.0) * multiplier;
  total += params.rho * penalty;
  return total;
}

/// Smooth part of the augmented Lagrangian in the codes (doubled multiplier
/// term — the form whose stationary point the closed-form code update hits).
inline double code_smooth_objective(const TestInstance& t, const Matrix& codes) {
  ledl::TrainState state = t.state;
  state.codes = codes;
  const double with_l1 =
      reference_objective(t.features, t.label_matrix, t.discriminative, t.model,
                          state, t.params, /*doubled_multiplier=*/true);
  double l1 = 0.0;
  for (Index j = 0; j < state.auxiliary.cols(); ++j) {
    for (Index i = 0; i < state.auxiliary.rows(); ++i) {
      l1 += std::abs(state.auxiliary(i, j));
    }
  }
  return with_l1 - 2.0 * t.params.epsilon * l1;
}

/// Isotropic Gaussian class blobs: unit-variance noise around class centers
/// placed `separation` apart pairwise (scaled unit axes). Columns grouped by
/// class.
inline std::pair<Matrix, ledl::Labels> make_blobs(std::uint64_t seed, Index dim,
                                                  int per_class, int classes,
                                                  double separation) {
  std::mt19937_64 rng(seed);
  Matrix features(dim, static_cast<Index>(per_class) * classes);
  ledl::Labels labels;
  labels.num_classes = classes;
  const double scale = separation / std::sqrt(2.0);
  Index col = 0;
  for (int c = 0; c < classes; ++c) {
    for (int i = 0; i < per_class; ++i, ++col) {
      for (Index d = 0; d < dim; ++d) {
        features(d, col) = (d == c ? scale : 0.0) + gaussian(rng);
      }
      labels.ids.push_back(c);
    }
  }
  return {features, labels};
}

} // namespace support
