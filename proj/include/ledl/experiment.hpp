#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include "ledl/data_model.hpp"
#include "ledl/trainer.hpp"
#include "ledl/types.hpp"

namespace ledl {

struct Dataset {
  Matrix features; // one sample per column
  Labels labels;
};

/// Features file: UTF-8 text, one sample per line, comma-separated decimal
/// floats, no header; samples become columns. Labels file: one 0-based
/// integer per line. Parse failures report the offending line number.
Dataset load_dataset(const std::string& features_path,
                     const std::string& labels_path);

/// Writes a matrix in the dataset format: one column per line.
void write_matrix_csv(const std::string& path, const Matrix& m);

/// Reads a matrix written by write_matrix_csv.
Matrix read_matrix_csv(const std::string& path);

enum class Method { ledl, src };

struct ExperimentConfig {
  std::string features_path;
  std::string labels_path;
  int per_class_train = 5;
  int repeats = 8;
  int dict_size = 0;      // fixed K when > 0 ...
  double dict_mult = 2.0; // ... else K = round(dict_mult * N_train)
  Method method = Method::ledl;
  HyperParams params;
  std::string out_dir;
  bool save_models = true;
};

struct ExperimentResult {
  std::vector<double> per_repeat_accuracy;
  double mean_accuracy = 0.0;
  Eigen::MatrixXi confusion; // summed over repeats, row = true class
  std::vector<Eigen::MatrixXi> per_repeat_confusion;
  std::vector<FitReport> fit_reports;  // empty for src
  std::vector<ModelBundle> models;     // one per repeat for ledl
};

/// Repeated-trial protocol: for each repeat r, split with seed + r,
/// l2-normalize feature columns, build the supervision matrices, train (or
/// skip, for src) and evaluate on the held-out samples.
ExperimentResult run_experiment(const Matrix& features, const Labels& labels,
                                const ExperimentConfig& config);

/// Loads the dataset from config paths first.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Writes accuracy.csv, confusion.csv and per-repeat convergence_r<k>.csv
/// into out_dir (created if missing).
void export_metrics(const ExperimentResult& result, const std::string& out_dir);

/// One CSV per matrix (column per line) plus meta.txt with dims and
/// hyperparameters.
void save_model(const std::string& dir, const ModelBundle& model,
                const HyperParams& params);

std::pair<ModelBundle, HyperParams> load_model(const std::string& dir);

} // namespace ledl
