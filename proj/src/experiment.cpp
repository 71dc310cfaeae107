#include "ledl/experiment.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ledl/classifiers.hpp"

namespace ledl {

namespace {

// Shortest exact decimal form: %.17g round-trips IEEE doubles and keeps the
// exported CSVs byte-stable across runs.
std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

double parse_double_token(const std::string& token, const std::string& path,
                          std::size_t line_number) {
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0' || errno == ERANGE) {
    std::ostringstream msg;
    msg << path << ":" << line_number << ": cannot parse '" << token
        << "' as a number";
    throw parse_error(msg.str());
  }
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << path << ":" << line_number << ": non-finite value '" << token
        << "'";
    throw parse_error(msg.str());
  }
  return value;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw data_error("cannot open '" + path + "' for writing");
  }
  return out;
}

} // namespace

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw data_error("cannot open features file '" + path + "'");
  }

  std::vector<std::vector<double>> columns;
  std::string line;
  std::size_t line_number = 0;
  std::size_t dimension = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty() && in.peek() == EOF) {
      break; // tolerate one trailing newline
    }
    std::vector<double> column;
    std::stringstream fields(line);
    std::string token;
    while (std::getline(fields, token, ',')) {
      column.push_back(parse_double_token(trim(token), path, line_number));
    }
    if (column.empty()) {
      std::ostringstream msg;
      msg << path << ":" << line_number << ": empty line";
      throw parse_error(msg.str());
    }
    if (dimension == 0) {
      dimension = column.size();
    } else if (column.size() != dimension) {
      std::ostringstream msg;
      msg << path << ":" << line_number << ": expected " << dimension
          << " values, found " << column.size();
      throw parse_error(msg.str());
    }
    columns.push_back(std::move(column));
  }
  if (columns.empty()) {
    throw parse_error(path + ": no samples found");
  }

  Matrix m(static_cast<Index>(dimension), static_cast<Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    for (std::size_t i = 0; i < dimension; ++i) {
      m(static_cast<Index>(i), static_cast<Index>(j)) = columns[j][i];
    }
  }
  return m;
}

Dataset load_dataset(const std::string& features_path,
                     const std::string& labels_path) {
  Dataset dataset;
  dataset.features = read_matrix_csv(features_path);

  std::ifstream in(labels_path);
  if (!in) {
    throw data_error("cannot open labels file '" + labels_path + "'");
  }
  std::string line;
  std::size_t line_number = 0;
  int max_label = -1;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string token = trim(line);
    if (token.empty() && in.peek() == EOF) {
      break;
    }
    errno = 0;
    char* end = nullptr;
    const long value = std::strtol(token.c_str(), &end, 10);
    if (end == token.c_str() || *end != '\0' || errno == ERANGE || value < 0) {
      std::ostringstream msg;
      msg << labels_path << ":" << line_number
          << ": cannot parse '" << token << "' as a 0-based class id";
      throw parse_error(msg.str());
    }
    dataset.labels.ids.push_back(static_cast<int>(value));
    max_label = std::max(max_label, static_cast<int>(value));
  }
  dataset.labels.num_classes = max_label + 1;

  if (static_cast<Index>(dataset.labels.ids.size()) !=
      dataset.features.cols()) {
    std::ostringstream msg;
    msg << labels_path << ": " << dataset.labels.ids.size()
        << " labels for " << dataset.features.cols() << " samples in "
        << features_path;
    throw parse_error(msg.str());
  }
  validate_labels(dataset.labels);
  return dataset;
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream out = open_for_write(path);
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      if (i > 0) {
        out << ',';
      }
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) {
    throw data_error("write failed for '" + path + "'");
  }
}

namespace {

int resolve_dict_size(const ExperimentConfig& config, Index train_count) {
  if (config.dict_size > 0) {
    return config.dict_size;
  }
  return static_cast<int>(
      std::lround(config.dict_mult * static_cast<double>(train_count)));
}

} // namespace

ExperimentResult run_experiment(const Matrix& features, const Labels& labels,
                                const ExperimentConfig& config) {
  validate_labels(labels);
  if (config.repeats < 1) {
    throw config_error("repeats must be at least 1");
  }
  if (!features.allFinite()) {
    throw data_error("features contain non-finite entries");
  }

  ExperimentResult result;
  result.confusion =
      Eigen::MatrixXi::Zero(labels.num_classes, labels.num_classes);
  std::vector<HyperParams> repeat_params;

  for (int r = 1; r <= config.repeats; ++r) {
    try {
      const std::uint64_t repeat_seed = config.params.seed + static_cast<std::uint64_t>(r);
      auto [train, test] =
          split_dataset(features, labels, config.per_class_train, repeat_seed);
      train.features = l2_normalize_columns(train.features);
      test.features = l2_normalize_columns(test.features);

      Eigen::MatrixXi confusion =
          Eigen::MatrixXi::Zero(labels.num_classes, labels.num_classes);
      std::vector<Prediction> predictions;

      if (config.method == Method::ledl) {
        HyperParams params = config.params;
        params.seed = repeat_seed;
        params.dict_size = resolve_dict_size(config, train.features.cols());

        const Matrix label_matrix = build_label_matrix(train.labels);
        const DiscriminativeCodes discriminative =
            build_discriminative_codes(train.labels, params.dict_size);
        FitResult fitted = fit(train.features, label_matrix,
                               discriminative.codes, params);
        predictions = predict_ledl_batch(fitted.model, test.features, params);
        result.fit_reports.push_back(std::move(fitted.report));
        result.models.push_back(std::move(fitted.model));
        repeat_params.push_back(params);
      } else {
        SrcOptions options;
        options.rho = config.params.rho;
        options.theta0 = config.params.theta0;
        predictions = src_classify_batch(train.features, train.labels,
                                         test.features, config.params.epsilon,
                                         options);
      }

      int correct = 0;
      for (std::size_t i = 0; i < predictions.size(); ++i) {
        const int truth = test.labels.ids[i];
        const int predicted = predictions[i].label;
        confusion(truth, predicted) += 1;
        if (predicted == truth) {
          ++correct;
        }
      }
      const double accuracy =
          predictions.empty()
              ? 0.0
              : static_cast<double>(correct) /
                    static_cast<double>(predictions.size());
      result.per_repeat_accuracy.push_back(accuracy);
      result.per_repeat_confusion.push_back(confusion);
      result.confusion += confusion;
    } catch (const std::runtime_error& err) {
      std::ostringstream msg;
      msg << err.what() << " (repeat " << r << ")";
      throw data_error(msg.str());
    }
  }

  double sum = 0.0;
  for (const double accuracy : result.per_repeat_accuracy) {
    sum += accuracy;
  }
  result.mean_accuracy = sum / static_cast<double>(config.repeats);

  if (!config.out_dir.empty()) {
    export_metrics(result, config.out_dir);
    if (config.save_models) {
      for (std::size_t r = 0; r < result.models.size(); ++r) {
        std::ostringstream name;
        name << "model_r" << (r + 1);
        const std::filesystem::path dir =
            std::filesystem::path(config.out_dir) / name.str();
        save_model(dir.string(), result.models[r], repeat_params[r]);
      }
    }
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const Dataset dataset = load_dataset(config.features_path,
                                       config.labels_path);
  return run_experiment(dataset.features, dataset.labels, config);
}

void export_metrics(const ExperimentResult& result,
                    const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path base(out_dir);

  {
    std::ofstream out = open_for_write((base / "accuracy.csv").string());
    out << "repeat,accuracy\n";
    for (std::size_t r = 0; r < result.per_repeat_accuracy.size(); ++r) {
      out << (r + 1) << ',' << format_double(result.per_repeat_accuracy[r])
          << '\n';
    }
    out << "mean," << format_double(result.mean_accuracy) << '\n';
    if (!out) {
      throw data_error("write failed for accuracy.csv in '" + out_dir + "'");
    }
  }

  {
    std::ofstream out = open_for_write((base / "confusion.csv").string());
    const Index classes = result.confusion.rows();
    for (Index c = 0; c < classes; ++c) {
      out << (c > 0 ? "," : "") << "pred_" << c;
    }
    out << '\n';
    for (Index truth = 0; truth < classes; ++truth) {
      for (Index predicted = 0; predicted < classes; ++predicted) {
        out << (predicted > 0 ? "," : "") << result.confusion(truth, predicted);
      }
      out << '\n';
    }
    if (!out) {
      throw data_error("write failed for confusion.csv in '" + out_dir + "'");
    }
  }

  for (std::size_t r = 0; r < result.fit_reports.size(); ++r) {
    const FitReport& report = result.fit_reports[r];
    std::ostringstream name;
    name << "convergence_r" << (r + 1) << ".csv";
    std::ofstream out = open_for_write((base / name.str()).string());
    out << "iteration,objective,primal_residual,objective_doubled\n";
    for (int i = 0; i < report.iterations_run; ++i) {
      const std::size_t idx = static_cast<std::size_t>(i);
      out << (i + 1) << ',' << format_double(report.objective_trace[idx])
          << ',' << format_double(report.primal_residual_trace[idx]) << ','
          << format_double(report.objective_doubled_trace[idx]) << '\n';
    }
    if (!out) {
      throw data_error("write failed for " + name.str() + " in '" + out_dir +
                       "'");
    }
  }
}

void save_model(const std::string& dir, const ModelBundle& model,
                const HyperParams& params) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  write_matrix_csv((base / "B.csv").string(), model.dictionary);
  write_matrix_csv((base / "W.csv").string(), model.classifier);
  write_matrix_csv((base / "A.csv").string(), model.transform);

  std::ofstream meta = open_for_write((base / "meta.txt").string());
  meta << "feature_dim=" << model.dictionary.rows() << '\n'
       << "dict_size=" << model.dictionary.cols() << '\n'
       << "num_classes=" << model.classifier.rows() << '\n'
       << "lambda=" << format_double(params.lambda) << '\n'
       << "omega=" << format_double(params.omega) << '\n'
       << "epsilon=" << format_double(params.epsilon) << '\n'
       << "rho=" << format_double(params.rho) << '\n'
       << "theta0=" << format_double(params.theta0) << '\n'
       << "theta_decay=" << format_double(params.theta_decay) << '\n'
       << "theta_min=" << format_double(params.theta_min) << '\n'
       << "max_iter=" << params.max_iter << '\n'
       << "seed=" << params.seed << '\n';
  if (!meta) {
    throw data_error("write failed for meta.txt in '" + dir + "'");
  }
}

std::pair<ModelBundle, HyperParams> load_model(const std::string& dir) {
  const std::filesystem::path base(dir);
  ModelBundle model;
  model.dictionary = read_matrix_csv((base / "B.csv").string());
  model.classifier = read_matrix_csv((base / "W.csv").string());
  model.transform = read_matrix_csv((base / "A.csv").string());

  std::ifstream meta((base / "meta.txt").string());
  if (!meta) {
    throw data_error("cannot open '" + (base / "meta.txt").string() + "'");
  }
  HyperParams params;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(meta, line)) {
    ++line_number;
    const std::string text = trim(line);
    if (text.empty()) {
      continue;
    }
    const auto sep = text.find('=');
    if (sep == std::string::npos) {
      std::ostringstream msg;
      msg << dir << "/meta.txt:" << line_number << ": expected key=value";
      throw parse_error(msg.str());
    }
    const std::string key = text.substr(0, sep);
    const std::string value = text.substr(sep + 1);
    const std::string path = (base / "meta.txt").string();
    if (key == "lambda") {
      params.lambda = parse_double_token(value, path, line_number);
    } else if (key == "omega") {
      params.omega = parse_double_token(value, path, line_number);
    } else if (key == "epsilon") {
      params.epsilon = parse_double_token(value, path, line_number);
    } else if (key == "rho") {
      params.rho = parse_double_token(value, path, line_number);
    } else if (key == "theta0") {
      params.theta0 = parse_double_token(value, path, line_number);
    } else if (key == "theta_decay") {
      params.theta_decay = parse_double_token(value, path, line_number);
    } else if (key == "theta_min") {
      params.theta_min = parse_double_token(value, path, line_number);
    } else if (key == "max_iter") {
      params.max_iter = static_cast<int>(
          parse_double_token(value, path, line_number));
    } else if (key == "seed") {
      params.seed = static_cast<std::uint64_t>(
          std::strtoull(value.c_str(), nullptr, 10));
    } else if (key == "dict_size") {
      params.dict_size = static_cast<int>(
          parse_double_token(value, path, line_number));
    }
    // feature_dim and num_classes are implied by the matrices.
  }

  if (model.classifier.cols() != model.dictionary.cols() ||
      model.transform.rows() != model.dictionary.cols() ||
      model.transform.cols() != model.dictionary.cols()) {
    throw shape_error("load_model: matrix shapes in '" + dir +
                      "' are inconsistent");
  }
  return {std::move(model), params};
}

} // namespace ledl
