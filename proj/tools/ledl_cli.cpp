// Command-line front end: `train` runs the repeated-trial protocol on a
// features/labels pair, `eval` re-scores a saved model on new samples.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "ledl/classifiers.hpp"
#include "ledl/experiment.hpp"

namespace {

int run_train(ledl::ExperimentConfig config, double alpha, bool alpha_set) {
  if (config.method == ledl::Method::src && alpha_set) {
    config.params.epsilon = alpha; // SRC's sparsity knob, defaults to epsilon
  }
  const ledl::ExperimentResult result = ledl::run_experiment(config);

  for (std::size_t r = 0; r < result.per_repeat_accuracy.size(); ++r) {
    std::cout << "repeat " << (r + 1) << ": accuracy "
              << result.per_repeat_accuracy[r] << '\n';
  }
  std::cout << "mean accuracy: " << result.mean_accuracy << '\n';
  if (!config.out_dir.empty()) {
    std::cout << "metrics written to " << config.out_dir << '\n';
  }
  return 0;
}

int run_eval(const std::string& model_dir, const std::string& features_path,
             const std::string& labels_path, const std::string& out_dir) {
  auto [model, params] = ledl::load_model(model_dir);
  const ledl::Dataset dataset = ledl::load_dataset(features_path, labels_path);
  if (dataset.features.rows() != model.dictionary.rows()) {
    throw ledl::shape_error("eval: feature dimension " +
                            std::to_string(dataset.features.rows()) +
                            " does not match the model's " +
                            std::to_string(model.dictionary.rows()));
  }
  const ledl::Matrix features = ledl::l2_normalize_columns(dataset.features);

  const std::vector<ledl::Prediction> predictions =
      ledl::predict_ledl_batch(model, features, params);

  const int classes = static_cast<int>(model.classifier.rows());
  Eigen::MatrixXi confusion = Eigen::MatrixXi::Zero(classes, classes);
  int correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const int truth = dataset.labels.ids[i];
    if (truth >= classes) {
      throw ledl::data_error("eval: label " + std::to_string(truth) +
                             " exceeds the model's " +
                             std::to_string(classes) + " classes");
    }
    confusion(truth, predictions[i].label) += 1;
    if (predictions[i].label == truth) {
      ++correct;
    }
  }
  const double accuracy = predictions.empty()
                              ? 0.0
                              : static_cast<double>(correct) /
                                    static_cast<double>(predictions.size());
  std::cout << "accuracy: " << accuracy << " (" << correct << "/"
            << predictions.size() << ")\n";

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path base(out_dir);
    std::ofstream pred_out(base / "predictions.csv");
    if (!pred_out) {
      throw ledl::data_error("cannot open '" +
                             (base / "predictions.csv").string() +
                             "' for writing");
    }
    pred_out << "sample,truth,predicted\n";
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      pred_out << i << ',' << dataset.labels.ids[i] << ','
               << predictions[i].label << '\n';
    }
    std::ofstream conf_out(base / "confusion.csv");
    if (!conf_out) {
      throw ledl::data_error("cannot open '" +
                             (base / "confusion.csv").string() +
                             "' for writing");
    }
    for (int c = 0; c < classes; ++c) {
      conf_out << (c > 0 ? "," : "") << "pred_" << c;
    }
    conf_out << '\n';
    for (int truth = 0; truth < classes; ++truth) {
      for (int predicted = 0; predicted < classes; ++predicted) {
        conf_out << (predicted > 0 ? "," : "") << confusion(truth, predicted);
      }
      conf_out << '\n';
    }
    std::cout << "predictions written to " << out_dir << '\n';
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Label-embedded dictionary learning trainer and classifier"};
  app.require_subcommand(1);

  ledl::ExperimentConfig config;
  std::string method = "ledl";
  double alpha = 0.0;
  bool no_early_stop = false;
  bool no_save_models = false;

  CLI::App* train = app.add_subcommand("train", "run the repeated-trial protocol");
  train->add_option("--features", config.features_path,
                    "CSV features, one sample per line")->required();
  train->add_option("--labels", config.labels_path,
                    "0-based integer labels, one per line")->required();
  train->add_option("--method", method, "ledl or src")
      ->check(CLI::IsMember({"ledl", "src"}));
  train->add_option("--lambda", config.params.lambda, "classification-error weight");
  train->add_option("--omega", config.params.omega, "discriminative-codes weight");
  train->add_option("--epsilon", config.params.epsilon, "l1 sparsity weight");
  CLI::Option* alpha_opt =
      train->add_option("--alpha", alpha, "src sparsity weight (defaults to --epsilon)");
  train->add_option("--rho", config.params.rho, "penalty parameter");
  train->add_option("--theta0", config.params.theta0, "initial dual step size");
  train->add_option("--theta-decay", config.params.theta_decay,
                    "per-iteration dual step decay");
  train->add_option("--theta-min", config.params.theta_min,
                    "dual step floor");
  train->add_option("--dict-mult", config.dict_mult,
                    "dictionary size as a multiple of the training count");
  train->add_option("--dict-size", config.dict_size,
                    "fixed dictionary size (overrides --dict-mult)");
  train->add_option("--per-class", config.per_class_train,
                    "training samples drawn per class");
  train->add_option("--repeats", config.repeats, "number of random splits");
  train->add_option("--max-iter", config.params.max_iter, "training iteration cap");
  train->add_option("--seed", config.params.seed, "base RNG seed");
  train->add_flag("--no-early-stop", no_early_stop,
                  "always run the full iteration count");
  train->add_flag("--no-save-models", no_save_models,
                  "skip writing model_r<k>/ directories");
  train->add_option("--out", config.out_dir, "output directory for metrics");

  std::string model_dir;
  std::string eval_features;
  std::string eval_labels;
  std::string eval_out;
  CLI::App* eval = app.add_subcommand("eval", "score a saved model");
  eval->add_option("--model", model_dir, "directory written by train")->required();
  eval->add_option("--features", eval_features, "CSV features to score")->required();
  eval->add_option("--labels", eval_labels, "ground-truth labels")->required();
  eval->add_option("--out", eval_out, "output directory for predictions");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      config.method = (method == "src") ? ledl::Method::src : ledl::Method::ledl;
      config.params.early_stop = !no_early_stop;
      config.save_models = !no_save_models;
      return run_train(config, alpha, alpha_opt->count() > 0);
    }
    return run_eval(model_dir, eval_features, eval_labels, eval_out);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
}
