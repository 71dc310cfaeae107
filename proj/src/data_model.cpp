#include "ledl/data_model.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

namespace ledl {

void validate_labels(const Labels& labels) {
  if (labels.num_classes < 1) {
    throw data_error("labels: num_classes must be at least 1");
  }
  if (labels.ids.empty()) {
    throw data_error("labels: no samples");
  }
  for (std::size_t i = 0; i < labels.ids.size(); ++i) {
    const int id = labels.ids[i];
    if (id < 0 || id >= labels.num_classes) {
      std::ostringstream msg;
      msg << "labels: sample " << i << " has class " << id
          << ", outside [0, " << labels.num_classes << ")";
      throw data_error(msg.str());
    }
  }
}

Matrix build_label_matrix(const Labels& labels) {
  validate_labels(labels);
  const Index n = static_cast<Index>(labels.ids.size());
  Matrix h = Matrix::Zero(labels.num_classes, n);
  for (Index i = 0; i < n; ++i) {
    h(labels.ids[static_cast<std::size_t>(i)], i) = 1.0;
  }
  return h;
}

DiscriminativeCodes build_discriminative_codes(const Labels& labels,
                                               int dict_size) {
  validate_labels(labels);
  if (dict_size < labels.num_classes) {
    std::ostringstream msg;
    msg << "dict_size " << dict_size << " is smaller than the class count "
        << labels.num_classes;
    throw config_error(msg.str());
  }

  // Contiguous per-class blocks, remainder atoms to the lowest class ids.
  DiscriminativeCodes result;
  result.atom_class.reserve(static_cast<std::size_t>(dict_size));
  const int base = dict_size / labels.num_classes;
  const int remainder = dict_size % labels.num_classes;
  for (int c = 0; c < labels.num_classes; ++c) {
    const int count = base + (c < remainder ? 1 : 0);
    for (int j = 0; j < count; ++j) {
      result.atom_class.push_back(c);
    }
  }

  const Index n = static_cast<Index>(labels.ids.size());
  result.codes = Matrix::Zero(dict_size, n);
  for (Index i = 0; i < n; ++i) {
    const int cls = labels.ids[static_cast<std::size_t>(i)];
    for (int k = 0; k < dict_size; ++k) {
      if (result.atom_class[static_cast<std::size_t>(k)] == cls) {
        result.codes(k, i) = 1.0;
      }
    }
  }
  return result;
}

Matrix l2_normalize_columns(const Matrix& m) {
  Matrix out = m;
  for (Index k = 0; k < out.cols(); ++k) {
    const double norm = out.col(k).norm();
    if (norm > 0.0) {
      out.col(k) /= norm;
    }
  }
  return out;
}

std::pair<DatasetSplit, DatasetSplit> split_dataset(const Matrix& features,
                                                    const Labels& labels,
                                                    int per_class,
                                                    std::uint64_t seed) {
  validate_labels(labels);
  if (features.cols() != static_cast<Index>(labels.ids.size())) {
    throw shape_error("split_dataset: feature columns and label count differ");
  }
  if (per_class < 1) {
    throw config_error("split_dataset: per_class must be at least 1");
  }

  std::vector<std::vector<int>> by_class(
      static_cast<std::size_t>(labels.num_classes));
  for (std::size_t i = 0; i < labels.ids.size(); ++i) {
    by_class[static_cast<std::size_t>(labels.ids[i])].push_back(
        static_cast<int>(i));
  }

  std::mt19937_64 rng(seed);
  std::vector<int> train_cols;
  std::vector<char> in_train(labels.ids.size(), 0);
  for (int c = 0; c < labels.num_classes; ++c) {
    auto& pool = by_class[static_cast<std::size_t>(c)];
    if (static_cast<int>(pool.size()) < per_class) {
      std::ostringstream msg;
      msg << "class " << c << " has " << pool.size()
          << " samples, fewer than per_class " << per_class;
      throw data_error(msg.str());
    }
    // Partial Fisher-Yates: the first per_class entries are a uniform draw
    // without replacement.
    for (int j = 0; j < per_class; ++j) {
      const std::size_t pick =
          static_cast<std::size_t>(j) +
          uniform_index(rng, pool.size() - static_cast<std::size_t>(j));
      std::swap(pool[static_cast<std::size_t>(j)], pool[pick]);
    }
    std::sort(pool.begin(), pool.begin() + per_class);
    for (int j = 0; j < per_class; ++j) {
      const int col = pool[static_cast<std::size_t>(j)];
      train_cols.push_back(col);
      in_train[static_cast<std::size_t>(col)] = 1;
    }
  }

  std::vector<int> test_cols;
  for (std::size_t i = 0; i < labels.ids.size(); ++i) {
    if (!in_train[i]) {
      test_cols.push_back(static_cast<int>(i));
    }
  }

  const auto gather = [&](const std::vector<int>& cols) {
    DatasetSplit split;
    split.features.resize(features.rows(), static_cast<Index>(cols.size()));
    split.labels.num_classes = labels.num_classes;
    split.labels.ids.reserve(cols.size());
    split.source_columns = cols;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      split.features.col(static_cast<Index>(j)) = features.col(cols[j]);
      split.labels.ids.push_back(labels.ids[static_cast<std::size_t>(cols[j])]);
    }
    return split;
  };

  return {gather(train_cols), gather(test_cols)};
}

} // namespace ledl
