#pragma once

#include <utility>
#include <vector>

#include "ledl/types.hpp"

namespace ledl {

/// 0-based class ids, one per sample.
struct Labels {
  std::vector<int> ids;
  int num_classes = 0;
};

/// Throws data_error when a label falls outside [0, num_classes).
void validate_labels(const Labels& labels);

/// One-hot label matrix H, num_classes x N.
Matrix build_label_matrix(const Labels& labels);

/// Binary target codes Q (dict_size x N) plus the atom->class assignment.
/// Atoms are split into contiguous per-class blocks, balanced to within one
/// atom with the remainder going to the lowest class ids.
struct DiscriminativeCodes {
  Matrix codes;
  std::vector<int> atom_class;
};

DiscriminativeCodes build_discriminative_codes(const Labels& labels, int dict_size);

/// Scales each column to unit l2 norm. Zero columns pass through unchanged.
Matrix l2_normalize_columns(const Matrix& m);

struct DatasetSplit {
  Matrix features;
  Labels labels;
  std::vector<int> source_columns; // column indices into the original matrix
};

/// Draws per_class training samples per class without replacement from a
/// seeded generator; everything else lands in the test split. Deterministic
/// for a given seed.
std::pair<DatasetSplit, DatasetSplit> split_dataset(const Matrix& features,
                                                    const Labels& labels,
                                                    int per_class,
                                                    std::uint64_t seed);

} // namespace ledl
