#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "qwadv/dataset.hpp"

namespace qwadv {

// Principal components of flattened adjacency features. Features are mean-
// centered but not variance-scaled (0/1 entries share a scale already); the
// choice is recorded in the JSON summary.
struct PcaResult {
  Eigen::MatrixXd components;          // k x d, unit rows, descending variance
  Eigen::VectorXd explained_variance;  // k nonnegative eigenvalues
  Eigen::MatrixXd projected;           // samples x k
  std::vector<int> labels;
  double total_variance = 0.0;
};

// Requires k >= 1, k <= feature count, and more samples than k. All samples
// must share one adjacency size. Throws std::invalid_argument on a dataset
// with zero variance (no principal directions exist).
// Component signs are fixed by making each component's largest-magnitude
// coordinate positive.
PcaResult pca(const Dataset& ds, int k);

// CSV rows "pc1,...,pck,label", one per sample.
std::string projection_to_csv(const PcaResult& r);

// Summary with explained variances and the preprocessing choices.
std::string pca_summary_json(const PcaResult& r);

}  // namespace qwadv
