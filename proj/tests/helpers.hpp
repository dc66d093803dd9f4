#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "vscreen/graph.hpp"
#include "vscreen/rng.hpp"

namespace testing {

inline double normal(vscreen::Rng& rng) {
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline Eigen::MatrixXd normal_matrix(vscreen::Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd x(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) x(i, j) = normal(rng);
  }
  return x;
}

inline std::vector<int> random_labels(vscreen::Rng& rng, std::size_t m, int classes) {
  std::vector<int> y(m);
  for (int& v : y) v = static_cast<int>(rng.index(static_cast<std::size_t>(classes)));
  return y;
}

inline vscreen::AdjacencyMatrix random_graph(vscreen::Rng& rng, std::size_t n, double p) {
  return vscreen::sample_ier(
      vscreen::EdgeProbabilityMatrix(Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n),
                                                               static_cast<Eigen::Index>(n), p)),
      rng);
}

}  // namespace testing
