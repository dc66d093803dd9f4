#include "features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

namespace vscreen::detail {

namespace {

class PackedRows {
 public:
  PackedRows(std::size_t rows, std::size_t bits)
      : rows_(rows), words_((bits + 63) / 64), data_(rows * words_, 0) {}

  void set(std::size_t row, std::size_t bit) {
    data_[row * words_ + bit / 64] |= std::uint64_t{1} << (bit % 64);
  }

  int hamming(std::size_t i, std::size_t j) const {
    const std::uint64_t* a = &data_[i * words_];
    const std::uint64_t* b = &data_[j * words_];
    int count = 0;
    for (std::size_t w = 0; w < words_; ++w) count += std::popcount(a[w] ^ b[w]);
    return count;
  }

  DistanceMatrix distances() const {
    const auto m = static_cast<Eigen::Index>(rows_);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t i = 0; i < rows_; ++i) {
      const std::uint64_t* a = &data_[i * words_];
      for (std::size_t j = i + 1; j < rows_; ++j) {
        const std::uint64_t* b = &data_[j * words_];
        int count = 0;
        for (std::size_t w = 0; w < words_; ++w) count += std::popcount(a[w] ^ b[w]);
        const double v = std::sqrt(static_cast<double>(count));
        d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        d(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
      }
    }
    return DistanceMatrix::unchecked(std::move(d), Metric::euclidean);
  }

 private:
  std::size_t rows_;
  std::size_t words_;
  std::vector<std::uint64_t> data_;
};

// dcorr from one pass over the pairs i < j. With R_i the row sums of D,
// sum C_x o C_x = sum D^2 - (2/m) sum R_i^2 + (sum R)^2 / m^2, and because
// C_y has zero row and column sums, sum C_x o C_y = sum D o C_y.
template <typename Distance>
double fused_dcorr(std::size_t m, Distance&& distance, const CenteredDistances& labels) {
  constexpr double kDegenerate = 1e-14;
  const Eigen::MatrixXd& cy = labels.centered;
  std::vector<double> row(m, 0.0);
  double squares = 0.0;
  double cross = 0.0;
  for (std::size_t j = 1; j < m; ++j) {
    const double* cy_col = cy.data() + j * m;
    double row_j = 0.0;
    for (std::size_t i = 0; i < j; ++i) {
      const double d = distance(i, j);
      row[i] += d;
      row_j += d;
      squares += d * d;
      cross += d * cy_col[i];
    }
    row[j] += row_j;
  }
  double total = 0.0;
  double row_squares = 0.0;
  for (double r : row) {
    total += r;
    row_squares += r * r;
  }
  const double md = static_cast<double>(m);
  const double m2 = md * md;
  const double self = (2.0 * squares - 2.0 * row_squares / md + total * total / m2) / m2;
  if (self <= kDegenerate || labels.self_dcov_sq <= kDegenerate) return 0.0;
  const double value = std::max(0.0, 2.0 * cross / m2) / std::sqrt(self * labels.self_dcov_sq);
  return std::min(value, 1.0);
}

double packed_dcorr(const PackedRows& packed, std::size_t m, std::size_t bits,
                    const CenteredDistances& labels) {
  std::vector<double> root(bits + 1);
  for (std::size_t h = 0; h <= bits; ++h) root[h] = std::sqrt(static_cast<double>(h));
  return fused_dcorr(
      m, [&](std::size_t i, std::size_t j) { return root[static_cast<std::size_t>(packed.hamming(i, j))]; },
      labels);
}

double dense_dcorr(const SampleMatrix& x, const CenteredDistances& labels) {
  const Eigen::MatrixXd xt = x.transpose();
  return fused_dcorr(
      static_cast<std::size_t>(x.rows()),
      [&](std::size_t i, std::size_t j) {
        return (xt.col(static_cast<Eigen::Index>(i)) - xt.col(static_cast<Eigen::Index>(j))).norm();
      },
      labels);
}

// Entry A(u, v) read along a contiguous column when the graph is symmetric.
double row_entry(const AdjacencyMatrix& a, std::size_t u, std::size_t v) {
  return a.directed() ? a(u, v) : a(v, u);
}

template <typename Visit>
void for_each_subgraph_entry(const AdjacencyMatrix& a, const VertexSet& vertices, Visit visit) {
  std::size_t slot = 0;
  const std::size_t k = vertices.size();
  for (std::size_t q = 0; q < k; ++q) {
    for (std::size_t p = 0; p < k; ++p) {
      if (p == q || (!a.directed() && p > q)) continue;
      visit(slot++, a(vertices[p], vertices[q]));
    }
  }
}

std::size_t subgraph_width(bool directed, std::size_t k) {
  if (k < 2) return 0;
  return directed ? k * (k - 1) : k * (k - 1) / 2;
}

PackedRows pack_vertex(const LabeledGraphDataset& data, std::size_t u, const VertexSet& restrict) {
  PackedRows packed(data.size(), restrict.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const AdjacencyMatrix& a = data.graph(i);
    for (std::size_t p = 0; p < restrict.size(); ++p) {
      if (row_entry(a, u, restrict[p]) != 0.0) packed.set(i, p);
    }
  }
  return packed;
}

PackedRows pack_subgraph(const LabeledGraphDataset& data, const VertexSet& vertices) {
  PackedRows packed(data.size(), subgraph_width(data.directed(), vertices.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    for_each_subgraph_entry(data.graph(i), vertices, [&](std::size_t slot, double w) {
      if (w != 0.0) packed.set(i, slot);
    });
  }
  return packed;
}

}  // namespace

SampleMatrix vertex_samples(const LabeledGraphDataset& data, std::size_t u,
                            const VertexSet& restrict) {
  const auto m = static_cast<Eigen::Index>(data.size());
  SampleMatrix x(m, static_cast<Eigen::Index>(restrict.size()));
  for (Eigen::Index i = 0; i < m; ++i) {
    x.row(i) = vertex_feature(data.graph(static_cast<std::size_t>(i)), u, restrict).transpose();
  }
  return x;
}

DistanceMatrix vertex_distances(const LabeledGraphDataset& data, std::size_t u,
                                const VertexSet& restrict) {
  if (!data.binary()) return pairwise_distances(vertex_samples(data, u, restrict));
  return pack_vertex(data, u, restrict).distances();
}

double vertex_dcorr(const LabeledGraphDataset& data, std::size_t u, const VertexSet& restrict,
                    const CenteredDistances& labels) {
  if (!data.binary()) return dense_dcorr(vertex_samples(data, u, restrict), labels);
  return packed_dcorr(pack_vertex(data, u, restrict), data.size(), restrict.size(), labels);
}

double subgraph_dcorr(const LabeledGraphDataset& data, const VertexSet& vertices,
                      const CenteredDistances& labels) {
  if (!data.binary()) return dense_dcorr(subgraph_samples(data, vertices), labels);
  const std::size_t width = subgraph_width(data.directed(), vertices.size());
  return packed_dcorr(pack_subgraph(data, vertices), data.size(), width, labels);
}

SampleMatrix subgraph_samples(const LabeledGraphDataset& data, const VertexSet& vertices) {
  const auto m = static_cast<Eigen::Index>(data.size());
  const std::size_t width = subgraph_width(data.directed(), vertices.size());
  SampleMatrix x(m, static_cast<Eigen::Index>(width));
  for (Eigen::Index i = 0; i < m; ++i) {
    for_each_subgraph_entry(data.graph(static_cast<std::size_t>(i)), vertices,
                            [&](std::size_t slot, double w) {
                              x(i, static_cast<Eigen::Index>(slot)) = w;
                            });
  }
  return x;
}

DistanceMatrix subgraph_distances(const LabeledGraphDataset& data, const VertexSet& vertices) {
  if (!data.binary()) return pairwise_distances(subgraph_samples(data, vertices));
  return pack_subgraph(data, vertices).distances();
}

}  // namespace vscreen::detail
