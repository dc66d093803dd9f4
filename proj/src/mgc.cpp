// Multiscale generalized correlation.
//
// Pair (i, j) enters the X-neighborhood of scale k when d_x(i, j) ranks
// within the k smallest distances to sample j, and the Y-neighborhood of
// scale l when d_y(j, i) ranks within the l smallest distances to sample i.
// Every local statistic is a truncated Hadamard product of the same
// double-centered matrices used by dcorr, so the (m, m) scale reproduces
// dcorr exactly. All m x m scales are produced in O(m^2 log m) by binning
// each pair at its rank and taking 2-D prefix sums.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <vector>

#include "vscreen/corr.hpp"
#include "vscreen/errors.hpp"

namespace vscreen {

namespace {

constexpr double kDegenerate = 1e-14;
constexpr double kRegionFraction = 0.02;

// ceil(average rank) of d(i, j) within column j, 1-based, column-major.
std::vector<int> column_rank_bins(const Eigen::MatrixXd& d) {
  const Eigen::Index m = d.rows();
  std::vector<int> bins(static_cast<std::size_t>(m * m));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  for (Eigen::Index j = 0; j < m; ++j) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return d(a, j) < d(b, j); });
    std::size_t start = 0;
    while (start < order.size()) {
      std::size_t stop = start + 1;
      while (stop < order.size() && d(order[stop], j) == d(order[start], j)) ++stop;
      // Average of ranks start+1..stop is (start + 1 + stop) / 2.
      const int bin = static_cast<int>((start + 1 + stop + 1) / 2);
      for (std::size_t t = start; t < stop; ++t) {
        bins[static_cast<std::size_t>(order[t] + j * m)] = bin;
      }
      start = stop;
    }
  }
  return bins;
}

void prefix_sum(std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) v[i] += v[i - 1];
}

}  // namespace

Eigen::MatrixXd mgc_local_correlations(const DistanceMatrix& x, const DistanceMatrix& y) {
  if (x.size() != y.size()) throw InputError("sample count mismatch");
  if (x.size() < 4) throw InputError("mgc needs at least 4 samples");
  const auto m = static_cast<Eigen::Index>(x.size());
  const auto mu = static_cast<std::size_t>(m);

  const Eigen::MatrixXd cx = double_center(x);
  const Eigen::MatrixXd cy = double_center(y);
  const std::vector<int> rx = column_rank_bins(x.matrix());
  const std::vector<int> ry = column_rank_bins(y.matrix());

  Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(m, m);
  std::vector<double> sum_x(mu, 0.0), sum_y(mu, 0.0), var_x(mu, 0.0), var_y(mu, 0.0);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto ij = static_cast<std::size_t>(i + j * m);
      const auto ji = static_cast<std::size_t>(j + i * m);
      const int kx = rx[ij] - 1;
      const int ly = ry[ji] - 1;
      const double a = cx(i, j);
      const double b = cy(j, i);
      cross(kx, ly) += a * b;
      sum_x[static_cast<std::size_t>(kx)] += a;
      sum_y[static_cast<std::size_t>(ly)] += b;
      var_x[static_cast<std::size_t>(std::max(rx[ij], rx[ji]) - 1)] += a * cx(j, i);
      var_y[static_cast<std::size_t>(std::max(ry[ij], ry[ji]) - 1)] += cy(i, j) * b;
    }
  }
  for (Eigen::Index k = 0; k < m; ++k) {
    for (Eigen::Index l = 1; l < m; ++l) cross(k, l) += cross(k, l - 1);
  }
  for (Eigen::Index k = 1; k < m; ++k) cross.row(k) += cross.row(k - 1);
  prefix_sum(sum_x);
  prefix_sum(sum_y);
  prefix_sum(var_x);
  prefix_sum(var_y);

  const double m2 = static_cast<double>(m) * static_cast<double>(m);
  std::vector<double> sd_x(mu), sd_y(mu);
  for (std::size_t k = 0; k < mu; ++k) {
    const double vx = var_x[k] / m2 - (sum_x[k] / m2) * (sum_x[k] / m2);
    const double vy = var_y[k] / m2 - (sum_y[k] / m2) * (sum_y[k] / m2);
    sd_x[k] = vx > kDegenerate ? std::sqrt(vx) : 0.0;
    sd_y[k] = vy > kDegenerate ? std::sqrt(vy) : 0.0;
  }

  Eigen::MatrixXd local(m, m);
  for (Eigen::Index l = 0; l < m; ++l) {
    for (Eigen::Index k = 0; k < m; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      const auto lu = static_cast<std::size_t>(l);
      if (sd_x[ku] == 0.0 || sd_y[lu] == 0.0) {
        local(k, l) = 0.0;
        continue;
      }
      const double cov = cross(k, l) / m2 - (sum_x[ku] / m2) * (sum_y[lu] / m2);
      local(k, l) = std::clamp(cov / (sd_x[ku] * sd_y[lu]), 0.0, 1.0);
    }
  }
  // The global scale is defined to be dcorr; pin it so that fallback and
  // region comparisons use the identical value.
  local(m - 1, m - 1) = dcorr(x, y).value;
  return local;
}

CorrelationValue mgc(const DistanceMatrix& x, const DistanceMatrix& y) {
  const Eigen::MatrixXd local = mgc_local_correlations(x, y);
  const Eigen::Index m = local.rows();
  const double global = local(m - 1, m - 1);

  CorrelationValue out{global, StatKind::mgc,
                       std::pair{static_cast<std::size_t>(m), static_cast<std::size_t>(m)}};

  // Largest 4-connected region of scales beating the global statistic.
  std::vector<int> component(static_cast<std::size_t>(m * m), -1);
  auto cell = [m](Eigen::Index k, Eigen::Index l) { return static_cast<std::size_t>(k + l * m); };
  std::size_t best_size = 0;
  int best_label = -1;
  int next_label = 0;
  std::queue<std::pair<Eigen::Index, Eigen::Index>> frontier;
  for (Eigen::Index l = 0; l < m; ++l) {
    for (Eigen::Index k = 0; k < m; ++k) {
      if (local(k, l) <= global || component[cell(k, l)] >= 0) continue;
      const int label = next_label++;
      std::size_t size = 0;
      component[cell(k, l)] = label;
      frontier.emplace(k, l);
      while (!frontier.empty()) {
        const auto [ck, cl] = frontier.front();
        frontier.pop();
        ++size;
        const std::pair<Eigen::Index, Eigen::Index> steps[] = {
            {ck - 1, cl}, {ck + 1, cl}, {ck, cl - 1}, {ck, cl + 1}};
        for (const auto& [nk, nl] : steps) {
          if (nk < 0 || nl < 0 || nk >= m || nl >= m) continue;
          if (local(nk, nl) <= global || component[cell(nk, nl)] >= 0) continue;
          component[cell(nk, nl)] = label;
          frontier.emplace(nk, nl);
        }
      }
      if (size > best_size) {
        best_size = size;
        best_label = label;
      }
    }
  }

  const double min_region = kRegionFraction * static_cast<double>(m) * static_cast<double>(m);
  if (best_label < 0 || static_cast<double>(best_size) <= min_region) return out;

  for (Eigen::Index l = 0; l < m; ++l) {
    for (Eigen::Index k = 0; k < m; ++k) {
      if (component[cell(k, l)] == best_label && local(k, l) > out.value) {
        out.value = local(k, l);
        out.scale = std::pair{static_cast<std::size_t>(k + 1), static_cast<std::size_t>(l + 1)};
      }
    }
  }
  return out;
}

}  // namespace vscreen
