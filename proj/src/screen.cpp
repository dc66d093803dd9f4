#include "vscreen/screen.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <string>

#include "features.hpp"
#include "vscreen/errors.hpp"

namespace vscreen {

namespace {

// Label-side quantities shared by every vertex of a screening pass.
class LabelSide {
 public:
  LabelSide(std::span<const int> labels, StatKind stat, Metric metric)
      : stat_(stat), distances_(pairwise_distances(labels, metric)), centered_(distances_) {
    if (stat == StatKind::rv || stat == StatKind::cca) one_hot_ = one_hot(labels);
  }

  double correlate(const LabeledGraphDataset& data, std::size_t u, const VertexSet& restrict) const {
    switch (stat_) {
      case StatKind::dcorr:
        return detail::vertex_dcorr(data, u, restrict, centered_);
      case StatKind::mgc:
        return mgc(detail::vertex_distances(data, u, restrict), distances_).value;
      case StatKind::rv:
        return rv_coefficient(detail::vertex_samples(data, u, restrict), one_hot_).value;
      case StatKind::cca:
        return cca_corr(detail::vertex_samples(data, u, restrict), one_hot_).value;
    }
    return 0.0;
  }

  double correlate_subgraph(const LabeledGraphDataset& data, const VertexSet& vertices) const {
    switch (stat_) {
      case StatKind::dcorr:
        return detail::subgraph_dcorr(data, vertices, centered_);
      case StatKind::mgc:
        return mgc(detail::subgraph_distances(data, vertices), distances_).value;
      case StatKind::rv:
        return rv_coefficient(detail::subgraph_samples(data, vertices), one_hot_).value;
      case StatKind::cca:
        return cca_corr(detail::subgraph_samples(data, vertices), one_hot_).value;
    }
    return 0.0;
  }

 private:
  StatKind stat_;
  DistanceMatrix distances_;
  CenteredDistances centered_;
  Eigen::MatrixXd one_hot_;
};

void require_screenable(const LabeledGraphDataset& data, StatKind stat) {
  if (stat == StatKind::mgc && data.size() < 4) throw InputError("mgc needs at least 4 graphs");
}

std::vector<double> score_with(const LabeledGraphDataset& data, const VertexSet& restrict,
                               const LabelSide& side) {
  std::vector<double> scores(restrict.size(), 0.0);
  std::exception_ptr failure;
  const auto count = static_cast<long>(restrict.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    try {
      const auto idx = static_cast<std::size_t>(i);
      scores[idx] = side.correlate(data, restrict[idx], restrict);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return scores;
}

// Indices of the `keep` largest scores, ties to the smaller position.
std::vector<std::size_t> top_positions(std::span<const double> scores, std::size_t keep) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(keep);
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace

std::vector<double> score_vertices(const LabeledGraphDataset& data, const VertexSet& restrict,
                                   StatKind stat, Metric label_metric) {
  if (restrict.empty()) throw InputError("restriction set must be non-empty");
  restrict.require_within(data.vertex_count());
  require_screenable(data, stat);
  const LabelSide side(data.labels(), stat, label_metric);
  return score_with(data, restrict, side);
}

double subgraph_correlation(const LabeledGraphDataset& data, const VertexSet& vertices,
                            StatKind stat, Metric label_metric) {
  vertices.require_within(data.vertex_count());
  require_screenable(data, stat);
  const LabelSide side(data.labels(), stat, label_metric);
  return side.correlate_subgraph(data, vertices);
}

ScreeningResult screen_once(const LabeledGraphDataset& data, double threshold, StatKind stat,
                            Metric label_metric) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw InputError("threshold must lie in [0, 1]");
  const std::size_t n = data.vertex_count();
  const VertexSet all = VertexSet::full(n);

  ScreeningResult result;
  result.vertex_count = n;
  result.stat = stat;
  result.iterative = false;
  result.parameter = threshold;
  result.scores = score_vertices(data, all, stat, label_metric);
  result.initial_scores = result.scores;
  result.elimination.assign(n, kSurvivor);

  std::vector<std::size_t> kept;
  for (std::size_t v = 0; v < n; ++v) {
    if (result.scores[v] > threshold) kept.push_back(v);
  }
  result.selected = VertexSet(std::move(kept));
  result.levels.push_back({all, std::nan("")});
  return result;
}

ScreeningResult screen_iterative(const LabeledGraphDataset& data, double delta, StatKind stat,
                                 std::size_t min_size, Metric label_metric) {
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("delta must lie in (0, 1)");
  if (min_size < 1) throw InputError("min_size must be at least 1");
  require_screenable(data, stat);
  const std::size_t n = data.vertex_count();
  const LabelSide side(data.labels(), stat, label_metric);

  ScreeningResult result;
  result.vertex_count = n;
  result.stat = stat;
  result.iterative = true;
  result.parameter = delta;
  result.scores.assign(n, 0.0);
  result.elimination.assign(n, kSurvivor);

  VertexSet current = VertexSet::full(n);
  for (std::size_t level = 0;; ++level) {
    result.levels.push_back({current, side.correlate_subgraph(data, current)});
    if (current.size() <= min_size) break;

    const std::vector<double> scores = score_with(data, current, side);
    for (std::size_t p = 0; p < current.size(); ++p) result.scores[current[p]] = scores[p];
    if (level == 0) result.initial_scores = scores;

    const double cut = empirical_quantile(scores, delta);
    std::vector<std::size_t> keep;
    for (std::size_t p = 0; p < scores.size(); ++p) {
      if (scores[p] > cut) keep.push_back(p);
    }
    if (keep.empty() || keep.size() == scores.size()) {
      const auto target = static_cast<std::size_t>(
          std::ceil((1.0 - delta) * static_cast<double>(scores.size())));
      keep = top_positions(scores, std::clamp<std::size_t>(target, 1, scores.size() - 1));
    }

    std::vector<std::size_t> survivors;
    survivors.reserve(keep.size());
    std::size_t next = 0;
    for (std::size_t p = 0; p < current.size(); ++p) {
      if (next < keep.size() && keep[next] == p) {
        survivors.push_back(current[p]);
        ++next;
      } else {
        result.elimination[current[p]] = level;
      }
    }
    current = VertexSet(std::move(survivors));
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k < result.levels.size(); ++k) {
    if (result.levels[k].correlation > result.levels[best].correlation) best = k;
  }
  result.selected_level = best;
  result.selected = result.levels[best].vertices;
  return result;
}

double empirical_quantile(std::span<const double> values, double q) {
  if (values.empty()) throw InputError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw InputError("quantile level must lie in [0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

GapSelection select_size_by_gap(std::span<const double> scores) {
  if (scores.size() < 2) throw InputError("gap selection needs at least 2 vertices");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::size_t cut = 0;
  double widest = 0.0;
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    const double gap = scores[order[i]] - scores[order[i + 1]];
    if (gap > widest) {
      widest = gap;
      cut = i;
    }
  }
  GapSelection out;
  if (widest <= 0.0) {
    out.selected = VertexSet::full(scores.size());
    out.degenerate = true;
    return out;
  }
  out.selected = VertexSet(std::vector<std::size_t>(order.begin(), order.begin() + static_cast<long>(cut) + 1));
  return out;
}

std::vector<std::size_t> vertex_ranking(const ScreeningResult& result) {
  std::vector<std::size_t> order(result.vertex_count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto& score = result.scores;
  const auto& depth = result.elimination;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (result.iterative && depth[a] != depth[b]) return depth[a] > depth[b];
    return score[a] > score[b];
  });
  return order;
}

VertexSet top_ranked(std::span<const std::size_t> ranking, std::size_t k) {
  if (k > ranking.size()) throw InputError("requested more vertices than ranked");
  return VertexSet(std::vector<std::size_t>(ranking.begin(), ranking.begin() + static_cast<long>(k)));
}

}  // namespace vscreen
