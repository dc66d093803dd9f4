#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "vscreen/corr.hpp"
#include "vscreen/graph.hpp"

namespace vscreen {

/// Elimination marker for vertices still present in the final level.
inline constexpr std::size_t kSurvivor = std::numeric_limits<std::size_t>::max();

struct ScreeningLevel {
  VertexSet vertices;
  /// Statistic between the flattened induced subgraphs and the labels.
  /// NaN when not computed (one-shot screening).
  double correlation;
};

struct ScreeningResult {
  std::size_t vertex_count = 0;
  StatKind stat = StatKind::dcorr;
  bool iterative = false;
  /// delta for iterative screening, threshold c for one-shot.
  double parameter = 0.0;
  /// Last score computed for each vertex.
  std::vector<double> scores;
  /// Scores from the first round, every vertex on the full graph.
  std::vector<double> initial_scores;
  /// Level index at which each vertex was removed, or kSurvivor.
  std::vector<std::size_t> elimination;
  /// V_1 ⊋ V_2 ⊋ ... for iterative screening; a single level otherwise.
  std::vector<ScreeningLevel> levels;
  std::size_t selected_level = 0;
  VertexSet selected;
};

/// Statistic between vertex_feature(A_i, u, restrict) and the labels for each
/// u in `restrict`, in restrict order. Vertices are scored in parallel; the
/// output does not depend on the worker count.
std::vector<double> score_vertices(const LabeledGraphDataset& data, const VertexSet& restrict,
                                   StatKind stat, Metric label_metric = Metric::discrete);

/// Statistic between the flattened induced subgraphs A_i[V] and the labels.
double subgraph_correlation(const LabeledGraphDataset& data, const VertexSet& vertices,
                            StatKind stat, Metric label_metric = Metric::discrete);

/// Scores every vertex and keeps those strictly above `threshold`.
ScreeningResult screen_once(const LabeledGraphDataset& data, double threshold,
                            StatKind stat = StatKind::dcorr,
                            Metric label_metric = Metric::discrete);

/// Repeatedly scores the surviving vertices on their induced subgraph and
/// drops those at or below the delta-quantile, until at most `min_size`
/// remain. Selects the level whose induced subgraph correlates best with
/// the labels, preferring the larger subgraph on ties.
///
/// When strict exceedance would keep every vertex or none (tied scores),
/// the top ceil((1 - delta) |V_k|) vertices by score are kept instead, ties
/// going to the smaller index, so each round removes at least one vertex.
ScreeningResult screen_iterative(const LabeledGraphDataset& data, double delta = 0.5,
                                 StatKind stat = StatKind::dcorr, std::size_t min_size = 1,
                                 Metric label_metric = Metric::discrete);

/// Linear-interpolation empirical quantile (Hyndman-Fan type 7).
double empirical_quantile(std::span<const double> values, double q);

struct GapSelection {
  VertexSet selected;
  /// All scores were equal; the full set is returned.
  bool degenerate = false;
};

/// Cuts the descending score sequence at its largest consecutive drop.
/// `scores[v]` is the score of vertex v.
GapSelection select_size_by_gap(std::span<const double> scores);

/// Total order over all vertices, best first. One-shot: by score. Iterative:
/// by elimination depth (survivors first), then score, then index.
std::vector<std::size_t> vertex_ranking(const ScreeningResult& result);

/// First `k` entries of a ranking as a vertex set.
VertexSet top_ranked(std::span<const std::size_t> ranking, std::size_t k);

}  // namespace vscreen
