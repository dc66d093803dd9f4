#pragma once

// Two-block IER mixtures used for the simulation studies.
//
// Each class y draws graphs from IER(P^y) where the first `signal` vertices
// form a block with within-block probability p^y, signal-to-background
// pairs have probability `cross`, and background pairs `background`. Only
// the signal block differs between classes, so its vertices are exactly
// the signal vertices.

#include <cstddef>
#include <string_view>
#include <vector>

#include "vscreen/classify.hpp"
#include "vscreen/graph.hpp"
#include "vscreen/rng.hpp"

namespace vscreen {

enum class ExperimentKind { exp1, exp2 };

ExperimentKind parse_experiment(std::string_view text);
std::string_view to_string(ExperimentKind kind);

struct BlockModelSpec {
  std::size_t vertices = 200;
  std::size_t signal = 20;
  std::vector<double> signal_probabilities;
  double cross = 0.2;
  double background = 0.3;
};

/// Class y in 0..k-1 with uniform priors.
IerClassModel block_model(const BlockModelSpec& spec);

/// exp1: two classes with p = (0.3, 0.4). exp2: three classes with
/// p = (0.3, 0.4, 0.5). Both use 200 vertices, 20 of them signal.
IerClassModel experiment_model(ExperimentKind kind);

/// Draws a label from the priors, then a graph from that class.
LabeledGraph draw_graph(const IerClassModel& model, Rng& rng);

/// m independent labeled draws.
LabeledGraphDataset simulate_dataset(const IerClassModel& model, std::size_t m, Rng& rng);

/// Vertices whose edge probabilities differ across classes.
VertexSet true_signal_vertices(const IerClassModel& model);

}  // namespace vscreen
