#include "vscreen/experiments.hpp"

#include <string>

#include "vscreen/errors.hpp"

namespace vscreen {

ExperimentKind parse_experiment(std::string_view text) {
  if (text == "exp1" || text == "experiment-1") return ExperimentKind::exp1;
  if (text == "exp2" || text == "experiment-2") return ExperimentKind::exp2;
  throw InputError("unknown experiment '" + std::string(text) + "'");
}

std::string_view to_string(ExperimentKind kind) {
  return kind == ExperimentKind::exp1 ? "exp1" : "exp2";
}

IerClassModel block_model(const BlockModelSpec& spec) {
  if (spec.signal > spec.vertices) throw InputError("signal block larger than the graph");
  if (spec.signal_probabilities.empty()) throw InputError("need at least one class");
  const auto n = static_cast<Eigen::Index>(spec.vertices);
  const auto s = static_cast<Eigen::Index>(spec.signal);
  const std::size_t classes = spec.signal_probabilities.size();

  IerClassModel model;
  for (std::size_t y = 0; y < classes; ++y) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Constant(n, n, spec.background);
    p.topLeftCorner(s, s).setConstant(spec.signal_probabilities[y]);
    p.topRightCorner(s, n - s).setConstant(spec.cross);
    p.bottomLeftCorner(n - s, s).setConstant(spec.cross);
    p.diagonal().setZero();
    model.classes.push_back(static_cast<int>(y));
    model.priors.push_back(1.0 / static_cast<double>(classes));
    model.probabilities.emplace_back(std::move(p));
  }
  return model;
}

IerClassModel experiment_model(ExperimentKind kind) {
  BlockModelSpec spec;
  spec.signal_probabilities = kind == ExperimentKind::exp1 ? std::vector<double>{0.3, 0.4}
                                                           : std::vector<double>{0.3, 0.4, 0.5};
  return block_model(spec);
}

LabeledGraph draw_graph(const IerClassModel& model, Rng& rng) {
  const double u = rng.uniform();
  std::size_t c = 0;
  double cumulative = model.priors[0];
  while (c + 1 < model.priors.size() && u >= cumulative) cumulative += model.priors[++c];
  return {sample_ier(model.probabilities[c], rng), model.classes[c]};
}

LabeledGraphDataset simulate_dataset(const IerClassModel& model, std::size_t m, Rng& rng) {
  if (m < 2) throw InputError("simulation needs at least 2 graphs");
  std::vector<AdjacencyMatrix> graphs;
  std::vector<int> labels;
  graphs.reserve(m);
  labels.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    LabeledGraph draw = draw_graph(model, rng);
    graphs.push_back(std::move(draw.graph));
    labels.push_back(draw.label);
  }
  return LabeledGraphDataset(std::move(graphs), std::move(labels));
}

VertexSet true_signal_vertices(const IerClassModel& model) {
  return signal_vertices(model.probabilities);
}

}  // namespace vscreen
