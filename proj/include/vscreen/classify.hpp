#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "vscreen/graph.hpp"
#include "vscreen/rng.hpp"

namespace vscreen {

namespace detail {

// Per-class log P and log(1 - P) over the pairs u < v of an induced
// subgraph, plus log priors. Scores a graph in one pass per class.
class LogLikelihoodTable {
 public:
  LogLikelihoodTable() = default;
  LogLikelihoodTable(VertexSet vertices, std::span<const double> priors,
                     std::span<const EdgeProbabilityMatrix> probabilities, double clamp);

  const VertexSet& vertices() const { return vertices_; }
  double log_score(const AdjacencyMatrix& a, std::size_t c) const;
  /// Position of the best class. Scores within a relative 1e-12 of the best
  /// count as tied; ties go to the lowest position.
  std::size_t argmax(const AdjacencyMatrix& a) const;

 private:
  VertexSet vertices_;
  std::vector<double> log_prior_;
  std::vector<std::vector<double>> log_edge_;
  std::vector<std::vector<double>> log_no_edge_;
};

}  // namespace detail

struct PluginOptions {
  /// Probability clamp; defaults to 1 / (2m). Zero disables clamping.
  std::optional<double> clamp;
  /// Classes to fit; defaults to the labels present. A listed class with no
  /// training graph is a FitError.
  std::vector<int> classes;
};

/// Bayes plug-in model: empirical class priors and per-class edge means on
/// an induced subgraph, with probabilities clamped away from 0 and 1.
class PluginModel {
 public:
  const std::vector<int>& classes() const { return classes_; }
  const std::vector<double>& priors() const { return priors_; }
  /// Clamped estimate for class index `c` (position in classes()).
  const EdgeProbabilityMatrix& edge_probabilities(std::size_t c) const { return probs_[c]; }
  const VertexSet& vertices() const { return vertices_; }
  double clamp() const { return clamp_; }

  /// log prior + IER log-likelihood of A[vertices] for class index `c`.
  double log_score(const AdjacencyMatrix& a, std::size_t c) const { return table_.log_score(a, c); }

 private:
  friend PluginModel fit_plugin(const LabeledGraphDataset&, const VertexSet&, const PluginOptions&);
  friend int plugin_predict(const PluginModel&, const AdjacencyMatrix&, const VertexSet&);

  std::vector<int> classes_;
  std::vector<double> priors_;
  std::vector<EdgeProbabilityMatrix> probs_;
  VertexSet vertices_;
  double clamp_ = 0.0;
  detail::LogLikelihoodTable table_;
};

/// MLE priors and edge probabilities on A_i[restrict]. Throws InputError on
/// non-binary or directed graphs.
PluginModel fit_plugin(const LabeledGraphDataset& train, const VertexSet& restrict,
                       const PluginOptions& options = {});

/// argmax_y log pi_y + log L(A[restrict]; P_y); ties (up to rounding) go to the smaller
/// label. `restrict` must match the set the model was fitted on.
int plugin_predict(const PluginModel& model, const AdjacencyMatrix& a, const VertexSet& restrict);

/// True generative parameters of a class-conditional IER model.
struct IerClassModel {
  std::vector<int> classes;
  std::vector<double> priors;
  std::vector<EdgeProbabilityMatrix> probabilities;
};

/// Bayes rule with the true parameters, evaluated on the whole graph. Ties
/// (up to rounding) go to the smaller label.
class BayesRule {
 public:
  explicit BayesRule(const IerClassModel& model);
  int predict(const AdjacencyMatrix& a) const;

 private:
  std::vector<int> classes_;
  detail::LogLikelihoodTable table_;
};

int bayes_predict(const IerClassModel& model, const AdjacencyMatrix& a);

/// Majority vote among the k training graphs nearest in Frobenius distance
/// on A[restrict]. Distance ties go to the earlier training graph, vote ties
/// to the smaller label.
int knn_predict(const LabeledGraphDataset& train, const AdjacencyMatrix& a, std::size_t k,
                const VertexSet& restrict);

struct LossEstimate {
  double error = 0.0;
  std::size_t count = 0;
  std::size_t folds = 1;
  double standard_error = 0.0;
  std::vector<int> predicted;
  std::vector<int> truth;
};

using Classifier = std::function<int(const AdjacencyMatrix&)>;

/// Misclassification rate with standard error sqrt(p (1 - p) / N).
LossEstimate estimate_loss(std::span<const int> predicted, std::span<const int> truth);
LossEstimate estimate_loss(const Classifier& classifier, const LabeledGraphDataset& test);

/// Labeled draw from a generator.
struct LabeledGraph {
  AdjacencyMatrix graph;
  int label;
};
using GraphGenerator = std::function<LabeledGraph(Rng&)>;

/// Monte-Carlo loss over `draws` fresh graphs.
LossEstimate estimate_loss(const Classifier& classifier, const GraphGenerator& generator,
                           std::size_t draws, Rng& rng);

}  // namespace vscreen
