#include "vscreen/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "vscreen/errors.hpp"

namespace vscreen {

namespace detail {

namespace {
constexpr double kTieTolerance = 1e-12;
}  // namespace

LogLikelihoodTable::LogLikelihoodTable(VertexSet vertices, std::span<const double> priors,
                                       std::span<const EdgeProbabilityMatrix> probabilities,
                                       double clamp)
    : vertices_(std::move(vertices)) {
  const std::size_t k = vertices_.size();
  for (std::size_t c = 0; c < priors.size(); ++c) {
    log_prior_.push_back(std::log(priors[c]));
    std::vector<double> on;
    std::vector<double> off;
    on.reserve(k * (k - (k > 0)) / 2);
    off.reserve(on.capacity());
    for (std::size_t q = 1; q < k; ++q) {
      for (std::size_t p = 0; p < q; ++p) {
        double prob = probabilities[c](vertices_[p], vertices_[q]);
        if (clamp > 0.0) prob = std::clamp(prob, clamp, 1.0 - clamp);
        on.push_back(std::log(prob));
        off.push_back(std::log1p(-prob));
      }
    }
    log_edge_.push_back(std::move(on));
    log_no_edge_.push_back(std::move(off));
  }
}

double LogLikelihoodTable::log_score(const AdjacencyMatrix& a, std::size_t c) const {
  const std::vector<double>& on = log_edge_[c];
  const std::vector<double>& off = log_no_edge_[c];
  double total = 0.0;
  std::size_t slot = 0;
  const std::size_t k = vertices_.size();
  for (std::size_t q = 1; q < k; ++q) {
    const std::size_t vq = vertices_[q];
    for (std::size_t p = 0; p < q; ++p, ++slot) {
      // Branch rather than multiply so that 0 * log(0) never appears.
      total += a(vertices_[p], vq) != 0.0 ? on[slot] : off[slot];
    }
  }
  return log_prior_[c] + total;
}

std::size_t LogLikelihoodTable::argmax(const AdjacencyMatrix& a) const {
  std::vector<double> scores(log_prior_.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < scores.size(); ++c) {
    scores[c] = log_score(a, c);
    top = std::max(top, scores[c]);
  }
  // Equal likelihoods summed in different orders can differ in the last
  // bits; anything this close counts as a tie.
  const double slack = kTieTolerance * std::max(1.0, std::abs(top));
  for (std::size_t c = 0; c < scores.size(); ++c) {
    if (scores[c] >= top - slack) return c;
  }
  return 0;
}

}  // namespace detail

namespace {

void require_plugin_graph(const AdjacencyMatrix& a) {
  if (a.directed() || !a.binary()) {
    throw InputError("plug-in classification requires binary undirected graphs");
  }
}

}  // namespace

PluginModel fit_plugin(const LabeledGraphDataset& train, const VertexSet& restrict,
                       const PluginOptions& options) {
  restrict.require_within(train.vertex_count());
  if (train.directed() || !train.binary()) {
    throw InputError("plug-in classification requires binary undirected graphs");
  }
  const std::size_t m = train.size();

  PluginModel model;
  model.vertices_ = restrict;
  model.classes_ = options.classes.empty() ? train.classes() : options.classes;
  std::sort(model.classes_.begin(), model.classes_.end());
  model.classes_.erase(std::unique(model.classes_.begin(), model.classes_.end()),
                       model.classes_.end());
  model.clamp_ = options.clamp.value_or(1.0 / (2.0 * static_cast<double>(m)));
  if (!(model.clamp_ >= 0.0 && model.clamp_ < 0.5)) throw InputError("clamp must lie in [0, 0.5)");

  const auto k = static_cast<Eigen::Index>(restrict.size());
  std::map<int, std::size_t> slot;
  for (std::size_t c = 0; c < model.classes_.size(); ++c) slot[model.classes_[c]] = c;
  std::vector<Eigen::MatrixXd> sums(model.classes_.size(), Eigen::MatrixXd::Zero(k, k));
  std::vector<std::size_t> counts(model.classes_.size(), 0);
  for (std::size_t i = 0; i < m; ++i) {
    const auto it = slot.find(train.labels()[i]);
    if (it == slot.end()) continue;
    ++counts[it->second];
    sums[it->second] += induced_subgraph(train.graph(i), restrict).matrix();
  }

  for (std::size_t c = 0; c < model.classes_.size(); ++c) {
    if (counts[c] == 0) {
      throw FitError("class " + std::to_string(model.classes_[c]) + " has no training graph");
    }
    model.priors_.push_back(static_cast<double>(counts[c]) / static_cast<double>(m));
    Eigen::MatrixXd p = sums[c] / static_cast<double>(counts[c]);
    if (model.clamp_ > 0.0) {
      p = p.cwiseMax(model.clamp_).cwiseMin(1.0 - model.clamp_);
    }
    p.diagonal().setZero();
    model.probs_.emplace_back(std::move(p));
  }
  // Renormalize in case some training labels fell outside the class list.
  const double total = std::accumulate(model.priors_.begin(), model.priors_.end(), 0.0);
  for (double& prior : model.priors_) prior /= total;

  model.table_ = detail::LogLikelihoodTable(VertexSet::full(restrict.size()), model.priors_,
                                            model.probs_, 0.0);
  return model;
}

int plugin_predict(const PluginModel& model, const AdjacencyMatrix& a, const VertexSet& restrict) {
  if (!(restrict == model.vertices())) {
    throw InputError("prediction vertex set differs from the fitted one");
  }
  require_plugin_graph(a);
  restrict.require_within(a.size());
  return model.classes_[model.table_.argmax(induced_subgraph(a, restrict))];
}

BayesRule::BayesRule(const IerClassModel& model) {
  const std::size_t count = model.classes.size();
  if (count == 0 || model.priors.size() != count || model.probabilities.size() != count) {
    throw InputError("class model needs matching classes, priors and probabilities");
  }
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return model.classes[a] < model.classes[b]; });
  std::vector<double> priors;
  std::vector<EdgeProbabilityMatrix> probs;
  for (std::size_t idx : order) {
    classes_.push_back(model.classes[idx]);
    priors.push_back(model.priors[idx]);
    probs.push_back(model.probabilities[idx]);
  }
  table_ = detail::LogLikelihoodTable(VertexSet::full(probs.front().size()), priors, probs, 0.0);
}

int BayesRule::predict(const AdjacencyMatrix& a) const {
  require_plugin_graph(a);
  if (a.size() != table_.vertices().size()) throw InputError("graph size differs from the model");
  return classes_[table_.argmax(a)];
}

int bayes_predict(const IerClassModel& model, const AdjacencyMatrix& a) {
  return BayesRule(model).predict(a);
}

int knn_predict(const LabeledGraphDataset& train, const AdjacencyMatrix& a, std::size_t k,
                const VertexSet& restrict) {
  if (train.size() == 0) throw InputError("empty training set");
  if (k < 1 || k > train.size()) throw InputError("k must lie in [1, training size]");
  if (a.size() != train.vertex_count()) throw InputError("graph size differs from training graphs");
  restrict.require_within(a.size());

  const Eigen::MatrixXd query = induced_subgraph(a, restrict).matrix();
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    const double d = (induced_subgraph(train.graph(i), restrict).matrix() - query).norm();
    dist.emplace_back(d, i);
  }
  std::partial_sort(dist.begin(), dist.begin() + static_cast<long>(k), dist.end());

  std::map<int, std::size_t> votes;
  for (std::size_t j = 0; j < k; ++j) ++votes[train.labels()[dist[j].second]];
  int best = votes.begin()->first;
  std::size_t best_votes = 0;
  for (const auto& [label, count] : votes) {
    if (count > best_votes) {
      best = label;
      best_votes = count;
    }
  }
  return best;
}

LossEstimate estimate_loss(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) throw InputError("prediction and truth sizes differ");
  if (truth.empty()) throw InputError("loss needs at least one evaluation instance");
  LossEstimate out;
  out.predicted.assign(predicted.begin(), predicted.end());
  out.truth.assign(truth.begin(), truth.end());
  out.count = truth.size();
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) wrong += predicted[i] != truth[i];
  const double n = static_cast<double>(out.count);
  out.error = static_cast<double>(wrong) / n;
  out.standard_error = std::sqrt(out.error * (1.0 - out.error) / n);
  return out;
}

LossEstimate estimate_loss(const Classifier& classifier, const LabeledGraphDataset& test) {
  std::vector<int> predicted(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) predicted[i] = classifier(test.graph(i));
  return estimate_loss(predicted, test.labels());
}

LossEstimate estimate_loss(const Classifier& classifier, const GraphGenerator& generator,
                           std::size_t draws, Rng& rng) {
  if (draws == 0) throw InputError("loss needs at least one evaluation instance");
  std::vector<int> predicted;
  std::vector<int> truth;
  predicted.reserve(draws);
  truth.reserve(draws);
  for (std::size_t i = 0; i < draws; ++i) {
    const LabeledGraph sample = generator(rng);
    predicted.push_back(classifier(sample.graph));
    truth.push_back(sample.label);
  }
  return estimate_loss(predicted, truth);
}

}  // namespace vscreen
