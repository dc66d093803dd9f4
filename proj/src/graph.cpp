#include "vscreen/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vscreen/errors.hpp"

namespace vscreen {

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw InputError("index range must be non-empty");
  const auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
  return std::min(i, n - 1);
}

AdjacencyMatrix::AdjacencyMatrix(Eigen::MatrixXd entries, bool directed)
    : a_(std::move(entries)), directed_(directed) {
  if (a_.rows() != a_.cols()) throw InputError("adjacency matrix must be square");
  if (a_.rows() == 0) throw InputError("adjacency matrix must have at least one vertex");
  if (!a_.allFinite()) throw InputError("adjacency matrix has non-finite entries");
  const Eigen::Index n = a_.rows();
  // Column-major walk; a_(v, u) below runs down column u.
  for (Eigen::Index u = 0; u < n; ++u) {
    if (a_(u, u) != 0.0) throw InputError("self-loops are not supported");
    for (Eigen::Index v = 0; v < n; ++v) {
      const double w = a_(v, u);
      if (w != 0.0 && w != 1.0) binary_ = false;
      if (!directed_ && v > u && w != a_(u, v)) {
        throw InputError("undirected adjacency matrix must be symmetric");
      }
    }
  }
}

EdgeProbabilityMatrix::EdgeProbabilityMatrix(Eigen::MatrixXd probabilities)
    : p_(std::move(probabilities)) {
  if (p_.rows() != p_.cols()) throw InputError("edge probability matrix must be square");
  const Eigen::Index n = p_.rows();
  for (Eigen::Index u = 0; u < n; ++u) {
    for (Eigen::Index v = 0; v < n; ++v) {
      const double q = p_(u, v);
      if (!(q >= 0.0 && q <= 1.0)) throw InputError("edge probabilities must lie in [0, 1]");
      if (q != p_(v, u)) throw InputError("edge probability matrix must be symmetric");
    }
    p_(u, u) = 0.0;
  }
}

VertexSet::VertexSet(std::vector<std::size_t> vertices) : v_(std::move(vertices)) {
  std::sort(v_.begin(), v_.end());
  if (std::adjacent_find(v_.begin(), v_.end()) != v_.end()) {
    throw InputError("vertex set contains duplicates");
  }
}

VertexSet VertexSet::full(std::size_t n) {
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  return VertexSet(std::move(all));
}

bool VertexSet::contains(std::size_t vertex) const {
  return std::binary_search(v_.begin(), v_.end(), vertex);
}

std::size_t VertexSet::position(std::size_t vertex) const {
  const auto it = std::lower_bound(v_.begin(), v_.end(), vertex);
  if (it == v_.end() || *it != vertex) {
    throw InputError("vertex " + std::to_string(vertex) + " is not in the set");
  }
  return static_cast<std::size_t>(it - v_.begin());
}

void VertexSet::require_within(std::size_t n) const {
  if (!v_.empty() && v_.back() >= n) {
    throw InputError("vertex " + std::to_string(v_.back()) + " out of range for " +
                     std::to_string(n) + " vertices");
  }
}

VertexSet compose(const VertexSet& outer, const VertexSet& inner) {
  inner.require_within(outer.size());
  std::vector<std::size_t> out;
  out.reserve(inner.size());
  for (std::size_t i : inner) out.push_back(outer[i]);
  return VertexSet(std::move(out));
}

LabeledGraphDataset::LabeledGraphDataset(std::vector<AdjacencyMatrix> graphs,
                                         std::vector<int> labels,
                                         std::vector<std::string> subject_ids,
                                         std::vector<std::string> vertex_names)
    : labels_(std::move(labels)),
      subject_ids_(std::move(subject_ids)),
      vertex_names_(std::move(vertex_names)) {
  graphs_.reserve(graphs.size());
  for (auto& g : graphs) graphs_.push_back(std::make_shared<const AdjacencyMatrix>(std::move(g)));
  validate();
}

void LabeledGraphDataset::validate() {
  const std::size_t m = graphs_.size();
  if (m < 2) throw InputError("a dataset needs at least 2 graphs");
  if (labels_.size() != m) throw InputError("label count does not match graph count");
  if (!subject_ids_.empty() && subject_ids_.size() != m) {
    throw InputError("subject id count does not match graph count");
  }
  const std::size_t n = graphs_.front()->size();
  const bool directed = graphs_.front()->directed();
  binary_ = true;
  for (const auto& g : graphs_) {
    if (g->size() != n) throw InputError("all graphs must share the same vertex count");
    if (g->directed() != directed) throw InputError("all graphs must share directedness");
    binary_ = binary_ && g->binary();
  }
  if (vertex_names_.empty()) {
    vertex_names_.reserve(n);
    for (std::size_t v = 0; v < n; ++v) vertex_names_.push_back(std::to_string(v));
  } else if (vertex_names_.size() != n) {
    throw InputError("vertex name count does not match vertex count");
  }
}

std::vector<int> LabeledGraphDataset::classes() const {
  std::vector<int> c = labels_;
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

LabeledGraphDataset LabeledGraphDataset::subset(std::span<const std::size_t> indices) const {
  LabeledGraphDataset out;
  out.vertex_names_ = vertex_names_;
  for (std::size_t i : indices) {
    if (i >= size()) throw InputError("graph index out of range");
    out.graphs_.push_back(graphs_[i]);
    out.labels_.push_back(labels_[i]);
    if (has_subjects()) out.subject_ids_.push_back(subject_ids_[i]);
  }
  out.validate();
  return out;
}

LabeledGraphDataset LabeledGraphDataset::with_labels(std::vector<int> labels) const {
  LabeledGraphDataset out = *this;
  out.labels_ = std::move(labels);
  out.validate();
  return out;
}

AdjacencyMatrix sample_ier(const EdgeProbabilityMatrix& p, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(p.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  const Eigen::MatrixXd& probs = p.matrix();
  for (Eigen::Index u = 0; u < n; ++u) {
    for (Eigen::Index v = u + 1; v < n; ++v) {
      // P is symmetric; read and write down column u first.
      if (rng.bernoulli(probs(v, u))) {
        a(v, u) = 1.0;
        a(u, v) = 1.0;
      }
    }
  }
  return AdjacencyMatrix(std::move(a));
}

AdjacencyMatrix sample_ier(const EdgeProbabilityMatrix& p, std::uint64_t seed) {
  Rng rng(seed);
  return sample_ier(p, rng);
}

double ier_log_likelihood(const AdjacencyMatrix& a, const EdgeProbabilityMatrix& p,
                          double clamp_eps) {
  if (a.size() != p.size()) throw InputError("adjacency and probability sizes differ");
  if (a.directed() || !a.binary()) {
    throw InputError("IER likelihood requires a binary undirected graph");
  }
  const auto n = static_cast<Eigen::Index>(a.size());
  const Eigen::MatrixXd& am = a.matrix();
  const Eigen::MatrixXd& pm = p.matrix();
  double total = 0.0;
  for (Eigen::Index u = 0; u < n; ++u) {
    for (Eigen::Index v = u + 1; v < n; ++v) {
      double q = pm(u, v);
      if (clamp_eps > 0.0) q = std::clamp(q, clamp_eps, 1.0 - clamp_eps);
      total += am(u, v) != 0.0 ? std::log(q) : std::log1p(-q);
    }
  }
  return total;
}

AdjacencyMatrix induced_subgraph(const AdjacencyMatrix& a, const VertexSet& vertices) {
  vertices.require_within(a.size());
  const auto k = static_cast<Eigen::Index>(vertices.size());
  Eigen::MatrixXd out(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index i = 0; i < k; ++i) {
      out(i, j) = a(vertices[static_cast<std::size_t>(i)], vertices[static_cast<std::size_t>(j)]);
    }
  }
  return AdjacencyMatrix(std::move(out), a.directed());
}

EdgeProbabilityMatrix induced_subgraph(const EdgeProbabilityMatrix& p, const VertexSet& vertices) {
  vertices.require_within(p.size());
  const auto k = static_cast<Eigen::Index>(vertices.size());
  Eigen::MatrixXd out(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index i = 0; i < k; ++i) {
      out(i, j) = p(vertices[static_cast<std::size_t>(i)], vertices[static_cast<std::size_t>(j)]);
    }
  }
  return EdgeProbabilityMatrix(std::move(out));
}

Eigen::VectorXd vertex_feature(const AdjacencyMatrix& a, std::size_t u, const VertexSet& restrict) {
  restrict.require_within(a.size());
  if (!restrict.contains(u)) {
    throw InputError("vertex " + std::to_string(u) + " is not in the restriction set");
  }
  Eigen::VectorXd row(static_cast<Eigen::Index>(restrict.size()));
  for (std::size_t i = 0; i < restrict.size(); ++i) {
    row(static_cast<Eigen::Index>(i)) = a(u, restrict[i]);
  }
  return row;
}

VertexSet signal_vertices(std::span<const EdgeProbabilityMatrix> class_probabilities) {
  if (class_probabilities.empty()) return {};
  const std::size_t n = class_probabilities.front().size();
  std::vector<std::size_t> out;
  for (std::size_t u = 0; u < n; ++u) {
    bool differs = false;
    for (std::size_t v = 0; v < n && !differs; ++v) {
      for (const auto& p : class_probabilities.subspan(1)) {
        if (p(u, v) != class_probabilities.front()(u, v)) {
          differs = true;
          break;
        }
      }
    }
    if (differs) out.push_back(u);
  }
  return VertexSet(std::move(out));
}

}  // namespace vscreen
