#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vscreen/rng.hpp"

namespace vscreen {

/// Dense n x n adjacency matrix with a zero diagonal.
class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;

  /// Throws InputError on non-square, non-finite, self-loops, or an
  /// asymmetric matrix flagged undirected.
  explicit AdjacencyMatrix(Eigen::MatrixXd entries, bool directed = false);

  std::size_t size() const { return static_cast<std::size_t>(a_.rows()); }
  bool directed() const { return directed_; }
  /// Every entry is 0 or 1.
  bool binary() const { return binary_; }
  const Eigen::MatrixXd& matrix() const { return a_; }
  double operator()(std::size_t u, std::size_t v) const {
    return a_(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v));
  }

  friend bool operator==(const AdjacencyMatrix& a, const AdjacencyMatrix& b) {
    return a.directed_ == b.directed_ && a.a_ == b.a_;
  }

 private:
  Eigen::MatrixXd a_;
  bool directed_ = false;
  bool binary_ = true;
};

/// Symmetric n x n matrix of edge probabilities in [0, 1], zero diagonal.
class EdgeProbabilityMatrix {
 public:
  EdgeProbabilityMatrix() = default;
  explicit EdgeProbabilityMatrix(Eigen::MatrixXd probabilities);

  std::size_t size() const { return static_cast<std::size_t>(p_.rows()); }
  const Eigen::MatrixXd& matrix() const { return p_; }
  double operator()(std::size_t u, std::size_t v) const {
    return p_(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v));
  }

 private:
  Eigen::MatrixXd p_;
};

/// Strictly increasing list of vertex indices.
class VertexSet {
 public:
  VertexSet() = default;
  /// Sorts the input; throws InputError on duplicates.
  explicit VertexSet(std::vector<std::size_t> vertices);
  VertexSet(std::initializer_list<std::size_t> vertices)
      : VertexSet(std::vector<std::size_t>(vertices)) {}

  static VertexSet full(std::size_t n);

  std::size_t size() const { return v_.size(); }
  bool empty() const { return v_.empty(); }
  std::size_t operator[](std::size_t i) const { return v_[i]; }
  auto begin() const { return v_.begin(); }
  auto end() const { return v_.end(); }
  const std::vector<std::size_t>& indices() const { return v_; }

  bool contains(std::size_t vertex) const;
  /// Position of `vertex` within the set; throws InputError if absent.
  std::size_t position(std::size_t vertex) const;
  /// Throws InputError if any vertex is >= n.
  void require_within(std::size_t n) const;

  friend bool operator==(const VertexSet&, const VertexSet&) = default;

 private:
  std::vector<std::size_t> v_;
};

/// Selects positions `inner` of `outer`: result[i] = outer[inner[i]].
VertexSet compose(const VertexSet& outer, const VertexSet& inner);

/// Graphs on a shared vertex set with one integer label per graph.
///
/// Graphs are held through shared pointers, so subsets for cross-validation
/// folds are cheap and never copy adjacency data.
class LabeledGraphDataset {
 public:
  LabeledGraphDataset(std::vector<AdjacencyMatrix> graphs, std::vector<int> labels,
                      std::vector<std::string> subject_ids = {},
                      std::vector<std::string> vertex_names = {});

  std::size_t size() const { return graphs_.size(); }
  std::size_t vertex_count() const { return graphs_.front()->size(); }
  bool directed() const { return graphs_.front()->directed(); }
  bool binary() const { return binary_; }

  const AdjacencyMatrix& graph(std::size_t i) const { return *graphs_[i]; }
  const std::vector<int>& labels() const { return labels_; }
  bool has_subjects() const { return !subject_ids_.empty(); }
  const std::vector<std::string>& subject_ids() const { return subject_ids_; }
  /// Names per vertex; defaults to the decimal index.
  const std::vector<std::string>& vertex_names() const { return vertex_names_; }

  /// Sorted distinct labels.
  std::vector<int> classes() const;

  /// Graphs at `indices`, in that order. Requires at least 2 indices.
  LabeledGraphDataset subset(std::span<const std::size_t> indices) const;

  /// Same graphs with replacement labels.
  LabeledGraphDataset with_labels(std::vector<int> labels) const;

 private:
  LabeledGraphDataset() = default;
  void validate();

  std::vector<std::shared_ptr<const AdjacencyMatrix>> graphs_;
  std::vector<int> labels_;
  std::vector<std::string> subject_ids_;
  std::vector<std::string> vertex_names_;
  bool binary_ = true;
};

/// Independent Bernoulli(P[u,v]) edges for u < v, mirrored.
AdjacencyMatrix sample_ier(const EdgeProbabilityMatrix& p, Rng& rng);
AdjacencyMatrix sample_ier(const EdgeProbabilityMatrix& p, std::uint64_t seed);

/// Sum over u < v of A log P + (1 - A) log(1 - P). With clamp_eps > 0 the
/// probabilities are first clamped to [eps, 1 - eps]; otherwise an edge
/// contradicting a 0/1 probability yields -infinity.
double ier_log_likelihood(const AdjacencyMatrix& a, const EdgeProbabilityMatrix& p,
                          double clamp_eps = 0.0);

/// A[U, U] with rows and columns in U's order.
AdjacencyMatrix induced_subgraph(const AdjacencyMatrix& a, const VertexSet& vertices);
EdgeProbabilityMatrix induced_subgraph(const EdgeProbabilityMatrix& p, const VertexSet& vertices);

/// Row of A[restrict, restrict] belonging to `u`, including the zero self entry.
Eigen::VectorXd vertex_feature(const AdjacencyMatrix& a, std::size_t u, const VertexSet& restrict);

/// Vertices incident to at least one pair whose probability differs
/// between classes.
VertexSet signal_vertices(std::span<const EdgeProbabilityMatrix> class_probabilities);

}  // namespace vscreen
