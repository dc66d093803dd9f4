#pragma once

// Sample matrices and distance matrices built from adjacency data.
//
// Binary graphs take a bit-packed path: each feature vector is stored as
// 64-bit words and squared Euclidean distances are popcounts of XORs,
// which are exact. Other graphs go through the dense Eigen path.

#include <cstddef>

#include "vscreen/corr.hpp"
#include "vscreen/graph.hpp"

namespace vscreen::detail {

/// Rows: graphs; columns: vertex_feature(A_i, u, restrict).
SampleMatrix vertex_samples(const LabeledGraphDataset& data, std::size_t u,
                            const VertexSet& restrict);
DistanceMatrix vertex_distances(const LabeledGraphDataset& data, std::size_t u,
                                const VertexSet& restrict);

/// Rows: graphs; columns: the induced subgraph A_i[V] flattened (upper
/// triangle for undirected graphs, all off-diagonal entries otherwise).
SampleMatrix subgraph_samples(const LabeledGraphDataset& data, const VertexSet& vertices);
DistanceMatrix subgraph_distances(const LabeledGraphDataset& data, const VertexSet& vertices);

/// dcorr between the vertex features and a label side, computed from
/// running sums over the feature distances so that no m x m matrix is
/// formed for the feature side. Agrees with the matrix route to rounding.
double vertex_dcorr(const LabeledGraphDataset& data, std::size_t u, const VertexSet& restrict,
                    const CenteredDistances& labels);
double subgraph_dcorr(const LabeledGraphDataset& data, const VertexSet& vertices,
                      const CenteredDistances& labels);

}  // namespace vscreen::detail
