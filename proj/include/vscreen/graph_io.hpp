#pragma once

// On-disk dataset layout.
//
//   graphs.csv  graph_id,u,v,weight   one row per nonzero undirected edge
//   labels.csv  graph_id,label[,subject_id]
//
// labels.csv fixes the graph order. Vertex indices are 0-based; the vertex
// count is taken from the caller or inferred as 1 + the largest index.

#include <cstddef>
#include <filesystem>
#include <optional>

#include "vscreen/graph.hpp"

namespace vscreen {

/// Throws IoError when a file cannot be read and ParseError (with the line
/// number) on malformed rows.
LabeledGraphDataset read_dataset(const std::filesystem::path& graphs_csv,
                                 const std::filesystem::path& labels_csv,
                                 std::optional<std::size_t> vertex_count = std::nullopt);

/// Writes both files; graph ids are the 0-based positions.
void write_dataset(const LabeledGraphDataset& dataset, const std::filesystem::path& graphs_csv,
                   const std::filesystem::path& labels_csv);

}  // namespace vscreen
