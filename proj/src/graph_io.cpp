#include "vscreen/graph_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "vscreen/errors.hpp"

namespace vscreen {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

struct CsvReader {
  CsvReader(const std::filesystem::path& path) : name(path.string()), in(path) {
    if (!in) throw IoError("cannot open " + name);
  }

  // Next non-blank line, split on commas; false at end of file.
  bool next(std::vector<std::string_view>& fields) {
    while (std::getline(in, buffer)) {
      ++line;
      if (trim(buffer).empty()) continue;
      fields = split(buffer);
      return true;
    }
    if (in.bad()) throw IoError("read failure in " + name);
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(name, line, what); }

  std::size_t to_index(std::string_view field, const char* what) const {
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
      fail(std::string("invalid ") + what + " '" + std::string(field) + "'");
    }
    return value;
  }

  int to_int(std::string_view field, const char* what) const {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
      fail(std::string("invalid ") + what + " '" + std::string(field) + "'");
    }
    return value;
  }

  double to_double(std::string_view field, const char* what) const {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value)) {
      fail(std::string("invalid ") + what + " '" + std::string(field) + "'");
    }
    return value;
  }

  std::string name;
  std::ifstream in;
  std::string buffer;
  std::size_t line = 0;
};

struct Edge {
  std::size_t graph;
  std::size_t u;
  std::size_t v;
  double weight;
  std::size_t line;
};

}  // namespace

LabeledGraphDataset read_dataset(const std::filesystem::path& graphs_csv,
                                 const std::filesystem::path& labels_csv,
                                 std::optional<std::size_t> vertex_count) {
  std::vector<std::string_view> fields;

  CsvReader labels_in(labels_csv);
  if (!labels_in.next(fields)) labels_in.fail("missing header");
  const bool with_subjects = fields.size() == 3;
  if (fields.size() < 2 || fields.size() > 3 || fields[0] != "graph_id" || fields[1] != "label" ||
      (with_subjects && fields[2] != "subject_id")) {
    labels_in.fail("expected header graph_id,label[,subject_id]");
  }
  std::map<std::string, std::size_t, std::less<>> position;
  std::vector<int> labels;
  std::vector<std::string> subjects;
  while (labels_in.next(fields)) {
    if (fields.size() != (with_subjects ? 3u : 2u)) labels_in.fail("wrong number of fields");
    if (fields[0].empty()) labels_in.fail("empty graph_id");
    if (!position.emplace(std::string(fields[0]), labels.size()).second) {
      labels_in.fail("duplicate graph_id '" + std::string(fields[0]) + "'");
    }
    labels.push_back(labels_in.to_int(fields[1], "label"));
    if (with_subjects) {
      if (fields[2].empty()) labels_in.fail("empty subject_id");
      subjects.emplace_back(fields[2]);
    }
  }

  CsvReader graphs_in(graphs_csv);
  if (!graphs_in.next(fields)) graphs_in.fail("missing header");
  if (fields.size() != 4 || fields[0] != "graph_id" || fields[1] != "u" || fields[2] != "v" ||
      fields[3] != "weight") {
    graphs_in.fail("expected header graph_id,u,v,weight");
  }
  std::vector<Edge> edges;
  std::size_t max_index = 0;
  while (graphs_in.next(fields)) {
    if (fields.size() != 4) graphs_in.fail("wrong number of fields");
    const auto it = position.find(fields[0]);
    if (it == position.end()) {
      graphs_in.fail("graph_id '" + std::string(fields[0]) + "' not present in labels");
    }
    Edge e{it->second, graphs_in.to_index(fields[1], "vertex"),
           graphs_in.to_index(fields[2], "vertex"), graphs_in.to_double(fields[3], "weight"),
           graphs_in.line};
    if (e.u == e.v) graphs_in.fail("self-loop");
    if (vertex_count && std::max(e.u, e.v) >= *vertex_count) {
      graphs_in.fail("vertex index exceeds vertex count " + std::to_string(*vertex_count));
    }
    max_index = std::max({max_index, e.u, e.v});
    edges.push_back(e);
  }

  const std::size_t n = vertex_count ? *vertex_count : (edges.empty() ? 1 : max_index + 1);
  const auto ni = static_cast<Eigen::Index>(n);
  std::vector<Eigen::MatrixXd> dense(labels.size(), Eigen::MatrixXd::Zero(ni, ni));
  std::vector<std::vector<bool>> seen(labels.size());
  for (const Edge& e : edges) {
    auto& a = dense[e.graph];
    const auto u = static_cast<Eigen::Index>(e.u);
    const auto v = static_cast<Eigen::Index>(e.v);
    auto& mark = seen[e.graph];
    if (mark.empty()) mark.assign(n * n, false);
    const std::size_t key = std::min(e.u, e.v) * n + std::max(e.u, e.v);
    if (mark[key] && a(u, v) != e.weight) {
      throw ParseError(graphs_in.name, e.line, "conflicting duplicate edge");
    }
    mark[key] = true;
    a(u, v) = e.weight;
    a(v, u) = e.weight;
  }

  std::vector<AdjacencyMatrix> graphs;
  graphs.reserve(dense.size());
  for (auto& a : dense) graphs.emplace_back(std::move(a));
  return LabeledGraphDataset(std::move(graphs), std::move(labels), std::move(subjects));
}

void write_dataset(const LabeledGraphDataset& dataset, const std::filesystem::path& graphs_csv,
                   const std::filesystem::path& labels_csv) {
  std::ofstream graphs_out(graphs_csv);
  if (!graphs_out) throw IoError("cannot write " + graphs_csv.string());
  std::ofstream labels_out(labels_csv);
  if (!labels_out) throw IoError("cannot write " + labels_csv.string());

  graphs_out << "graph_id,u,v,weight\n" << std::setprecision(17);
  labels_out << (dataset.has_subjects() ? "graph_id,label,subject_id\n" : "graph_id,label\n");
  const std::size_t n = dataset.vertex_count();
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const AdjacencyMatrix& a = dataset.graph(i);
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = a.directed() ? 0 : u + 1; v < n; ++v) {
        const double w = a(u, v);
        if (w != 0.0) graphs_out << i << ',' << u << ',' << v << ',' << w << '\n';
      }
    }
    labels_out << i << ',' << dataset.labels()[i];
    if (dataset.has_subjects()) labels_out << ',' << dataset.subject_ids()[i];
    labels_out << '\n';
  }
  if (!graphs_out.flush() || !labels_out.flush()) throw IoError("write failure");
}

}  // namespace vscreen
