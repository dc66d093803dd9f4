#include <doctest.h>

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "vscreen/errors.hpp"
#include "vscreen/eval.hpp"
#include "vscreen/experiments.hpp"
#include "vscreen/screen.hpp"

using namespace vscreen;

namespace {

// Vertex 0 is joined to every other vertex in class 1 and to none in class 0;
// all remaining edges are fair coins.
LabeledGraphDataset one_signal_vertex(std::size_t m, std::size_t n, Rng& rng) {
  std::vector<AdjacencyMatrix> graphs;
  std::vector<int> labels;
  for (std::size_t i = 0; i < m; ++i) {
    const int y = static_cast<int>(i % 2);
    Eigen::MatrixXd a = testing::random_graph(rng, n, 0.5).matrix();
    for (Eigen::Index v = 1; v < static_cast<Eigen::Index>(n); ++v) a(0, v) = a(v, 0) = y;
    graphs.emplace_back(a);
    labels.push_back(y);
  }
  return LabeledGraphDataset(std::move(graphs), std::move(labels));
}

LabeledGraphDataset exp1_data(std::size_t m, std::uint64_t seed) {
  Rng rng(seed, m);
  return simulate_dataset(experiment_model(ExperimentKind::exp1), m, rng);
}

bool contains_all(const VertexSet& outer, const VertexSet& inner) {
  return std::all_of(inner.begin(), inner.end(), [&](std::size_t v) { return outer.contains(v); });
}

}  // namespace

TEST_CASE("constant labels score zero") {
  Rng rng(3);
  std::vector<AdjacencyMatrix> graphs;
  for (int i = 0; i < 20; ++i) graphs.push_back(testing::random_graph(rng, 8, 0.4));
  const LabeledGraphDataset data(graphs, std::vector<int>(20, 1));
  for (StatKind stat : {StatKind::dcorr, StatKind::mgc, StatKind::rv, StatKind::cca}) {
    for (double s : score_vertices(data, VertexSet::full(8), stat)) CHECK(s == 0.0);
  }
}

TEST_CASE("a deterministic signal row is the strongest vertex") {
  Rng rng(17);
  const LabeledGraphDataset data = one_signal_vertex(200, 25, rng);
  for (StatKind stat : {StatKind::dcorr, StatKind::mgc, StatKind::rv}) {
    const std::vector<double> scores = score_vertices(data, VertexSet::full(25), stat);
    for (std::size_t u = 1; u < scores.size(); ++u) CHECK(scores[0] > scores[u]);
    for (double s : scores) {
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
    }
  }
}

TEST_CASE("scores are in restrict order and independent of the worker count") {
  const LabeledGraphDataset data = exp1_data(60, 5);
  const VertexSet restrict{3, 1, 40, 150, 22, 7};
  const int saved = omp_get_max_threads();
  for (StatKind stat : {StatKind::dcorr, StatKind::mgc, StatKind::rv, StatKind::cca}) {
    omp_set_num_threads(1);
    const std::vector<double> serial = score_vertices(data, restrict, stat);
    omp_set_num_threads(4);
    const std::vector<double> parallel = score_vertices(data, restrict, stat);
    CHECK(serial == parallel);
    REQUIRE(serial.size() == restrict.size());
    const std::vector<double> single = score_vertices(data, VertexSet{40}, stat);
    CHECK(single.size() == 1);
  }
  omp_set_num_threads(saved);
}

TEST_CASE("screen_once thresholds strictly") {
  const LabeledGraphDataset data = exp1_data(50, 9);
  const ScreeningResult none = screen_once(data, 1.0);
  CHECK(none.selected.empty());
  CHECK(none.levels.size() == 1);
  CHECK(std::isnan(none.levels[0].correlation));

  const ScreeningResult all = screen_once(data, 0.0);
  const bool positive = std::all_of(all.scores.begin(), all.scores.end(), [](double s) { return s > 0.0; });
  REQUIRE(positive);
  CHECK(all.selected == VertexSet::full(200));

  const double c = empirical_quantile(all.scores, 0.5);
  const ScreeningResult half = screen_once(data, c);
  for (std::size_t u = 0; u < 200; ++u) CHECK(half.selected.contains(u) == (all.scores[u] > c));
  CHECK(half.scores == all.scores);
  CHECK(half.initial_scores == all.scores);
  CHECK_THROWS_AS(screen_once(data, 1.5), InputError);
  CHECK_THROWS_AS(screen_once(data, -0.1), InputError);
}

// At m = 100 the signal and noise score clouds overlap, so a threshold below
// the signal cloud is the only one that captures S reliably there.
TEST_CASE("a low threshold contains S at m = 100") {
  const VertexSet truth = true_signal_vertices(experiment_model(ExperimentKind::exp1));
  int hits = 0;
  const int repeats = 20;
  for (int r = 0; r < repeats; ++r) {
    const ScreeningResult result = screen_once(exp1_data(100, 100 + r), 0.07);
    hits += contains_all(result.selected, truth) ? 1 : 0;
  }
  CHECK(hits >= 19);
}

// With m = 1000 the two clouds separate; c between them contains S and the
// gap rule lands near |S|.
TEST_CASE("threshold between clusters and gap size at m = 1000") {
  const VertexSet truth = true_signal_vertices(experiment_model(ExperimentKind::exp1));
  const int repeats = 10;
  int contained = 0;
  int gap_ok = 0;
  for (int r = 0; r < repeats; ++r) {
    const ScreeningResult result = screen_once(exp1_data(1000, 500 + r), 0.0275);
    contained += contains_all(result.selected, truth) ? 1 : 0;
    const std::size_t k = select_size_by_gap(result.scores).selected.size();
    gap_ok += (k >= 10 && k <= 40) ? 1 : 0;
  }
  CHECK(contained >= 10);
  CHECK(gap_ok >= 8);
}

TEST_CASE("two vertices give levels {2, 1}") {
  Rng rng(21);
  std::vector<AdjacencyMatrix> graphs;
  for (int i = 0; i < 30; ++i) graphs.push_back(testing::random_graph(rng, 2, 0.5));
  const LabeledGraphDataset data(graphs, testing::random_labels(rng, 30, 2));
  const ScreeningResult result = screen_iterative(data, 0.5);
  REQUIRE(result.levels.size() == 2);
  CHECK(result.levels[0].vertices.size() == 2);
  CHECK(result.levels[1].vertices.size() == 1);
}

TEST_CASE("iterative levels are nested and shrink by the quantile rule") {
  const LabeledGraphDataset data = exp1_data(80, 31);
  for (double delta : {0.25, 0.5, 0.75}) {
    const ScreeningResult result = screen_iterative(data, delta);
    REQUIRE(result.levels.size() >= 2);
    CHECK(result.levels.front().vertices == VertexSet::full(200));
    CHECK(result.levels.back().vertices.size() == 1);
    for (std::size_t k = 0; k + 1 < result.levels.size(); ++k) {
      const VertexSet& outer = result.levels[k].vertices;
      const VertexSet& inner = result.levels[k + 1].vertices;
      CHECK(inner.size() < outer.size());
      CHECK(contains_all(outer, inner));
      // Strict exceedance over the type-7 quantile keeps floor or ceil of
      // (1 - delta)|V_k| when scores are distinct.
      const double target = (1.0 - delta) * static_cast<double>(outer.size());
      const auto lo = static_cast<std::size_t>(std::max(1.0, std::floor(target)));
      const auto hi = static_cast<std::size_t>(std::ceil(target));
      CHECK(inner.size() >= lo);
      CHECK(inner.size() <= std::max(hi, lo));
    }
    double best = -1.0;
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < result.levels.size(); ++k) {
      if (result.levels[k].correlation > best) {
        best = result.levels[k].correlation;
        best_k = k;
      }
    }
    CHECK(result.selected_level == best_k);
    CHECK(result.selected == result.levels[best_k].vertices);
    for (double s : result.scores) {
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
    }
    for (std::size_t u = 0; u < 200; ++u) {
      const std::size_t e = result.elimination[u];
      const bool last = result.levels.back().vertices.contains(u);
      CHECK((e == kSurvivor) == last);
      if (e != kSurvivor) {
        CHECK(result.levels[e].vertices.contains(u));
        CHECK(!result.levels[e + 1].vertices.contains(u));
      }
    }
  }
}

TEST_CASE("min_size stops early") {
  const LabeledGraphDataset data = exp1_data(60, 12);
  const ScreeningResult result = screen_iterative(data, 0.5, StatKind::dcorr, 20);
  CHECK(result.levels.back().vertices.size() <= 20);
  CHECK(result.levels[result.levels.size() - 2].vertices.size() > 20);
}

TEST_CASE("tied scores fall back to the smallest indices and the larger level") {
  Rng rng(8);
  std::vector<AdjacencyMatrix> graphs;
  for (int i = 0; i < 12; ++i) graphs.push_back(testing::random_graph(rng, 7, 0.5));
  const LabeledGraphDataset data(graphs, std::vector<int>(12, 0));
  const ScreeningResult result = screen_iterative(data, 0.5);
  std::vector<std::size_t> sizes;
  for (const ScreeningLevel& level : result.levels) sizes.push_back(level.vertices.size());
  CHECK(sizes == std::vector<std::size_t>{7, 4, 2, 1});
  CHECK(result.levels[1].vertices == VertexSet{0, 1, 2, 3});
  CHECK(result.levels[3].vertices == VertexSet{0});
  // Every level correlates 0 with constant labels; the first one wins.
  CHECK(result.selected_level == 0);
  CHECK(result.selected == VertexSet::full(7));
}

TEST_CASE("iterative screening is deterministic") {
  const LabeledGraphDataset data = exp1_data(50, 77);
  const ScreeningResult a = screen_iterative(data, 0.5);
  const ScreeningResult b = screen_iterative(data, 0.5);
  CHECK(a.scores == b.scores);
  CHECK(a.elimination == b.elimination);
  CHECK(a.selected == b.selected);
  CHECK(a.initial_scores == screen_once(data, 0.5).scores);
}

TEST_CASE("type-7 quantile") {
  const std::vector<double> v{4.0, 1.0, 3.0, 2.0};
  CHECK(empirical_quantile(v, 0.0) == 1.0);
  CHECK(empirical_quantile(v, 1.0) == 4.0);
  CHECK(empirical_quantile(v, 0.5) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(empirical_quantile(v, 0.25) == doctest::Approx(1.75).epsilon(1e-15));
  CHECK(empirical_quantile(std::vector<double>{5.0}, 0.3) == 5.0);
}

TEST_CASE("gap selection") {
  const std::vector<double> scores{0.9, 0.85, 0.2, 0.15};
  const GapSelection top = select_size_by_gap(scores);
  CHECK(top.selected == VertexSet{0, 1});
  CHECK(!top.degenerate);

  const std::vector<double> flat{0.5, 0.5, 0.5};
  const GapSelection all = select_size_by_gap(flat);
  CHECK(all.selected == VertexSet{0, 1, 2});
  CHECK(all.degenerate);

  const std::vector<double> shuffled{0.2, 0.9, 0.15, 0.85};
  CHECK(select_size_by_gap(shuffled).selected == VertexSet{1, 3});
  // Equal drops: the earliest cut wins.
  const std::vector<double> even{0.75, 0.5, 0.25};
  CHECK(select_size_by_gap(even).selected == VertexSet{0});
}

TEST_CASE("one-shot ranking follows score then index") {
  ScreeningResult r;
  r.vertex_count = 5;
  r.scores = {0.1, 0.5, 0.3, 0.5, 0.0};
  r.initial_scores = r.scores;
  r.elimination.assign(5, kSurvivor);
  CHECK(vertex_ranking(r) == std::vector<std::size_t>{1, 3, 2, 0, 4});
  CHECK(top_ranked(vertex_ranking(r), 2) == VertexSet{1, 3});
}

TEST_CASE("iterative ranking follows depth, then score, then index") {
  ScreeningResult r;
  r.vertex_count = 5;
  r.iterative = true;
  r.scores = {0.9, 0.1, 0.2, 0.2, 0.05};
  r.elimination = {0, kSurvivor, 1, 1, kSurvivor};
  CHECK(vertex_ranking(r) == std::vector<std::size_t>{1, 4, 2, 3, 0});
}

TEST_CASE("run_screening size rules") {
  const LabeledGraphDataset data = exp1_data(50, 4);
  ScreeningConfig config;
  config.rule = SizeRule::maxcorr;
  CHECK_THROWS_AS(run_screening(data, config), InputError);
  config.iterative = true;
  config.rule = SizeRule::threshold;
  CHECK_THROWS_AS(run_screening(data, config), InputError);
  config.rule = SizeRule::fixed;
  config.size = 0;
  CHECK_THROWS_AS(run_screening(data, config), InputError);
  config.size = 201;
  CHECK_THROWS_AS(run_screening(data, config), InputError);

  config.size = 30;
  const ScreeningOutcome fixed = run_screening(data, config);
  CHECK(fixed.selected.size() == 30);
  CHECK(fixed.selected == top_ranked(fixed.ranking, 30));
  CHECK(fixed.result.selected == fixed.selected);

  config.rule = SizeRule::maxcorr;
  const ScreeningOutcome best = run_screening(data, config);
  CHECK(best.selected == best.result.levels[best.result.selected_level].vertices);

  config.rule = SizeRule::gap;
  const ScreeningOutcome gap = run_screening(data, config);
  const std::size_t k = select_size_by_gap(gap.result.initial_scores).selected.size();
  CHECK(gap.selected == top_ranked(gap.ranking, k));

  ScreeningConfig once;
  once.rule = SizeRule::threshold;
  once.threshold = 0.1;
  const ScreeningOutcome thr = run_screening(data, once);
  CHECK(thr.selected == screen_once(data, 0.1).selected);
  CHECK(parse_size_rule("gap") == SizeRule::gap);
  CHECK_THROWS_AS(parse_size_rule("biggest"), InputError);
}
