#pragma once

// Signal-vertex recovery metrics, cross-validated screening + prediction
// pipelines, and the two simulation studies.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vscreen/classify.hpp"
#include "vscreen/corr.hpp"
#include "vscreen/experiments.hpp"
#include "vscreen/graph.hpp"
#include "vscreen/screen.hpp"

namespace vscreen {

struct RocPoint {
  double fpr;
  double tpr;
};

/// Points from (0,0) to (1,1), one per prefix size of a ranking.
struct RocCurve {
  std::vector<RocPoint> points;
};

struct RocResult {
  RocCurve curve;
  double auc = 0.0;
};

/// Sweeps prefixes 0..n of `ranking` (a permutation of 0..n-1) against the
/// true signal set and integrates with the trapezoid rule. Throws InputError
/// when the true set is empty or covers every vertex.
RocResult roc_auc(std::span<const std::size_t> ranking, const VertexSet& truth, std::size_t n);

/// |selected \ truth| / (n - |truth|).
double fpr_at_size(const VertexSet& selected, const VertexSet& truth, std::size_t n);

/// How many vertices a screening run keeps.
enum class SizeRule {
  maxcorr,    // level with the largest subgraph correlation (iterative only)
  gap,        // largest drop in the first-round scores
  fixed,      // a given count, taken from the top of the ranking
  threshold,  // scores strictly above c (one-shot only)
};

std::string_view to_string(SizeRule rule);
SizeRule parse_size_rule(std::string_view text);

struct ScreeningConfig {
  StatKind stat = StatKind::dcorr;
  bool iterative = false;
  double delta = 0.5;
  std::size_t min_size = 1;
  SizeRule rule = SizeRule::gap;
  double threshold = 0.0;
  std::size_t size = 0;
  Metric label_metric = Metric::discrete;
};

struct ScreeningOutcome {
  ScreeningResult result;
  std::vector<std::size_t> ranking;
  VertexSet selected;
  /// The gap rule met all-equal scores and kept every vertex.
  bool degenerate = false;
};

/// Screens and applies the size rule. Throws InputError for a rule that
/// does not fit the mode (maxcorr one-shot, threshold iterative) or a fixed
/// size outside [1, n].
ScreeningOutcome run_screening(const LabeledGraphDataset& data, const ScreeningConfig& config);

enum class ClassifierKind { plugin, knn };

std::string_view to_string(ClassifierKind kind);

struct ClassifierConfig {
  ClassifierKind kind = ClassifierKind::plugin;
  std::size_t k = 1;
};

/// Either screen inside every fold or use a fixed vertex set (empty means
/// the whole graph).
struct PipelineSpec {
  std::optional<ScreeningConfig> screening;
  VertexSet vertices;
  ClassifierConfig classifier;
};

enum class Grouping { none, subject };

Grouping parse_grouping(std::string_view text);

struct FoldRecord {
  std::vector<std::size_t> held_out;
  VertexSet selected;
  std::vector<int> predicted;
  std::vector<int> truth;
  /// Some held-out label never occurs in the training part. The prediction
  /// is still made and necessarily counts as an error.
  bool unseen_class = false;
};

struct CrossValidationReport {
  std::vector<FoldRecord> folds;
  LossEstimate loss;
};

/// Leave-one-out (grouping none) or leave-one-subject-out. Screening and
/// fitting only ever see the training part of a fold. Folds run in parallel
/// and are reported in order.
CrossValidationReport cross_validate(const LabeledGraphDataset& data, const PipelineSpec& spec,
                                     Grouping grouping = Grouping::none);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::exp1;
  std::size_t repeats = 50;
  std::uint64_t seed = 1;
  /// Training sizes. exp1 uses the first entry only.
  std::vector<std::size_t> m_grid;
  /// Fresh graphs per repeat for Monte-Carlo loss (exp2).
  std::size_t test_draws = 2000;
  double delta = 0.5;
  /// Vertices kept by the screened classifiers and for FPR.
  std::size_t selection_size = 20;
  bool include_mgc = true;
};

/// exp1: m = 100, MGC included. exp2: m in {60, 150, 300, 600}.
ExperimentConfig default_experiment(ExperimentKind kind);

struct AucRecord {
  std::string method;
  std::size_t m;
  std::size_t repeat;
  double auc;
};

struct FprRecord {
  std::string method;
  std::size_t m;
  std::size_t repeat;
  double fpr;
};

struct LossRecord {
  std::string method;
  std::size_t m;
  std::size_t repeat;
  double error;
  double standard_error;
  std::size_t count;
};

/// Vertically averaged ROC curve on the FPR grid j / (n - |S|).
struct RocRecord {
  std::string method;
  std::size_t m;
  double fpr;
  double tpr;
};

struct SummaryRow {
  std::string metric;
  std::string method;
  std::size_t m;
  std::size_t repeats;
  double mean;
  /// Sample standard deviation over sqrt(repeats); absent for one repeat.
  std::optional<double> standard_error;
};

struct MethodTiming {
  std::string method;
  double seconds;
};

struct EvalReport {
  ExperimentKind kind = ExperimentKind::exp1;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<AucRecord> auc;
  std::vector<FprRecord> fpr;
  std::vector<LossRecord> loss;
  std::vector<RocRecord> roc;
  /// Wall-clock per method summed over repeats. Never written to CSV.
  std::vector<MethodTiming> timings;
};

std::string iterative_method_name(double delta);

/// Regenerates the experiment's class mixture for every repeat from seed
/// repeat_seed(config.seed, i) and runs all methods. Repeats run in
/// parallel; records come out in (m, repeat, method) order regardless.
EvalReport run_experiment(const ExperimentConfig& config);

/// Means and standard errors per (metric, method, m), in first-seen order.
std::vector<SummaryRow> summarize(const EvalReport& report);

/// Mean and standard error of one metric for one method, or nullopt if
/// there are no records.
std::optional<SummaryRow> find_summary(std::span<const SummaryRow> rows, std::string_view metric,
                                       std::string_view method, std::size_t m);

}  // namespace vscreen
