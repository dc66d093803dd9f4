#include "vscreen/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <tuple>

#include "vscreen/errors.hpp"

namespace vscreen {

namespace {

void require_proper_truth(const VertexSet& truth, std::size_t n) {
  truth.require_within(n);
  if (truth.empty() || truth.size() == n) {
    throw InputError("true signal set must be non-empty and leave at least one vertex out");
  }
}

// Runs body(i) for i in [0, count) in parallel and rethrows the first
// failure after the loop.
template <typename Body>
void parallel_for(std::size_t count, Body&& body) {
  std::exception_ptr failure;
  const auto total = static_cast<long>(count);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < total; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// TPR reached before the (j+1)-th false positive, for j = 0..negatives.
std::vector<double> tpr_on_fpr_grid(std::span<const std::size_t> ranking, const VertexSet& truth) {
  const std::size_t negatives = ranking.size() - truth.size();
  std::vector<double> grid(negatives + 1, 0.0);
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t v : ranking) {
    if (truth.contains(v)) {
      ++tp;
      grid[fp] = static_cast<double>(tp) / static_cast<double>(truth.size());
    } else {
      ++fp;
      grid[fp] = grid[fp - 1];
    }
  }
  return grid;
}

struct MethodResult {
  std::string method;
  double auc = 0.0;
  double fpr = 0.0;
  std::vector<double> roc;
  double seconds = 0.0;
};

struct LossResult {
  std::string method;
  LossEstimate loss;
};

struct RepeatResult {
  std::vector<MethodResult> screening;
  std::vector<LossResult> loss;
  std::vector<double> classifier_seconds;
};

ScreeningConfig fixed_size_config(StatKind stat, bool iterative, double delta, std::size_t size) {
  ScreeningConfig config;
  config.stat = stat;
  config.iterative = iterative;
  config.delta = delta;
  config.rule = SizeRule::fixed;
  config.size = size;
  return config;
}

struct NamedScreen {
  std::string method;
  ScreeningConfig config;
};

std::vector<NamedScreen> screening_methods(const ExperimentConfig& config) {
  const std::size_t k = config.selection_size;
  std::vector<NamedScreen> methods{
      {"Dcorr", fixed_size_config(StatKind::dcorr, false, config.delta, k)},
      {iterative_method_name(config.delta), fixed_size_config(StatKind::dcorr, true, config.delta, k)},
  };
  if (config.kind == ExperimentKind::exp1) {
    methods.push_back({"RV", fixed_size_config(StatKind::rv, false, config.delta, k)});
    methods.push_back({"CCA", fixed_size_config(StatKind::cca, false, config.delta, k)});
    if (config.include_mgc) {
      methods.push_back({"MGC", fixed_size_config(StatKind::mgc, false, config.delta, k)});
    }
  }
  return methods;
}

RepeatResult run_repeat(const ExperimentConfig& config, const IerClassModel& model,
                        const VertexSet& truth, std::size_t m, std::uint64_t seed) {
  RepeatResult out;
  Rng train_rng(seed, m);
  const LabeledGraphDataset train = simulate_dataset(model, m, train_rng);
  const std::size_t n = train.vertex_count();

  std::vector<VertexSet> selections;
  for (const NamedScreen& method : screening_methods(config)) {
    const auto start = std::chrono::steady_clock::now();
    const ScreeningOutcome screened = run_screening(train, method.config);
    MethodResult r;
    r.seconds = seconds_since(start);
    r.method = method.method;
    r.auc = roc_auc(screened.ranking, truth, n).auc;
    r.fpr = fpr_at_size(screened.selected, truth, n);
    r.roc = tpr_on_fpr_grid(screened.ranking, truth);
    out.screening.push_back(std::move(r));
    selections.push_back(screened.selected);
  }
  if (config.kind != ExperimentKind::exp2) return out;

  // Classifiers: Bayes with the true model, plug-in on S, on the whole
  // graph, and on each screened selection.
  const BayesRule bayes(model);
  std::vector<std::string> names{"Bayes", "S", "V"};
  std::vector<VertexSet> sets{truth, VertexSet::full(n)};
  for (std::size_t s = 0; s < selections.size(); ++s) {
    names.push_back("S-" + out.screening[s].method);
    sets.push_back(selections[s]);
  }
  std::vector<PluginModel> models;
  out.classifier_seconds.assign(names.size(), 0.0);
  for (std::size_t c = 0; c < sets.size(); ++c) {
    const auto start = std::chrono::steady_clock::now();
    models.push_back(fit_plugin(train, sets[c]));
    out.classifier_seconds[c + 1] += seconds_since(start);
  }

  std::vector<std::vector<int>> predicted(names.size());
  std::vector<int> truth_labels;
  Rng test_rng(seed, m + (std::uint64_t{1} << 32));
  for (std::size_t draw = 0; draw < config.test_draws; ++draw) {
    const LabeledGraph sample = draw_graph(model, test_rng);
    truth_labels.push_back(sample.label);
    auto start = std::chrono::steady_clock::now();
    predicted[0].push_back(bayes.predict(sample.graph));
    out.classifier_seconds[0] += seconds_since(start);
    for (std::size_t c = 0; c < models.size(); ++c) {
      start = std::chrono::steady_clock::now();
      predicted[c + 1].push_back(plugin_predict(models[c], sample.graph, sets[c]));
      out.classifier_seconds[c + 1] += seconds_since(start);
    }
  }
  for (std::size_t c = 0; c < names.size(); ++c) {
    out.loss.push_back({names[c], estimate_loss(predicted[c], truth_labels)});
  }
  return out;
}

void add_timing(std::vector<MethodTiming>& timings, const std::string& method, double seconds) {
  for (MethodTiming& t : timings) {
    if (t.method == method) {
      t.seconds += seconds;
      return;
    }
  }
  timings.push_back({method, seconds});
}

}  // namespace

RocResult roc_auc(std::span<const std::size_t> ranking, const VertexSet& truth, std::size_t n) {
  if (ranking.size() != n) throw InputError("ranking must order every vertex");
  std::vector<bool> seen(n, false);
  for (std::size_t v : ranking) {
    if (v >= n || seen[v]) throw InputError("ranking is not a permutation");
    seen[v] = true;
  }
  require_proper_truth(truth, n);

  const auto positives = static_cast<double>(truth.size());
  const auto negatives = static_cast<double>(n - truth.size());
  RocResult out;
  out.curve.points.reserve(n + 1);
  out.curve.points.push_back({0.0, 0.0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t v : ranking) {
    if (truth.contains(v)) {
      ++tp;
    } else {
      ++fp;
    }
    const RocPoint prev = out.curve.points.back();
    const RocPoint next{static_cast<double>(fp) / negatives, static_cast<double>(tp) / positives};
    out.auc += (next.fpr - prev.fpr) * (next.tpr + prev.tpr) / 2.0;
    out.curve.points.push_back(next);
  }
  return out;
}

double fpr_at_size(const VertexSet& selected, const VertexSet& truth, std::size_t n) {
  selected.require_within(n);
  require_proper_truth(truth, n);
  std::size_t false_positives = 0;
  for (std::size_t v : selected) false_positives += !truth.contains(v);
  return static_cast<double>(false_positives) / static_cast<double>(n - truth.size());
}

std::string_view to_string(SizeRule rule) {
  switch (rule) {
    case SizeRule::maxcorr: return "maxcorr";
    case SizeRule::gap: return "gap";
    case SizeRule::fixed: return "fixed";
    case SizeRule::threshold: return "threshold";
  }
  return "?";
}

SizeRule parse_size_rule(std::string_view text) {
  for (SizeRule rule : {SizeRule::maxcorr, SizeRule::gap, SizeRule::fixed, SizeRule::threshold}) {
    if (text == to_string(rule)) return rule;
  }
  throw InputError("unknown size rule '" + std::string(text) + "'");
}

ScreeningOutcome run_screening(const LabeledGraphDataset& data, const ScreeningConfig& config) {
  const std::size_t n = data.vertex_count();
  if (config.rule == SizeRule::maxcorr && !config.iterative) {
    throw InputError("the maxcorr size rule needs iterative screening");
  }
  if (config.rule == SizeRule::threshold && config.iterative) {
    throw InputError("the threshold size rule applies to one-shot screening only");
  }
  if (config.rule == SizeRule::fixed && (config.size < 1 || config.size > n)) {
    throw InputError("fixed size must lie in [1, " + std::to_string(n) + "]");
  }

  ScreeningOutcome out;
  out.result = config.iterative
                   ? screen_iterative(data, config.delta, config.stat, config.min_size,
                                      config.label_metric)
                   : screen_once(data, config.threshold, config.stat, config.label_metric);
  out.ranking = vertex_ranking(out.result);
  switch (config.rule) {
    case SizeRule::maxcorr:
    case SizeRule::threshold:
      out.selected = out.result.selected;
      break;
    case SizeRule::fixed:
      out.selected = top_ranked(out.ranking, config.size);
      break;
    case SizeRule::gap: {
      const GapSelection gap = select_size_by_gap(out.result.initial_scores);
      out.degenerate = gap.degenerate;
      out.selected = top_ranked(out.ranking, gap.selected.size());
      break;
    }
  }
  out.result.selected = out.selected;
  return out;
}

std::string_view to_string(ClassifierKind kind) {
  return kind == ClassifierKind::plugin ? "plugin" : "knn";
}

Grouping parse_grouping(std::string_view text) {
  if (text == "none") return Grouping::none;
  if (text == "subject") return Grouping::subject;
  throw InputError("unknown grouping '" + std::string(text) + "'");
}

CrossValidationReport cross_validate(const LabeledGraphDataset& data, const PipelineSpec& spec,
                                     Grouping grouping) {
  const std::size_t m = data.size();
  if (!spec.screening) spec.vertices.require_within(data.vertex_count());
  if (spec.classifier.kind == ClassifierKind::knn && spec.classifier.k < 1) {
    throw InputError("k must be at least 1");
  }

  std::vector<std::vector<std::size_t>> held_out;
  if (grouping == Grouping::subject) {
    if (!data.has_subjects()) throw InputError("subject grouping needs subject ids");
    std::map<std::string, std::size_t> fold_of;
    for (std::size_t i = 0; i < m; ++i) {
      const auto [it, inserted] = fold_of.emplace(data.subject_ids()[i], held_out.size());
      if (inserted) held_out.emplace_back();
      held_out[it->second].push_back(i);
    }
  } else {
    for (std::size_t i = 0; i < m; ++i) held_out.push_back({i});
  }
  if (held_out.size() < 2) throw InputError("cross-validation needs at least 2 folds");

  CrossValidationReport report;
  report.folds.resize(held_out.size());
  parallel_for(held_out.size(), [&](std::size_t f) {
    FoldRecord& fold = report.folds[f];
    fold.held_out = held_out[f];
    std::vector<std::size_t> train_idx;
    std::size_t next = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (next < fold.held_out.size() && fold.held_out[next] == i) {
        ++next;
      } else {
        train_idx.push_back(i);
      }
    }
    const LabeledGraphDataset train = data.subset(train_idx);

    if (spec.screening) {
      fold.selected = run_screening(train, *spec.screening).selected;
    } else {
      fold.selected = spec.vertices.empty() ? VertexSet::full(data.vertex_count()) : spec.vertices;
    }

    const std::vector<int> classes = train.classes();
    std::optional<PluginModel> model;
    if (spec.classifier.kind == ClassifierKind::plugin) model = fit_plugin(train, fold.selected);
    for (std::size_t i : fold.held_out) {
      const AdjacencyMatrix& graph = data.graph(i);
      const int label = data.labels()[i];
      fold.truth.push_back(label);
      fold.predicted.push_back(model ? plugin_predict(*model, graph, fold.selected)
                                     : knn_predict(train, graph, spec.classifier.k, fold.selected));
      if (!std::binary_search(classes.begin(), classes.end(), label)) fold.unseen_class = true;
    }
  });

  std::vector<int> predicted;
  std::vector<int> truth;
  for (const FoldRecord& fold : report.folds) {
    predicted.insert(predicted.end(), fold.predicted.begin(), fold.predicted.end());
    truth.insert(truth.end(), fold.truth.begin(), fold.truth.end());
  }
  report.loss = estimate_loss(predicted, truth);
  report.loss.folds = report.folds.size();
  return report;
}

ExperimentConfig default_experiment(ExperimentKind kind) {
  ExperimentConfig config;
  config.kind = kind;
  if (kind == ExperimentKind::exp1) {
    config.m_grid = {100};
  } else {
    config.m_grid = {60, 150, 300, 600};
  }
  return config;
}

std::string iterative_method_name(double delta) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "ItDcorr-%.2f", delta);
  return buffer;
}

EvalReport run_experiment(const ExperimentConfig& config) {
  if (config.repeats < 1) throw InputError("repeats must be at least 1");
  if (config.m_grid.empty()) throw InputError("no training size given");
  if (!(config.delta > 0.0 && config.delta < 1.0)) throw InputError("delta must lie in (0, 1)");
  if (config.kind == ExperimentKind::exp2 && config.test_draws < 1) {
    throw InputError("test draws must be at least 1");
  }

  const IerClassModel model = experiment_model(config.kind);
  const VertexSet truth = true_signal_vertices(model);
  const std::size_t n = model.probabilities.front().size();
  if (config.selection_size < 1 || config.selection_size > n) {
    throw InputError("selection size must lie in [1, n]");
  }
  const std::vector<std::size_t> grid =
      config.kind == ExperimentKind::exp1 ? std::vector<std::size_t>{config.m_grid.front()}
                                          : config.m_grid;

  EvalReport report;
  report.kind = config.kind;
  report.seed = config.seed;
  for (std::size_t i = 0; i < config.repeats; ++i) {
    report.seeds.push_back(repeat_seed(config.seed, i));
  }

  for (std::size_t m : grid) {
    std::vector<RepeatResult> results(config.repeats);
    parallel_for(config.repeats, [&](std::size_t i) {
      results[i] = run_repeat(config, model, truth, m, report.seeds[i]);
    });

    const std::size_t methods = results.front().screening.size();
    for (std::size_t k = 0; k < methods; ++k) {
      const std::string& method = results.front().screening[k].method;
      std::vector<double> roc(results.front().screening[k].roc.size(), 0.0);
      for (std::size_t i = 0; i < config.repeats; ++i) {
        const MethodResult& r = results[i].screening[k];
        if (config.kind == ExperimentKind::exp1) report.auc.push_back({method, m, i, r.auc});
        report.fpr.push_back({method, m, i, r.fpr});
        for (std::size_t j = 0; j < roc.size(); ++j) roc[j] += r.roc[j];
        add_timing(report.timings, method, r.seconds);
      }
      if (config.kind == ExperimentKind::exp1) {
        const double negatives = static_cast<double>(roc.size() - 1);
        for (std::size_t j = 0; j < roc.size(); ++j) {
          report.roc.push_back({method, m, static_cast<double>(j) / negatives,
                                roc[j] / static_cast<double>(config.repeats)});
        }
      }
    }
    for (std::size_t c = 0; c < results.front().loss.size(); ++c) {
      for (std::size_t i = 0; i < config.repeats; ++i) {
        const LossResult& r = results[i].loss[c];
        report.loss.push_back({r.method, m, i, r.loss.error, r.loss.standard_error, r.loss.count});
        add_timing(report.timings, "classify " + r.method, results[i].classifier_seconds[c]);
      }
    }
  }
  return report;
}

std::vector<SummaryRow> summarize(const EvalReport& report) {
  using Key = std::tuple<std::string, std::string, std::size_t>;
  std::vector<Key> order;
  std::map<Key, std::vector<double>> values;
  auto add = [&](const std::string& metric, const std::string& method, std::size_t m, double v) {
    Key key{metric, method, m};
    auto [it, inserted] = values.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(v);
  };
  for (const AucRecord& r : report.auc) add("auc", r.method, r.m, r.auc);
  for (const FprRecord& r : report.fpr) add("fpr", r.method, r.m, r.fpr);
  for (const LossRecord& r : report.loss) add("loss", r.method, r.m, r.error);

  std::vector<SummaryRow> rows;
  for (const Key& key : order) {
    const std::vector<double>& v = values[key];
    SummaryRow row;
    std::tie(row.metric, row.method, row.m) = key;
    row.repeats = v.size();
    const double count = static_cast<double>(v.size());
    row.mean = std::accumulate(v.begin(), v.end(), 0.0) / count;
    if (v.size() > 1) {
      double ss = 0.0;
      for (double x : v) ss += (x - row.mean) * (x - row.mean);
      row.standard_error = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::optional<SummaryRow> find_summary(std::span<const SummaryRow> rows, std::string_view metric,
                                       std::string_view method, std::size_t m) {
  for (const SummaryRow& row : rows) {
    if (row.metric == metric && row.method == method && row.m == m) return row;
  }
  return std::nullopt;
}

}  // namespace vscreen
