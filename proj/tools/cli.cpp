#include "cli.hpp"

#include <omp.h>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vscreen/classify.hpp"
#include "vscreen/errors.hpp"
#include "vscreen/eval.hpp"
#include "vscreen/experiments.hpp"
#include "vscreen/graph_io.hpp"
#include "vscreen/report.hpp"
#include "vscreen/rng.hpp"

namespace vscreen {

namespace {

namespace fs = std::filesystem;

struct CommonOptions {
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out = ".";
};

struct DataOptions {
  std::string graphs;
  std::string labels;
  std::optional<std::size_t> n;
};

struct ScreenOptions {
  std::string stat = "dcorr";
  bool iterative = false;
  double delta = 0.5;
  std::optional<double> threshold;
  std::optional<std::size_t> size;
  std::optional<std::string> size_rule;
  std::size_t min_size = 1;
  std::string label_metric = "discrete";
};

struct ClassifyOptions {
  std::string classifier = "plugin";
  std::size_t k = 1;
  std::string group = "none";
  bool full_graph = false;
  std::optional<std::string> experiment;
};

struct ReplicateOptions {
  std::string experiment;
  std::size_t repeats = 50;
  std::optional<std::size_t> m;
  std::vector<std::size_t> m_grid;
  std::optional<std::size_t> test_draws;
  double delta = 0.5;
  std::size_t size = 20;
  bool no_mgc = false;
};

struct SimulateOptions {
  std::string experiment;
  std::size_t m = 0;
};

// Reads key=value lines as options of the subcommand being run, so config
// files need no section headers.
class SubcommandConfig : public CLI::ConfigTOML {
 public:
  explicit SubcommandConfig(const CLI::App& app) : app_(app) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::vector<CLI::ConfigItem> items = CLI::ConfigTOML::from_config(input);
    const auto active = app_.get_subcommands();
    if (active.empty()) return items;
    for (CLI::ConfigItem& item : items) {
      if (item.parents.empty()) item.parents = {active.front()->get_name()};
    }
    return items;
  }

 private:
  const CLI::App& app_;
};

void add_common(CLI::App& sub, CommonOptions& common) {
  sub.fallthrough();
  sub.add_option("--seed", common.seed, "Base random seed")->capture_default_str();
  sub.add_option("--threads", common.threads, "Worker threads (0 keeps the OpenMP default)")
      ->check(CLI::NonNegativeNumber);
  sub.add_option("--out", common.out, "Output directory")->capture_default_str();
}

void add_data(CLI::App& sub, DataOptions& data) {
  sub.add_option("--graphs", data.graphs, "Edge list CSV: graph_id,u,v,weight")->required();
  sub.add_option("--labels", data.labels, "Label CSV: graph_id,label[,subject_id]")->required();
  sub.add_option("--n", data.n, "Vertex count (default: 1 + largest index)");
}

void add_screen(CLI::App& sub, ScreenOptions& screen) {
  sub.add_option("--stat", screen.stat, "Dependence statistic")
      ->check(CLI::IsMember({"dcorr", "mgc", "rv", "cca"}))
      ->capture_default_str();
  sub.add_flag("--iterative", screen.iterative, "Iterative screening");
  sub.add_option("--delta", screen.delta, "Fraction removed per round, in (0, 1)")
      ->capture_default_str();
  sub.add_option("--threshold", screen.threshold, "Keep vertices scoring above c (one-shot)");
  sub.add_option("--size", screen.size, "Keep exactly this many top-ranked vertices");
  sub.add_option("--size-rule", screen.size_rule, "maxcorr, gap or fixed")
      ->check(CLI::IsMember({"maxcorr", "gap", "fixed"}));
  sub.add_option("--min-size", screen.min_size, "Stop iterating at this many vertices")
      ->capture_default_str();
  sub.add_option("--label-metric", screen.label_metric, "Distance between labels")
      ->check(CLI::IsMember({"discrete", "euclidean"}))
      ->capture_default_str();
}

ScreeningConfig resolve_screening(const ScreenOptions& o) {
  ScreeningConfig c;
  c.stat = parse_stat_kind(o.stat);
  c.iterative = o.iterative;
  c.delta = o.delta;
  c.min_size = o.min_size;
  c.label_metric = o.label_metric == "euclidean" ? Metric::euclidean : Metric::discrete;
  if (o.iterative && !(o.delta > 0.0 && o.delta < 1.0)) throw InputError("--delta must lie in (0, 1)");
  if (o.threshold && o.size) throw InputError("--threshold and --size are mutually exclusive");

  if (o.size_rule) {
    c.rule = parse_size_rule(*o.size_rule);
    if (o.threshold) throw InputError("--threshold conflicts with --size-rule");
    if (c.rule == SizeRule::fixed && !o.size) throw InputError("--size-rule fixed needs --size");
    if (c.rule != SizeRule::fixed && o.size) throw InputError("--size implies --size-rule fixed");
  } else if (o.size) {
    c.rule = SizeRule::fixed;
  } else if (o.threshold) {
    c.rule = SizeRule::threshold;
  } else {
    c.rule = o.iterative ? SizeRule::maxcorr : SizeRule::gap;
  }
  if (o.size) c.size = *o.size;
  if (o.threshold) {
    if (!(*o.threshold >= 0.0 && *o.threshold <= 1.0)) {
      throw InputError("--threshold must lie in [0, 1]");
    }
    c.threshold = *o.threshold;
  }
  return c;
}

std::string describe(const ScreeningConfig& c) {
  std::string text(to_string(c.stat));
  if (c.iterative) text = "it" + text;
  return text + "-" + std::string(to_string(c.rule));
}

void apply_threads(const CommonOptions& common) {
  if (common.threads > 0) omp_set_num_threads(common.threads);
}

int cmd_simulate(const SimulateOptions& o, const CommonOptions& common, std::ostream& out) {
  const ExperimentKind kind = parse_experiment(o.experiment);
  Rng rng(common.seed);
  const LabeledGraphDataset data = simulate_dataset(experiment_model(kind), o.m, rng);
  const fs::path dir(common.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_dataset(data, dir / "graphs.csv", dir / "labels.csv");
  out << "wrote " << data.size() << " graphs on " << data.vertex_count() << " vertices to "
      << dir.string() << '\n';
  return 0;
}

int cmd_screen(const DataOptions& d, const ScreenOptions& s, const CommonOptions& common,
               std::ostream& out, std::ostream& err) {
  const ScreeningConfig config = resolve_screening(s);
  const LabeledGraphDataset data = read_dataset(d.graphs, d.labels, d.n);
  const ScreeningOutcome outcome = run_screening(data, config);
  if (outcome.degenerate) err << "warning: all scores are equal; every vertex kept\n";
  write_screening_csv(outcome, data.vertex_names(), fs::path(common.out) / "screening.csv");

  out << "selected " << outcome.selected.size() << " of " << data.vertex_count() << " vertices:";
  for (std::size_t v : outcome.selected) out << ' ' << data.vertex_names()[v];
  out << '\n';
  return 0;
}

int cmd_classify(const DataOptions& d, const ScreenOptions& s, const ClassifyOptions& c,
                 const CommonOptions& common, std::ostream& out) {
  const LabeledGraphDataset data = read_dataset(d.graphs, d.labels, d.n);
  const fs::path dir(common.out);

  if (c.classifier == "bayes") {
    if (!c.experiment) throw InputError("--classifier bayes needs --experiment");
    const BayesRule rule(experiment_model(parse_experiment(*c.experiment)));
    CrossValidationReport report;
    for (std::size_t i = 0; i < data.size(); ++i) {
      FoldRecord fold;
      fold.held_out = {i};
      fold.selected = VertexSet::full(data.vertex_count());
      fold.truth = {data.labels()[i]};
      fold.predicted = {rule.predict(data.graph(i))};
      report.folds.push_back(std::move(fold));
    }
    std::vector<int> predicted;
    for (const FoldRecord& fold : report.folds) predicted.push_back(fold.predicted.front());
    report.loss = estimate_loss(predicted, data.labels());
    report.loss.folds = report.folds.size();
    write_predictions_csv(report, data, dir / "predictions.csv");
    write_cv_loss_csv(report, "bayes", data.size(), dir / "loss.csv");
    out << "bayes error " << format_number(report.loss.error) << " (se "
        << format_number(report.loss.standard_error) << ") over " << report.loss.count
        << " graphs\n";
    return 0;
  }

  PipelineSpec spec;
  spec.classifier.kind = c.classifier == "knn" ? ClassifierKind::knn : ClassifierKind::plugin;
  spec.classifier.k = c.k;
  if (!c.full_graph) spec.screening = resolve_screening(s);
  const Grouping grouping = parse_grouping(c.group);
  if (grouping == Grouping::subject && !data.has_subjects()) {
    throw InputError("--group subject needs a subject_id column in the labels file");
  }

  const CrossValidationReport report = cross_validate(data, spec, grouping);
  std::string method(to_string(spec.classifier.kind));
  if (spec.classifier.kind == ClassifierKind::knn) method += std::to_string(c.k);
  method += ":" + (spec.screening ? describe(*spec.screening) : std::string("full"));
  write_predictions_csv(report, data, dir / "predictions.csv");
  write_cv_loss_csv(report, method, data.size(), dir / "loss.csv");

  std::size_t unseen = 0;
  for (const FoldRecord& fold : report.folds) unseen += fold.unseen_class;
  out << method << " error " << format_number(report.loss.error) << " (se "
      << format_number(report.loss.standard_error) << ") over " << report.loss.count
      << " graphs in " << report.loss.folds << " folds\n";
  if (unseen > 0) out << unseen << " folds held out a class absent from training\n";
  return 0;
}

int cmd_replicate(const ReplicateOptions& r, const CommonOptions& common, std::ostream& out) {
  ExperimentConfig config = default_experiment(parse_experiment(r.experiment));
  if (r.m && !r.m_grid.empty()) throw InputError("--m and --m-grid are mutually exclusive");
  if (r.m) config.m_grid = {*r.m};
  if (!r.m_grid.empty()) config.m_grid = r.m_grid;
  if (r.test_draws) config.test_draws = *r.test_draws;
  config.repeats = r.repeats;
  config.seed = common.seed;
  config.delta = r.delta;
  config.selection_size = r.size;
  config.include_mgc = !r.no_mgc;

  const EvalReport report = run_experiment(config);
  write_report(report, common.out);
  print_summary(out, summarize(report));
  out << "\nwall-clock seconds (summed over repeats)\n";
  for (const MethodTiming& t : report.timings) {
    out << "  " << t.method << ": " << format_number(t.seconds) << '\n';
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Signal-subgraph estimation by vertex screening"};
  app.require_subcommand(1);
  app.set_config("--config", "", "File of key=value lines; command-line flags take precedence");
  app.config_formatter(std::make_shared<SubcommandConfig>(app));

  CommonOptions common;
  DataOptions data;
  ScreenOptions screen;
  ClassifyOptions classify;
  ReplicateOptions replicate;
  SimulateOptions simulate;

  CLI::App* sim = app.add_subcommand("simulate", "Draw a dataset from a simulation model");
  add_common(*sim, common);
  sim->add_option("--experiment", simulate.experiment, "exp1 or exp2")
      ->required()
      ->check(CLI::IsMember({"exp1", "exp2", "experiment-1", "experiment-2"}));
  sim->add_option("--m", simulate.m, "Number of graphs")->required();

  CLI::App* scr = app.add_subcommand("screen", "Rank vertices and select a signal subgraph");
  add_common(*scr, common);
  add_data(*scr, data);
  add_screen(*scr, screen);

  CLI::App* cls = app.add_subcommand("classify", "Cross-validated screening and classification");
  add_common(*cls, common);
  add_data(*cls, data);
  add_screen(*cls, screen);
  cls->add_option("--classifier", classify.classifier, "plugin, knn or bayes")
      ->check(CLI::IsMember({"plugin", "knn", "bayes"}))
      ->capture_default_str();
  cls->add_option("--k", classify.k, "Neighbours for knn")->check(CLI::PositiveNumber);
  cls->add_option("--group", classify.group, "none (leave-one-out) or subject")
      ->check(CLI::IsMember({"none", "subject"}))
      ->capture_default_str();
  cls->add_flag("--full-graph", classify.full_graph, "Skip screening and use every vertex");
  cls->add_option("--experiment", classify.experiment, "True model for --classifier bayes")
      ->check(CLI::IsMember({"exp1", "exp2", "experiment-1", "experiment-2"}));

  CLI::App* rep = app.add_subcommand("replicate", "Run a simulation study and write its report");
  add_common(*rep, common);
  rep->add_option("experiment", replicate.experiment, "exp1 or exp2")
      ->required()
      ->check(CLI::IsMember({"exp1", "exp2", "experiment-1", "experiment-2"}));
  rep->add_option("--repeats", replicate.repeats, "Independent repeats")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  rep->add_option("--m", replicate.m, "Training graphs per repeat");
  rep->add_option("--m-grid", replicate.m_grid, "Comma-separated training sizes")->delimiter(',');
  rep->add_option("--test-draws", replicate.test_draws, "Monte-Carlo test graphs per repeat");
  rep->add_option("--delta", replicate.delta, "Iterative screening fraction")->capture_default_str();
  rep->add_option("--size", replicate.size, "Vertices kept by screened methods")
      ->capture_default_str();
  rep->add_flag("--no-mgc", replicate.no_mgc, "Leave MGC out of exp1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::FileError& e) {
    app.exit(e, out, err);
    return 2;
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    apply_threads(common);
    if (sim->parsed()) return cmd_simulate(simulate, common, out);
    if (scr->parsed()) return cmd_screen(data, screen, common, out, err);
    if (cls->parsed()) return cmd_classify(data, screen, classify, common, out);
    if (rep->parsed()) return cmd_replicate(replicate, common, out);
    return 3;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const FitError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace vscreen
