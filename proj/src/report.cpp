#include "vscreen/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "vscreen/errors.hpp"

namespace vscreen {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "NA";
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.10g", value);
  return buffer;
}

void write_report(const EvalReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  {
    const auto path = dir / "auc.csv";
    auto out = open_output(path);
    out << "method,m,repeat,auc\n";
    for (const AucRecord& r : report.auc) {
      out << r.method << ',' << r.m << ',' << r.repeat << ',' << format_number(r.auc) << '\n';
    }
    finish(out, path);
  }
  {
    const auto path = dir / "fpr.csv";
    auto out = open_output(path);
    out << "method,m,repeat,fpr\n";
    for (const FprRecord& r : report.fpr) {
      out << r.method << ',' << r.m << ',' << r.repeat << ',' << format_number(r.fpr) << '\n';
    }
    finish(out, path);
  }
  {
    const auto path = dir / "loss.csv";
    auto out = open_output(path);
    out << "method,m,repeat,error,se,n\n";
    for (const LossRecord& r : report.loss) {
      out << r.method << ',' << r.m << ',' << r.repeat << ',' << format_number(r.error) << ','
          << format_number(r.standard_error) << ',' << r.count << '\n';
    }
    finish(out, path);
  }
  {
    const auto path = dir / "roc.csv";
    auto out = open_output(path);
    out << "method,m,fpr,tpr\n";
    for (const RocRecord& r : report.roc) {
      out << r.method << ',' << r.m << ',' << format_number(r.fpr) << ',' << format_number(r.tpr)
          << '\n';
    }
    finish(out, path);
  }
  {
    const auto path = dir / "summary.csv";
    auto out = open_output(path);
    out << "metric,method,m,repeats,mean,se\n";
    for (const SummaryRow& r : summarize(report)) {
      out << r.metric << ',' << r.method << ',' << r.m << ',' << r.repeats << ','
          << format_number(r.mean) << ','
          << (r.standard_error ? format_number(*r.standard_error) : "NA") << '\n';
    }
    finish(out, path);
  }
}

void write_screening_csv(const ScreeningOutcome& outcome, std::span<const std::string> names,
                         const std::filesystem::path& path) {
  const ScreeningResult& result = outcome.result;
  std::vector<std::size_t> rank(result.vertex_count);
  for (std::size_t r = 0; r < outcome.ranking.size(); ++r) rank[outcome.ranking[r]] = r + 1;

  auto out = open_output(path);
  out << "vertex,name,score,rank,level,selected\n";
  for (std::size_t v = 0; v < result.vertex_count; ++v) {
    out << v << ',' << names[v] << ',' << format_number(result.scores[v]) << ',' << rank[v] << ',';
    if (result.elimination[v] == kSurvivor) {
      out << "survivor";
    } else {
      out << result.elimination[v];
    }
    out << ',' << (outcome.selected.contains(v) ? 1 : 0) << '\n';
  }
  finish(out, path);
}

void write_predictions_csv(const CrossValidationReport& report, const LabeledGraphDataset& data,
                           const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "fold,graph,subject,truth,predicted,unseen_class\n";
  for (std::size_t f = 0; f < report.folds.size(); ++f) {
    const FoldRecord& fold = report.folds[f];
    for (std::size_t j = 0; j < fold.held_out.size(); ++j) {
      const std::size_t i = fold.held_out[j];
      out << f << ',' << i << ',' << (data.has_subjects() ? data.subject_ids()[i] : "") << ','
          << fold.truth[j] << ',' << fold.predicted[j] << ',' << (fold.unseen_class ? 1 : 0)
          << '\n';
    }
  }
  finish(out, path);
}

void write_cv_loss_csv(const CrossValidationReport& report, const std::string& method,
                       std::size_t m, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "method,m,repeat,error,se,n,folds\n";
  out << method << ',' << m << ",0," << format_number(report.loss.error) << ','
      << format_number(report.loss.standard_error) << ',' << report.loss.count << ','
      << report.loss.folds << '\n';
  finish(out, path);
}

void print_summary(std::ostream& out, std::span<const SummaryRow> rows) {
  std::size_t width = 6;
  for (const SummaryRow& r : rows) width = std::max(width, r.method.size());
  out << std::left << std::setw(6) << "metric" << "  " << std::setw(static_cast<int>(width))
      << "method" << "  " << std::right << std::setw(5) << "m" << "  " << std::setw(7)
      << "repeats" << "  " << std::setw(10) << "mean" << "  " << std::setw(10) << "se" << '\n';
  for (const SummaryRow& r : rows) {
    char mean[32];
    char se[32];
    std::snprintf(mean, sizeof mean, "%.4f", r.mean);
    if (r.standard_error) {
      std::snprintf(se, sizeof se, "%.4f", *r.standard_error);
    } else {
      std::snprintf(se, sizeof se, "NA");
    }
    out << std::left << std::setw(6) << r.metric << "  " << std::setw(static_cast<int>(width))
        << r.method << "  " << std::right << std::setw(5) << r.m << "  " << std::setw(7)
        << r.repeats << "  " << std::setw(10) << mean << "  " << std::setw(10) << se << '\n';
  }
}

}  // namespace vscreen
