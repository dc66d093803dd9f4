#pragma once

// CSV and text output. Numbers are printed with a fixed number of
// significant digits, so equal inputs give byte-identical files.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "vscreen/eval.hpp"
#include "vscreen/graph.hpp"

namespace vscreen {

/// 10 significant digits, "NA" for NaN.
std::string format_number(double value);

/// auc.csv, fpr.csv, loss.csv, roc.csv and summary.csv in `dir`, which is
/// created if missing. Throws IoError when a file cannot be written.
void write_report(const EvalReport& report, const std::filesystem::path& dir);

/// vertex,name,score,rank,level,selected. `level` is the elimination round,
/// or "survivor".
void write_screening_csv(const ScreeningOutcome& outcome, std::span<const std::string> names,
                         const std::filesystem::path& path);

/// fold,graph,subject,truth,predicted,unseen_class.
void write_predictions_csv(const CrossValidationReport& report, const LabeledGraphDataset& data,
                           const std::filesystem::path& path);

/// Single-row loss.csv for a cross-validated pipeline.
void write_cv_loss_csv(const CrossValidationReport& report, const std::string& method,
                       std::size_t m, const std::filesystem::path& path);

/// Aligned text table of summary rows.
void print_summary(std::ostream& out, std::span<const SummaryRow> rows);

}  // namespace vscreen
