#pragma once

// Distance-based and linear dependence statistics between a sample of
// feature vectors and a sample of labels.
//
// Samples are stored one per row (m rows, d columns). Labels are integer
// class codes; distance statistics measure them with a discrete 0/1 metric
// or with absolute differences, while the linear baselines (RV, CCA) use a
// one-hot encoding.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <utility>

#include <Eigen/Dense>

namespace vscreen {

/// Rows are samples, columns are feature coordinates.
using SampleMatrix = Eigen::MatrixXd;

enum class Metric { euclidean, discrete };

enum class StatKind { dcorr, mgc, rv, cca };

std::string_view to_string(StatKind kind);
std::string_view to_string(Metric metric);
StatKind parse_stat_kind(std::string_view text);

/// Symmetric, hollow, nonnegative m x m matrix of pairwise distances.
class DistanceMatrix {
 public:
  /// Validates the matrix; throws InputError if it is not a distance matrix.
  DistanceMatrix(Eigen::MatrixXd distances, Metric metric);

  std::size_t size() const { return static_cast<std::size_t>(d_.rows()); }
  Metric metric() const { return metric_; }
  const Eigen::MatrixXd& matrix() const { return d_; }
  double operator()(std::size_t i, std::size_t j) const {
    return d_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  /// Skips validation. The caller guarantees the distance-matrix invariants.
  static DistanceMatrix unchecked(Eigen::MatrixXd distances, Metric metric);

 private:
  struct Unchecked {};
  DistanceMatrix(Eigen::MatrixXd distances, Metric metric, Unchecked);

  Eigen::MatrixXd d_;
  Metric metric_;
};

struct CorrelationValue {
  double value = 0.0;
  StatKind kind = StatKind::dcorr;
  /// Neighborhood scale (k, l), 1-based, reported by MGC only.
  std::optional<std::pair<std::size_t, std::size_t>> scale;
};

/// Throws InputError unless m >= 2 and all entries are finite.
void validate_samples(const SampleMatrix& samples);

/// Euclidean distances between the rows of `samples`.
DistanceMatrix pairwise_distances(const SampleMatrix& samples);

/// Label distances: 1{y_i != y_j} (discrete) or |y_i - y_j| (euclidean).
DistanceMatrix pairwise_distances(std::span<const int> labels, Metric metric);

/// C = D - rowmean - colmean + grandmean.
Eigen::MatrixXd double_center(const DistanceMatrix& distances);

/// Centered distances together with their own squared distance variance,
/// so one side of a statistic can be reused across many calls.
struct CenteredDistances {
  explicit CenteredDistances(const DistanceMatrix& distances);

  Eigen::MatrixXd centered;
  double self_dcov_sq;
};

/// V-statistic (1/m^2) sum C_x o C_y, clamped at zero.
double dcov_sq(const CenteredDistances& x, const CenteredDistances& y);
double dcov_sq(const DistanceMatrix& x, const DistanceMatrix& y);
double dcov_sq(const SampleMatrix& x, const SampleMatrix& y);

/// dcov^2(X,Y) / sqrt(dcov^2(X,X) dcov^2(Y,Y)); 0 when either side is
/// degenerate (self term <= 1e-14). Clamped to [0, 1].
CorrelationValue dcorr(const CenteredDistances& x, const CenteredDistances& y);
CorrelationValue dcorr(const DistanceMatrix& x, const DistanceMatrix& y);
CorrelationValue dcorr(const SampleMatrix& x, const SampleMatrix& y);

/// Multiscale generalized correlation (smoothed maximum of local
/// correlations). Requires m >= 4.
CorrelationValue mgc(const DistanceMatrix& x, const DistanceMatrix& y);

/// Full local correlation map; entry (k-1, l-1) holds c^{kl}.
Eigen::MatrixXd mgc_local_correlations(const DistanceMatrix& x, const DistanceMatrix& y);

/// One column per distinct label (ascending), 1 where the sample has it.
Eigen::MatrixXd one_hot(std::span<const int> labels);

CorrelationValue rv_coefficient(const SampleMatrix& x, const SampleMatrix& y);

/// Largest ridge-regularized canonical correlation.
CorrelationValue cca_corr(const SampleMatrix& x, const SampleMatrix& y);

}  // namespace vscreen
