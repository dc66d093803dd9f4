#include "vscreen/corr.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vscreen/errors.hpp"

namespace vscreen {

namespace {

constexpr double kDegenerate = 1e-14;

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

void require_same_count(Eigen::Index a, Eigen::Index b) {
  if (a != b) {
    throw InputError("sample count mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

Eigen::MatrixXd column_centered(const SampleMatrix& x) {
  return x.rowwise() - x.colwise().mean();
}

}  // namespace

std::string_view to_string(StatKind kind) {
  switch (kind) {
    case StatKind::dcorr: return "dcorr";
    case StatKind::mgc: return "mgc";
    case StatKind::rv: return "rv";
    case StatKind::cca: return "cca";
  }
  return "unknown";
}

std::string_view to_string(Metric metric) {
  return metric == Metric::euclidean ? "euclidean" : "discrete";
}

StatKind parse_stat_kind(std::string_view text) {
  if (text == "dcorr") return StatKind::dcorr;
  if (text == "mgc") return StatKind::mgc;
  if (text == "rv") return StatKind::rv;
  if (text == "cca") return StatKind::cca;
  throw InputError("unknown statistic '" + std::string(text) + "'");
}

DistanceMatrix::DistanceMatrix(Eigen::MatrixXd distances, Metric metric, Unchecked)
    : d_(std::move(distances)), metric_(metric) {}

DistanceMatrix DistanceMatrix::unchecked(Eigen::MatrixXd distances, Metric metric) {
  return DistanceMatrix(std::move(distances), metric, Unchecked{});
}

DistanceMatrix::DistanceMatrix(Eigen::MatrixXd distances, Metric metric)
    : d_(std::move(distances)), metric_(metric) {
  const Eigen::Index m = d_.rows();
  if (m != d_.cols()) throw InputError("distance matrix must be square");
  if (m < 2) throw InputError("distance matrix needs at least 2 samples");
  for (Eigen::Index j = 0; j < m; ++j) {
    if (d_(j, j) != 0.0) throw InputError("distance matrix diagonal must be zero");
    for (Eigen::Index i = j + 1; i < m; ++i) {
      const double a = d_(i, j);
      if (!std::isfinite(a) || a < 0.0) {
        throw InputError("distance entries must be finite and nonnegative");
      }
      if (a != d_(j, i)) throw InputError("distance matrix must be symmetric");
    }
  }
}

void validate_samples(const SampleMatrix& samples) {
  if (samples.rows() < 2) throw InputError("need at least 2 samples");
  if (!samples.allFinite()) throw InputError("samples contain non-finite entries");
}

DistanceMatrix pairwise_distances(const SampleMatrix& samples) {
  validate_samples(samples);
  const Eigen::Index m = samples.rows();
  const RowMajor x = samples;
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double v = (x.row(i) - x.row(j)).norm();
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return DistanceMatrix::unchecked(std::move(d), Metric::euclidean);
}

DistanceMatrix pairwise_distances(std::span<const int> labels, Metric metric) {
  const auto m = static_cast<Eigen::Index>(labels.size());
  if (m < 2) throw InputError("need at least 2 labels");
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const int a = labels[static_cast<std::size_t>(i)];
      const int b = labels[static_cast<std::size_t>(j)];
      const double v = metric == Metric::discrete ? (a != b ? 1.0 : 0.0)
                                                  : std::abs(static_cast<double>(a) - b);
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return DistanceMatrix::unchecked(std::move(d), metric);
}

Eigen::MatrixXd double_center(const DistanceMatrix& distances) {
  const Eigen::MatrixXd& d = distances.matrix();
  const Eigen::VectorXd row_mean = d.rowwise().mean();
  const Eigen::RowVectorXd col_mean = d.colwise().mean();
  const double grand = d.mean();
  Eigen::MatrixXd c = d;
  c.colwise() -= row_mean;
  c.rowwise() -= col_mean;
  c.array() += grand;
  return c;
}

namespace {

double hadamard_mean(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  // Fixed-order reduction so swapping the arguments is bit-identical.
  const Eigen::Index total = a.size();
  const double* pa = a.data();
  const double* pb = b.data();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < total; ++i) sum += pa[i] * pb[i];
  return sum / static_cast<double>(total);
}

}  // namespace

CenteredDistances::CenteredDistances(const DistanceMatrix& distances)
    : centered(double_center(distances)),
      self_dcov_sq(std::max(0.0, hadamard_mean(centered, centered))) {}

double dcov_sq(const CenteredDistances& x, const CenteredDistances& y) {
  require_same_count(x.centered.rows(), y.centered.rows());
  return std::max(0.0, hadamard_mean(x.centered, y.centered));
}

double dcov_sq(const DistanceMatrix& x, const DistanceMatrix& y) {
  require_same_count(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(y.size()));
  return dcov_sq(CenteredDistances(x), CenteredDistances(y));
}

double dcov_sq(const SampleMatrix& x, const SampleMatrix& y) {
  require_same_count(x.rows(), y.rows());
  return dcov_sq(pairwise_distances(x), pairwise_distances(y));
}

CorrelationValue dcorr(const CenteredDistances& x, const CenteredDistances& y) {
  const double cross = dcov_sq(x, y);
  CorrelationValue out{0.0, StatKind::dcorr, std::nullopt};
  if (x.self_dcov_sq <= kDegenerate || y.self_dcov_sq <= kDegenerate) return out;
  out.value = clamp_unit(cross / std::sqrt(x.self_dcov_sq * y.self_dcov_sq));
  return out;
}

CorrelationValue dcorr(const DistanceMatrix& x, const DistanceMatrix& y) {
  require_same_count(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(y.size()));
  return dcorr(CenteredDistances(x), CenteredDistances(y));
}

CorrelationValue dcorr(const SampleMatrix& x, const SampleMatrix& y) {
  require_same_count(x.rows(), y.rows());
  return dcorr(pairwise_distances(x), pairwise_distances(y));
}

Eigen::MatrixXd one_hot(std::span<const int> labels) {
  std::vector<int> classes(labels.begin(), labels.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(labels.size()),
                                            static_cast<Eigen::Index>(classes.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto col = std::lower_bound(classes.begin(), classes.end(), labels[i]) - classes.begin();
    y(static_cast<Eigen::Index>(i), col) = 1.0;
  }
  return y;
}

namespace {

// Gram matrix of the smaller side; its squared Frobenius norm equals
// trace(S^2) up to the 1/m^2 factor either way.
Eigen::MatrixXd small_gram(const Eigen::MatrixXd& centered) {
  if (centered.cols() <= centered.rows()) return centered.transpose() * centered;
  return centered * centered.transpose();
}

}  // namespace

CorrelationValue rv_coefficient(const SampleMatrix& x, const SampleMatrix& y) {
  require_same_count(x.rows(), y.rows());
  validate_samples(x);
  validate_samples(y);
  const double m = static_cast<double>(x.rows());
  const Eigen::MatrixXd xc = column_centered(x);
  const Eigen::MatrixXd yc = column_centered(y);

  const double sxy = (xc.transpose() * yc).squaredNorm() / (m * m);
  const double sxx = small_gram(xc).squaredNorm() / (m * m);
  const double syy = small_gram(yc).squaredNorm() / (m * m);

  CorrelationValue out{0.0, StatKind::rv, std::nullopt};
  if (std::sqrt(sxx) <= kDegenerate || std::sqrt(syy) <= kDegenerate) return out;
  out.value = clamp_unit(sxy / std::sqrt(sxx * syy));
  return out;
}

CorrelationValue cca_corr(const SampleMatrix& x, const SampleMatrix& y) {
  require_same_count(x.rows(), y.rows());
  validate_samples(x);
  validate_samples(y);
  const Eigen::Index m = x.rows();
  const double md = static_cast<double>(m);
  const Eigen::MatrixXd xc = column_centered(x);
  const Eigen::MatrixXd yc = column_centered(y);
  CorrelationValue out{0.0, StatKind::cca, std::nullopt};

  const double trace_xx = xc.squaredNorm() / md;
  const double trace_yy = yc.squaredNorm() / md;
  if (trace_xx <= kDegenerate || trace_yy <= kDegenerate) return out;
  const double ridge_x = 1e-8 * trace_xx / static_cast<double>(x.cols());
  const double ridge_y = 1e-8 * trace_yy / static_cast<double>(y.cols());

  // q x q matrix Syx (Sxx + ridge I)^-1 Sxy. When d > m the push-through
  // identity moves the solve into the m x m Gram space.
  Eigen::MatrixXd inner;
  if (x.cols() <= m) {
    Eigen::MatrixXd sxx = xc.transpose() * xc / md;
    sxx.diagonal().array() += ridge_x;
    const Eigen::MatrixXd sxy = xc.transpose() * yc / md;
    inner = sxy.transpose() * sxx.llt().solve(sxy);
  } else {
    const Eigen::MatrixXd gram = xc * xc.transpose();
    Eigen::MatrixXd reg = gram / md;
    reg.diagonal().array() += ridge_x;
    const Eigen::MatrixXd solved = reg.llt().solve(yc);
    inner = (gram * yc).transpose() * solved / (md * md);
  }
  inner = 0.5 * (inner + inner.transpose()).eval();

  Eigen::MatrixXd syy = yc.transpose() * yc / md;
  syy.diagonal().array() += ridge_y;
  const Eigen::LLT<Eigen::MatrixXd> ly(syy);
  const Eigen::MatrixXd lower = ly.matrixL();
  // L^-1 inner L^-T has the squared canonical correlations as eigenvalues.
  const Eigen::MatrixXd left = lower.triangularView<Eigen::Lower>().solve(inner);
  Eigen::MatrixXd whitened =
      lower.triangularView<Eigen::Lower>().solve(left.transpose()).transpose();
  whitened = 0.5 * (whitened + whitened.transpose()).eval();

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(whitened, Eigen::EigenvaluesOnly);
  const double top = eig.eigenvalues().maxCoeff();
  out.value = clamp_unit(std::sqrt(std::max(0.0, top)));
  if (!std::isfinite(out.value)) out.value = 0.0;
  return out;
}

}  // namespace vscreen
