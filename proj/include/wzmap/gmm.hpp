#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <nlohmann/json_fwd.hpp>

#include "wzmap/error.hpp"

namespace wzmap {

template <typename Scalar>
using Points2 = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>;

template <typename Scalar>
struct GaussianComponent {
  using Vector = Eigen::Matrix<Scalar, 2, 1>;
  using Matrix = Eigen::Matrix<Scalar, 2, 2>;

  Scalar weight = Scalar(1);
  Vector mean = Vector::Zero();
  Matrix cov = Matrix::Identity();
};

template <typename Scalar>
struct GaussianMixture {
  std::vector<GaussianComponent<Scalar>> components;

  int size() const { return static_cast<int>(components.size()); }
  Scalar WeightSum() const {
    Scalar s(0);
    for (const auto& c : components) s += c.weight;
    return s;
  }
};

using Component = GaussianComponent<double>;
using Mixture = GaussianMixture<double>;

// Smallest admissible covariance eigenvalue; also the ridge added to every
// fitted covariance.
template <typename Scalar>
inline constexpr Scalar kCovarianceFloor = Scalar(1e-6);

struct EmOptions {
  double tol = 1e-6;  // absolute log-likelihood change
  int max_iter = 500;
  std::uint64_t seed = 0;
};

struct FitReport {
  int k = 0;
  long n = 0;
  // Log-likelihood of the initial guess followed by one entry per M-step.
  std::vector<double> log_likelihood_trace;
  int iterations = 0;
  bool converged = false;
  // The ridge makes the update inexact for a collapsing component, which can
  // lower the likelihood. EM then keeps the previous mixture and stops.
  bool stalled = false;
  double aic = 0.0;
  double bic = 0.0;
};

template <typename Scalar>
struct FitResult {
  GaussianMixture<Scalar> mixture;
  FitReport report;
};

struct ModelScore {
  int k = 0;
  double log_likelihood = 0.0;
  double aic = 0.0;
  double bic = 0.0;
};

template <typename Scalar>
struct Selection {
  int k_best = 0;
  GaussianMixture<Scalar> mixture;
  FitReport report;
  std::vector<ModelScore> table;
};

struct SamplingStats {
  long draws = 0;
  long accepted = 0;
};

// Means (2) + covariances (3) per component plus K - 1 free weights.
inline int FreeParameters(int k) { return 6 * k - 1; }
inline double Aic(double log_likelihood, int k) {
  return 2.0 * FreeParameters(k) - 2.0 * log_likelihood;
}
inline double Bic(double log_likelihood, int k, long n) {
  return FreeParameters(k) * std::log(static_cast<double>(n)) - 2.0 * log_likelihood;
}

// Chi-square quantile with two degrees of freedom: the CDF is 1 - exp(-x/2).
inline double ChiSquare2Quantile(double p) { return -2.0 * std::log1p(-p); }

namespace detail {

template <typename Scalar>
struct ComponentCache {
  Eigen::Matrix<Scalar, 2, 2> inv;
  Eigen::Matrix<Scalar, 2, 1> mean;
  Scalar log_norm;    // log of the Gaussian normaliser
  Scalar log_weight;  // -inf for zero weight
};

template <typename Scalar>
void CheckCovariance(const Eigen::Matrix<Scalar, 2, 2>& cov) {
  if (!cov.allFinite()) {
    throw Error(ErrorCode::kSingularCovariance, "covariance has non-finite entries");
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, 2, 2>> eig(
      cov, Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues()(0) >= kCovarianceFloor<Scalar> / 2)) {
    throw Error(ErrorCode::kSingularCovariance,
                "covariance eigenvalue below floor: " +
                    std::to_string(static_cast<double>(eig.eigenvalues()(0))));
  }
}

template <typename Scalar>
ComponentCache<Scalar> Prepare(const GaussianComponent<Scalar>& c) {
  CheckCovariance(c.cov);
  ComponentCache<Scalar> out;
  out.inv = c.cov.inverse();
  out.mean = c.mean;
  out.log_norm = -std::log(Scalar(2) * Scalar(EIGEN_PI)) -
                 Scalar(0.5) * std::log(c.cov.determinant());
  out.log_weight = c.weight > Scalar(0) ? std::log(c.weight)
                                        : -std::numeric_limits<Scalar>::infinity();
  return out;
}

template <typename Scalar>
std::vector<ComponentCache<Scalar>> Prepare(const GaussianMixture<Scalar>& mixture) {
  if (mixture.components.empty()) {
    throw Error(ErrorCode::kInvalidSpec, "mixture has no components");
  }
  std::vector<ComponentCache<Scalar>> out;
  out.reserve(mixture.components.size());
  for (const auto& c : mixture.components) out.push_back(Prepare(c));
  return out;
}

// N x K matrix of log(pi_k) + log N(x_n | mu_k, Sigma_k).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> LogJoint(
    const std::vector<ComponentCache<typename Derived::Scalar>>& caches,
    const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(x.rows(), caches.size());
  for (std::size_t k = 0; k < caches.size(); ++k) {
    const auto& c = caches[k];
    const auto dx = (x.col(0).array() - c.mean(0)).eval();
    const auto dy = (x.col(1).array() - c.mean(1)).eval();
    const auto d2 = c.inv(0, 0) * dx.square() + Scalar(2) * c.inv(0, 1) * dx * dy +
                    c.inv(1, 1) * dy.square();
    out.col(k) = (c.log_weight + c.log_norm - Scalar(0.5) * d2).matrix();
  }
  return out;
}

// Row-wise softmax: exp(m - max) normalised by its row sum. Subtracting the
// full log-sum-exp instead loses the low bits when the row values are large.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> SoftmaxRows(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const Scalar top = m.row(i).maxCoeff();
    out.row(i) = (m.row(i).array() - top).exp().matrix();
    out.row(i) /= out.row(i).sum();
  }
  return out;
}

// Row-wise log-sum-exp.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> LogSumExpRows(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m) {
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> top = m.rowwise().maxCoeff();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (!std::isfinite(top(i))) {
      out(i) = top(i);
      continue;
    }
    out(i) = top(i) + std::log((m.row(i).array() - top(i)).exp().sum());
  }
  return out;
}

template <typename Derived>
std::size_t CountDistinctRows(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  std::vector<std::pair<Scalar, Scalar>> rows(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) rows[i] = {x(i, 0), x(i, 1)};
  std::sort(rows.begin(), rows.end());
  return static_cast<std::size_t>(std::unique(rows.begin(), rows.end()) - rows.begin());
}

// k-means++ seeding: first centre uniform, then proportional to squared
// distance from the nearest chosen centre.
template <typename Scalar>
Points2<Scalar> KMeansPlusPlus(const Points2<Scalar>& x, int k, std::mt19937_64& rng) {
  const Eigen::Index n = x.rows();
  Points2<Scalar> centres(k, 2);
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  centres.row(0) = x.row(pick(rng));
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> d2 =
      (x.rowwise() - centres.row(0)).rowwise().squaredNorm();
  for (int j = 1; j < k; ++j) {
    const Scalar total = d2.sum();
    std::uniform_real_distribution<Scalar> u(Scalar(0), total);
    const Scalar target = u(rng);
    Scalar acc(0);
    Eigen::Index chosen = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (d2(i) <= Scalar(0)) continue;
      acc += d2(i);
      chosen = i;
      if (acc > target) break;
    }
    centres.row(j) = x.row(chosen);
    d2 = d2.cwiseMin((x.rowwise() - centres.row(j)).rowwise().squaredNorm());
  }
  return centres;
}

}  // namespace detail

template <typename Scalar>
Scalar MahalanobisSq(const GaussianComponent<Scalar>& c,
                     const Eigen::Matrix<Scalar, 2, 1>& x) {
  detail::CheckCovariance(c.cov);
  const Eigen::Matrix<Scalar, 2, 1> d = x - c.mean;
  return std::max(Scalar(0), d.dot(c.cov.llt().solve(d)));
}

template <typename Scalar>
Scalar LogPdf(const GaussianMixture<Scalar>& mixture,
              const Eigen::Matrix<Scalar, 2, 1>& x) {
  const auto caches = detail::Prepare(mixture);
  return detail::LogSumExpRows<Scalar>(detail::LogJoint(caches, x.transpose()))(0);
}

template <typename Scalar>
Scalar Pdf(const GaussianMixture<Scalar>& mixture, const Eigen::Matrix<Scalar, 2, 1>& x) {
  return std::exp(LogPdf(mixture, x));
}

// Per-point log densities.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> LogPdfRows(
    const GaussianMixture<typename Derived::Scalar>& mixture,
    const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const auto caches = detail::Prepare(mixture);
  return detail::LogSumExpRows<Scalar>(detail::LogJoint(caches, x));
}

template <typename Derived>
typename Derived::Scalar LogLikelihood(
    const GaussianMixture<typename Derived::Scalar>& mixture,
    const Eigen::MatrixBase<Derived>& x) {
  if (x.rows() == 0) throw Error(ErrorCode::kEmptyData, "log-likelihood of empty data");
  return LogPdfRows(mixture, x).sum();
}

// N x K responsibilities; every row sums to one.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> EStep(
    const GaussianMixture<typename Derived::Scalar>& mixture,
    const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const auto caches = detail::Prepare(mixture);
  return detail::SoftmaxRows<Scalar>(detail::LogJoint(caches, x));
}

template <typename Derived>
FitResult<typename Derived::Scalar> EmFit(const Eigen::MatrixBase<Derived>& data, int k,
                                          const EmOptions& options = {}) {
  using Scalar = typename Derived::Scalar;
  using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;
  using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  if (k < 1) throw Error(ErrorCode::kInvalidSpec, "k must be >= 1");
  const Eigen::Index n = data.rows();
  if (n == 0) throw Error(ErrorCode::kEmptyData, "cannot fit a mixture to no points");
  if (!data.allFinite()) throw Error(ErrorCode::kInvalidSpec, "data has non-finite points");
  if (detail::CountDistinctRows(data) < static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::kDegenerateData,
                "fewer distinct points than components (k=" + std::to_string(k) + ")");
  }

  // Work on centred data so the fit does not depend on where the origin is.
  const Eigen::Matrix<Scalar, 1, 2> offset = data.colwise().mean();
  const Points2<Scalar> x = data.rowwise() - offset;
  const Matrix2 ridge = kCovarianceFloor<Scalar> * Matrix2::Identity();
  const Matrix2 global_cov = (x.transpose() * x) / Scalar(n) + ridge;

  std::mt19937_64 rng(options.seed);
  const Points2<Scalar> seeds = detail::KMeansPlusPlus(x, k, rng);
  GaussianMixture<Scalar> mix;
  for (int j = 0; j < k; ++j) {
    GaussianComponent<Scalar> c;
    c.weight = Scalar(1) / Scalar(k);
    c.mean = seeds.row(j).transpose();
    c.cov = global_cov;
    mix.components.push_back(c);
  }

  FitReport report;
  report.k = k;
  report.n = static_cast<long>(n);
  GaussianMixture<Scalar> previous;
  while (true) {
    const auto caches = detail::Prepare(mix);
    MatrixX log_r = detail::LogJoint(caches, x);
    const VectorX lse = detail::LogSumExpRows<Scalar>(log_r);
    const double ll = static_cast<double>(lse.sum());
    if (!report.log_likelihood_trace.empty() && ll < report.log_likelihood_trace.back()) {
      mix = std::move(previous);
      --report.iterations;
      report.stalled = true;
      break;
    }
    report.log_likelihood_trace.push_back(ll);
    const auto& trace = report.log_likelihood_trace;
    if (trace.size() >= 2 && std::abs(trace.back() - trace[trace.size() - 2]) < options.tol) {
      report.converged = true;
      break;
    }
    if (report.iterations >= options.max_iter) break;

    previous = mix;
    const MatrixX r = detail::SoftmaxRows<Scalar>(log_r);
    const VectorX nk = r.colwise().sum().transpose();
    for (int j = 0; j < k; ++j) {
      auto& c = mix.components[j];
      c.weight = nk(j) / Scalar(n);
      // A component that lost all support keeps its previous shape.
      if (!(nk(j) > std::numeric_limits<Scalar>::min() * Scalar(1e6))) continue;
      c.mean = (x.transpose() * r.col(j)) / nk(j);
      const Points2<Scalar> d = x.rowwise() - c.mean.transpose();
      Matrix2 cov = (d.array().colwise() * r.col(j).array()).matrix().transpose() * d / nk(j);
      cov(0, 1) = cov(1, 0) = Scalar(0.5) * (cov(0, 1) + cov(1, 0));
      c.cov = cov + ridge;
    }
    const Scalar wsum = mix.WeightSum();
    for (auto& c : mix.components) c.weight /= wsum;
    ++report.iterations;
  }

  for (auto& c : mix.components) c.mean += offset.transpose();
  const double ll = report.log_likelihood_trace.back();
  report.aic = Aic(ll, k);
  report.bic = Bic(ll, k, report.n);
  return {std::move(mix), std::move(report)};
}

// Fits every K in [k_min, k_max] and keeps the lowest BIC (smaller K on ties).
template <typename Derived>
Selection<typename Derived::Scalar> SelectK(const Eigen::MatrixBase<Derived>& data,
                                            int k_min, int k_max,
                                            const EmOptions& options = {}) {
  if (k_min < 1 || k_max < k_min) {
    throw Error(ErrorCode::kInvalidSpec, "need 1 <= k_min <= k_max");
  }
  Selection<typename Derived::Scalar> best;
  for (int k = k_min; k <= k_max; ++k) {
    auto fit = EmFit(data, k, options);
    const double ll = fit.report.log_likelihood_trace.back();
    best.table.push_back({k, ll, fit.report.aic, fit.report.bic});
    if (best.k_best == 0 || fit.report.bic < best.report.bic) {
      best.k_best = k;
      best.mixture = std::move(fit.mixture);
      best.report = std::move(fit.report);
    }
  }
  return best;
}

// Draws component k ~ pi, then x ~ N(mu_k, Sigma_k), keeping only draws inside
// the `confidence` ellipse of their own component. Returns exactly n points.
template <typename Scalar>
Points2<Scalar> SampleGated(const GaussianMixture<Scalar>& mixture, long n,
                            double confidence, std::uint64_t seed,
                            SamplingStats* stats = nullptr) {
  if (n < 0) throw Error(ErrorCode::kInvalidSpec, "sample count must be >= 0");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw Error(ErrorCode::kInvalidSpec, "confidence must be in (0, 1)");
  }
  if (mixture.components.empty()) {
    throw Error(ErrorCode::kInvalidSpec, "mixture has no components");
  }
  const Scalar gate = static_cast<Scalar>(ChiSquare2Quantile(confidence));
  std::vector<Eigen::Matrix<Scalar, 2, 2>> chol;
  std::vector<double> weights;
  for (const auto& c : mixture.components) {
    detail::CheckCovariance(c.cov);
    chol.push_back(c.cov.llt().matrixL());
    weights.push_back(static_cast<double>(std::max(c.weight, Scalar(0))));
  }

  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> pick(weights.begin(), weights.end());
  std::normal_distribution<Scalar> normal(Scalar(0), Scalar(1));
  Points2<Scalar> out(n, 2);
  SamplingStats local;
  for (long i = 0; i < n;) {
    const int k = pick(rng);
    const auto& c = mixture.components[k];
    Eigen::Matrix<Scalar, 2, 1> z;
    z(0) = normal(rng);
    z(1) = normal(rng);
    const Eigen::Matrix<Scalar, 2, 1> p = c.mean + chol[k] * z;
    ++local.draws;
    if (MahalanobisSq(c, p) > gate) continue;
    ++local.accepted;
    out.row(i++) = p.transpose();
  }
  if (stats != nullptr) *stats = local;
  return out;
}

// JSON: list of {weight, mean: [x, y], cov: [[a, b], [b, c]]}.
void to_json(nlohmann::json& j, const Mixture& mixture);
void from_json(const nlohmann::json& j, Mixture& mixture);
void to_json(nlohmann::json& j, const FitReport& report);
void from_json(const nlohmann::json& j, FitReport& report);
void to_json(nlohmann::json& j, const ModelScore& score);

}  // namespace wzmap
