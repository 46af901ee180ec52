#pragma once

// Level statistics: gap ratios, polynomial unfolding, Wigner surmise and
// Kolmogorov-Smirnov distances.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "petzkit/errors.hpp"

namespace petzkit {

inline constexpr double kPoissonMeanRatio = 0.38629436111989061;  // 2 ln 2 - 1

/// Sorted eigenvalues and the fractional window of them that is analysed.
class SpectrumSample {
 public:
  SpectrumSample(std::vector<double> eigenvalues, double low = 0.25, double high = 0.75)
      : values_(std::move(eigenvalues)), low_(low), high_(high) {
    if (!(low >= 0.0 && high <= 1.0 && low < high)) {
      throw DomainError("spectral window must satisfy 0 <= low < high <= 1");
    }
    std::sort(values_.begin(), values_.end());
  }

  std::vector<double> retained() const {
    const auto n = values_.size();
    const auto lo = static_cast<std::size_t>(std::floor(low_ * n));
    const auto hi = static_cast<std::size_t>(std::floor(high_ * n));
    return {values_.begin() + lo, values_.begin() + hi};
  }

  const std::vector<double>& all() const noexcept { return values_; }
  double low() const noexcept { return low_; }
  double high() const noexcept { return high_; }

 private:
  std::vector<double> values_;
  double low_;
  double high_;
};

struct GapRatios {
  std::vector<double> ratios;
  double mean = 0.0;
  int skipped_degenerate = 0;
};

/// r_n = min(s_n, s_{n+1}) / max(s_n, s_{n+1}) over consecutive gaps.
inline GapRatios spacing_ratios(const SpectrumSample& sample) {
  const auto e = sample.retained();
  if (e.size() < 12) {
    std::ostringstream os;
    os << "gap ratios need at least 12 retained levels, got " << e.size();
    throw StatisticsError(os.str());
  }
  std::vector<double> gaps(e.size() - 1);
  for (std::size_t i = 0; i + 1 < e.size(); ++i) gaps[i] = e[i + 1] - e[i];
  double mean_gap = 0.0;
  for (double g : gaps) mean_gap += g;
  mean_gap /= static_cast<double>(gaps.size());
  const double tiny = 1e-12 * mean_gap;

  GapRatios out;
  for (std::size_t i = 0; i + 1 < gaps.size(); ++i) {
    const double a = gaps[i], b = gaps[i + 1];
    if (a < tiny && b < tiny) {
      ++out.skipped_degenerate;
      continue;
    }
    out.ratios.push_back(std::min(a, b) / std::max(a, b));
  }
  if (out.ratios.empty()) throw StatisticsError("every gap pair is degenerate");
  for (double r : out.ratios) out.mean += r;
  out.mean /= static_cast<double>(out.ratios.size());
  return out;
}

/// Fits the staircase N(E) on the retained window with a polynomial of the
/// given degree (least squares in a [-1, 1] rescaled variable) and returns
/// consecutive differences of the unfolded levels.
inline std::vector<double> unfolded_spacings(const SpectrumSample& sample,
                                             int poly_degree = 7,
                                             double max_condition = 1e12) {
  const auto e = sample.retained();
  if (e.size() < 50) {
    std::ostringstream os;
    os << "unfolding needs at least 50 retained levels, got " << e.size();
    throw StatisticsError(os.str());
  }
  if (poly_degree < 1) throw DomainError("polynomial degree must be >= 1");
  const auto n = static_cast<Eigen::Index>(e.size());
  const double lo = e.front(), hi = e.back();
  const double half = 0.5 * (hi - lo);
  if (!(half > 0.0)) throw StatisticsError("retained window has zero width");
  const double mid = 0.5 * (hi + lo);

  Eigen::MatrixXd a(n, poly_degree + 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = (e[i] - mid) / half;
    double p = 1.0;
    for (int k = 0; k <= poly_degree; ++k) {
      a(i, k) = p;
      p *= x;
    }
    y(i) = static_cast<double>(i);
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cond = sv(0) / sv(sv.size() - 1);
  if (!(cond < max_condition)) {
    std::ostringstream os;
    os << "unfolding fit is ill-conditioned (condition number " << cond << ")";
    throw FitError(os.str(), cond);
  }
  const Eigen::VectorXd coef = svd.solve(y);
  const Eigen::VectorXd unfolded = a * coef;
  std::vector<double> s(e.size() - 1);
  for (std::size_t i = 0; i + 1 < e.size(); ++i) s[i] = unfolded(i + 1) - unfolded(i);
  return s;
}

/// GOE Wigner surmise P(s) = (pi s / 2) exp(-pi s^2 / 4).
inline double wigner_surmise(double s) {
  if (s < 0.0) throw DomainError("spacing must be non-negative");
  using std::numbers::pi;
  return 0.5 * pi * s * std::exp(-0.25 * pi * s * s);
}

inline double wigner_cdf(double s) {
  return s <= 0.0 ? 0.0 : 1.0 - std::exp(-0.25 * std::numbers::pi * s * s);
}

inline double poisson_cdf(double s) { return s <= 0.0 ? 0.0 : 1.0 - std::exp(-s); }

/// sup |F_empirical - F| over the sample.
inline double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw StatisticsError("KS distance of an empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, std::abs(f - i / n), std::abs((i + 1) / n - f)});
  }
  return d;
}

struct Histogram {
  std::vector<double> edges;    ///< bins + 1 edges
  std::vector<double> density;  ///< normalized so that sum density * width = 1
};

inline Histogram histogram(const std::vector<double>& samples, int bins, double lo,
                           double hi) {
  if (bins < 1 || !(hi > lo)) throw DomainError("invalid histogram range");
  Histogram h;
  const double w = (hi - lo) / bins;
  for (int i = 0; i <= bins; ++i) h.edges.push_back(lo + i * w);
  std::vector<double> counts(bins, 0.0);
  for (double s : samples) {
    if (s < lo || s > hi) continue;
    const int k = std::min(bins - 1, static_cast<int>((s - lo) / w));
    counts[k] += 1.0;
  }
  const double total = static_cast<double>(samples.size());
  for (double c : counts) h.density.push_back(total > 0 ? c / (total * w) : 0.0);
  return h;
}

}  // namespace petzkit
