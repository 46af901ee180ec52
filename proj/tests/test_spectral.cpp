#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "petzkit/spectral.hpp"
#include "petzkit/spinchain.hpp"

using namespace petzkit;

namespace {

std::vector<double> ladder(int n, double step = 0.5) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = -3.0 + step * i;
  return v;
}

std::vector<double> goe_levels(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) a(i, j) = g(rng);
  const Eigen::MatrixXd s = (a + a.transpose()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().data(), es.eigenvalues().data() + d};
}

}  // namespace

TEST(GapRatios, RigidSpectrum) {
  const auto r = spacing_ratios(SpectrumSample(ladder(100), 0.0, 1.0));
  for (double x : r.ratios) EXPECT_NEAR(x, 1.0, 1e-12);
  EXPECT_NEAR(r.mean, 1.0, 1e-12);
}

TEST(GapRatios, GoeSamplingOracle) {
  std::mt19937_64 rng(11);
  double sum = 0.0;
  std::size_t n = 0;
  for (int t = 0; t < 8; ++t) {
    const auto r = spacing_ratios(SpectrumSample(goe_levels(1000, rng)));
    sum += r.mean * r.ratios.size();
    n += r.ratios.size();
  }
  EXPECT_NEAR(sum / n, 0.531, 0.01);
}

TEST(GapRatios, PoissonLevels) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(40000);
  for (double& x : v) x = u(rng);
  EXPECT_NEAR(spacing_ratios(SpectrumSample(v, 0.0, 1.0)).mean, kPoissonMeanRatio, 0.01);
  EXPECT_NEAR(kPoissonMeanRatio, 2.0 * std::log(2.0) - 1.0, 1e-16);
}

TEST(GapRatios, DegeneratePairsSkipped) {
  auto v = ladder(40);
  v.insert(v.end(), {100.0, 100.0, 100.0});
  const auto r = spacing_ratios(SpectrumSample(v, 0.0, 1.0));
  EXPECT_EQ(r.skipped_degenerate, 1);
  for (double x : r.ratios) EXPECT_TRUE(std::isfinite(x));
}

TEST(GapRatios, TooFewLevels) {
  EXPECT_THROW(spacing_ratios(SpectrumSample(ladder(20))), StatisticsError);
  EXPECT_THROW(SpectrumSample(ladder(30), 0.6, 0.4), DomainError);
}

TEST(Unfolding, EquallySpaced) {
  for (int degree : {1, 3, 7}) {
    const SpectrumSample s(ladder(400, 0.01));
    const auto sp = unfolded_spacings(s, degree);
    EXPECT_EQ(sp.size(), s.retained().size() - 1);
    for (double x : sp) EXPECT_NEAR(x, 1.0, 1e-6);
  }
}

TEST(Unfolding, ChaoticSectorHasUnitMeanSpacing) {
  const auto block = sector_hamiltonian({12, 1.0, -0.5, 1.05}, Sector::even);
  const VectorXd ev = eigvalsh(block);
  const auto sp = unfolded_spacings(SpectrumSample({ev.data(), ev.data() + ev.size()}));
  double mean = 0.0;
  for (double x : sp) mean += x;
  mean /= sp.size();
  EXPECT_NEAR(mean, 1.0, 0.01);
}

TEST(Unfolding, Errors) {
  EXPECT_THROW(unfolded_spacings(SpectrumSample(ladder(80))), StatisticsError);
  try {
    unfolded_spacings(SpectrumSample(ladder(400, 0.01)), 40, 1e12);
    FAIL();
  } catch (const FitError& e) {
    EXPECT_GE(e.condition(), 1e12);
  }
}

TEST(Wigner, Values) {
  EXPECT_EQ(wigner_surmise(0.0), 0.0);
  EXPECT_NEAR(wigner_surmise(1.0), 0.5 * std::numbers::pi * std::exp(-0.25 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(wigner_surmise(1.0), 0.716186, 1e-6);
  EXPECT_THROW(wigner_surmise(-0.1), DomainError);
}

TEST(Wigner, NormalizedByQuadrature) {
  // Composite Simpson on [0, 12]; the tail beyond is below 1e-40.
  const int n = 24000;
  const double h = 12.0 / n;
  double acc = wigner_surmise(0.0) + wigner_surmise(12.0);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * wigner_surmise(i * h);
  EXPECT_NEAR(acc * h / 3.0, 1.0, 1e-6);
  EXPECT_NEAR(wigner_cdf(12.0), 1.0, 1e-12);
}

TEST(Ks, MatchesKnownSamples) {
  EXPECT_NEAR(ks_distance({0.5}, [](double s) { return s; }), 0.5, 1e-15);
  std::mt19937_64 rng(13);
  std::exponential_distribution<double> e(1.0);
  std::vector<double> v(20000);
  for (double& x : v) x = e(rng);
  EXPECT_LT(ks_distance(v, poisson_cdf), 0.015);
  EXPECT_GT(ks_distance(v, wigner_cdf), 0.1);
  EXPECT_THROW(ks_distance({}, poisson_cdf), StatisticsError);
}

TEST(Histogram, DensityIntegratesToInRangeFraction) {
  const auto h = histogram({0.1, 0.2, 0.9, 1.5, 5.0}, 4, 0.0, 2.0);
  ASSERT_EQ(h.edges.size(), 5u);
  double mass = 0.0;
  for (double d : h.density) mass += d * 0.5;
  EXPECT_NEAR(mass, 0.8, 1e-15);
  EXPECT_THROW(histogram({}, 0, 0.0, 1.0), DomainError);
}
