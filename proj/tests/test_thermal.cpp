#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "petzkit/spinchain.hpp"
#include "petzkit/thermal.hpp"

using namespace petzkit;

namespace {

CDensity from(const CMatrix& m, std::vector<int> dims) {
  return CDensity(CHermitian(m), std::move(dims));
}

RDensity rdiag(std::initializer_list<double> d) {
  RMatrix m = RMatrix::Zero(d.size(), d.size());
  Index i = 0;
  for (double x : d) {
    m(i, i) = x;
    ++i;
  }
  return RDensity(RHermitian(m), {static_cast<int>(d.size())});
}

}  // namespace

TEST(Gibbs, InfiniteTemperatureIsMaximallyMixed) {
  const auto rho = gibbs_state(eigh(build_hamiltonian({4, 1, -0.5, 1.05})), 0.0, {2, 2, 2, 2});
  EXPECT_LE((rho.matrix() - RMatrix::Identity(16, 16) / 16.0).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Gibbs, SingleSpin) {
  RMatrix z(2, 2);
  z << 1, 0, 0, -1;
  const auto rho = gibbs_state(GibbsSpec<double>{RHermitian(z), 1.0}, {2});
  const double zsum = std::exp(-1.0) + std::exp(1.0);
  EXPECT_NEAR(rho.matrix()(0, 0), std::exp(-1.0) / zsum, 1e-15);
  EXPECT_NEAR(rho.matrix()(1, 1), std::exp(1.0) / zsum, 1e-15);
  EXPECT_NEAR(rho.matrix()(0, 1), 0.0, 1e-15);
}

TEST(Gibbs, LowTemperatureApproachesGroundProjector) {
  const auto s = eigh(build_hamiltonian({2, 1.0, 0.3, 0.6}));
  ASSERT_GT(s.values(1) - s.values(0), 0.1);
  const auto rho = gibbs_state(s, 1e3, {2, 2});
  const auto g = ground_state_projector(s, {2, 2});
  EXPECT_LE(norm(RMatrix(rho.matrix() - g.matrix()), NormKind::trace), 1e-6);
}

TEST(Gibbs, NegativeBetaRejected) {
  const auto s = eigh(build_hamiltonian({2, 1, 0, 1}));
  EXPECT_THROW(gibbs_state(s, -1.0, {2, 2}), DomainError);
}

TEST(Gibbs, ExtremeBetaStaysFinite) {
  const auto s = eigh(build_hamiltonian({3, 1, -0.5, 1.05}));
  const auto rho = gibbs_state(s, 1e6, {2, 2, 2});
  EXPECT_TRUE(rho.matrix().allFinite());
  EXPECT_NEAR(rho.trace(), 1.0, 1e-12);
}

TEST(Entropy, Examples) {
  EXPECT_NEAR(entropy(rdiag({1, 0})), 0.0, 1e-15);
  EXPECT_NEAR(entropy(rdiag({0.25, 0.25, 0.25, 0.25})), 2.0, 1e-14);
  EXPECT_NEAR(entropy(rdiag({0.75, 0.25})), 2.0 - 0.75 * std::log2(3.0), 1e-14);
  EXPECT_NEAR(entropy(rdiag({0.75, 0.25})), 0.81128, 1e-5);
}

TEST(Entropy, TraceDeviationRejected) {
  RMatrix m = RMatrix::Identity(2, 2) * 0.51;
  EXPECT_THROW(entropy(RDensity::trusted(RHermitian(m), {2})), NormalizationError);
}

TEST(Entropy, UnitarilyInvariant) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    const int d = 2 + t % 15;
    const CMatrix rho = oracle::random_density(d, rng, 1 + t % d);
    const CMatrix u = oracle::random_unitary(d, rng);
    EXPECT_NEAR(entropy(from(rho, {d})), entropy(from(u * rho * u.adjoint(), {d})), 1e-10);
  }
}

TEST(Cmi, MaximallyMixedIsZero) {
  const RDensity rho(RHermitian(RMatrix::Identity(32, 32) / 32.0), std::vector<int>(5, 2));
  for (const auto& p : {Partition::chain_default(5), Partition::chain(5, {0, 3}, {1}, {2, 4})}) {
    EXPECT_NEAR(cmi(rho, p), 0.0, 1e-12);
  }
}

TEST(Cmi, ProductOfRandomQubitsIsZero) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 10; ++t) {
    const CMatrix r = oracle::kron_all({oracle::random_density(2, rng), oracle::random_density(2, rng),
                                        oracle::random_density(2, rng)});
    EXPECT_NEAR(cmi(from(r, {2, 2, 2}), Partition::chain(3, {0}, {1}, {2})), 0.0, 1e-10);
  }
}

TEST(Cmi, GhzIsOneBit) {
  CMatrix psi = CMatrix::Zero(8, 1);
  psi(0) = psi(7) = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(cmi(from(psi * psi.adjoint(), {2, 2, 2}), Partition::chain(3, {0}, {1}, {2})), 1.0,
              1e-12);
}

TEST(Cmi, MatchesDirectContractionOracle) {
  std::mt19937_64 rng(3);
  const std::vector<Partition> parts{Partition::chain(3, {0}, {1}, {2}),
                                     Partition::chain(3, {2}, {0}, {1}),
                                     Partition::chain(3, {1}, {2}, {0})};
  for (int t = 0; t < 20; ++t) {
    const CMatrix r = oracle::random_density(8, rng, 1 + t % 8);
    for (const auto& p : parts) {
      const double want = oracle::cmi(r, {2, 2, 2}, p.a, p.b, p.c);
      EXPECT_NEAR(cmi(from(r, {2, 2, 2}), p), want, 1e-12);
    }
  }
}

TEST(Cmi, SymmetricUnderSwappingAandC) {
  std::mt19937_64 rng(4);
  const auto p = Partition::chain(5, {0, 4}, {1, 3}, {2});
  for (int t = 0; t < 5; ++t) {
    const auto rho = from(oracle::random_density(32, rng, 3), std::vector<int>(5, 2));
    EXPECT_NEAR(cmi(rho, p), cmi(rho, p.swapped_ac()), 1e-10);
  }
}

TEST(Cmi, StrongSubadditivityOnGibbsStates) {
  const ChainParams c{6, 1.0, -0.5, 1.05};
  const auto s = eigh(build_hamiltonian(c));
  for (double beta : {0.0, 0.1, 1.0, 10.0, 100.0}) {
    const auto rho = gibbs_state(s, beta, std::vector<int>(6, 2));
    EXPECT_GE(cmi(rho, Partition::chain_default(6)), -1e-9);
    EXPECT_GE(cmi(rho, Partition::chain(6, {0, 5}, {1, 4}, {2, 3})), -1e-9);
  }
}

TEST(Cmi, ZeroAtInfiniteTemperatureForAnyPartition) {
  const auto s = eigh(build_hamiltonian({6, 1.0, -0.5, 1.05}));
  const auto rho = gibbs_state(s, 0.0, std::vector<int>(6, 2));
  for (const auto& p : {Partition::chain_default(6), Partition::chain(6, {3}, {0, 5}, {1, 2, 4}),
                        Partition::chain(6, {1}, {2}, {0, 3, 4, 5})}) {
    EXPECT_LE(std::abs(cmi(rho, p)), 1e-10);
  }
}

TEST(Cmi, PartitionMismatchIsShapeError) {
  const RDensity rho(RHermitian(RMatrix::Identity(8, 8) / 8.0), {2, 2, 2});
  EXPECT_THROW(cmi(rho, Partition::chain_default(5)), ShapeError);
  EXPECT_THROW(cmi(rho, Partition::factors(2, 4, 1)), ShapeError);
}

TEST(Cmi, SizeFeaturesShareShape) {
  // CMI(beta) for L = 6, 8, 10 at the chaotic point: the smoothed discrete
  // derivative never turns negative and rises over the same stretch of the
  // grid, give or take one point.
  std::vector<double> betas;
  for (int i = 0; i < 16; ++i) betas.push_back(0.01 * std::pow(1e4, i / 15.0));
  std::vector<std::vector<int>> patterns;
  for (int L : {6, 8, 10}) {
    const auto s = eigh(build_hamiltonian({L, 1.0, -0.5, 1.05}));
    std::vector<double> v;
    for (double b : betas) v.push_back(cmi(gibbs_state(s, b, std::vector<int>(L, 2)),
                                           Partition::chain_default(L)));
    const double tol = 1e-2 * *std::max_element(v.begin(), v.end());
    std::vector<int> sign;
    for (std::size_t i = 2; i < v.size(); ++i) {
      const double d = 0.5 * (v[i] - v[i - 2]);
      sign.push_back(d > tol ? 1 : (d < -tol ? -1 : 0));
    }
    patterns.push_back(sign);
  }
  auto first = [](const std::vector<int>& s) { return std::find(s.begin(), s.end(), 1) - s.begin(); };
  auto last = [](const std::vector<int>& s) { return std::find(s.rbegin(), s.rend(), 1) - s.rbegin(); };
  for (const auto& p : patterns) {
    EXPECT_EQ(std::count(p.begin(), p.end(), -1), 0);
    EXPECT_LE(std::abs(first(p) - first(patterns[1])), 1);
    EXPECT_LE(std::abs(last(p) - last(patterns[1])), 1);
  }
}
