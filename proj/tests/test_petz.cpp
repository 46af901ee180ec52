#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "petzkit/petz.hpp"
#include "petzkit/spinchain.hpp"

using namespace petzkit;

namespace {

CDensity from(const CMatrix& m, std::vector<int> dims) {
  return CDensity(CHermitian(m), std::move(dims));
}

/// Brute-force Petz map on A|B|C = sites 0|1|2 of a three-qubit state,
/// assembled with Kronecker products and the oracle partial trace.
CMatrix oracle_petz(const CMatrix& rho) {
  const std::vector<int> dims{2, 2, 2};
  const CMatrix ab = oracle::partial_trace(rho, dims, {0, 1});
  const CMatrix bc = oracle::partial_trace(rho, dims, {1, 2});
  const CMatrix b = oracle::partial_trace(rho, dims, {1});
  auto power = [](const CMatrix& m, double p) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
    Eigen::VectorXcd f(m.rows());
    for (Index i = 0; i < m.rows(); ++i) f(i) = std::pow(es.eigenvalues()(i), p);
    return CMatrix(es.eigenvectors() * f.asDiagonal() * es.eigenvectors().adjoint());
  };
  const CMatrix bi = oracle::kron_all({oracle::eye(2), power(b, -0.5), oracle::eye(2)});
  const CMatrix bcs = oracle::kron(oracle::eye(2), power(bc, 0.5));
  return bcs * bi * oracle::kron(ab, oracle::eye(2)) * bi * bcs;
}

CMatrix markov_chain_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 0.95);
  const double pa = u(rng);
  const double pb[2] = {u(rng), u(rng)};   // P(b=0 | a)
  const double pc[2] = {u(rng), u(rng)};   // P(c=0 | b)
  CMatrix rho = CMatrix::Zero(8, 8);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        const double p = (a ? 1 - pa : pa) * (b ? 1 - pb[a] : pb[a]) * (c ? 1 - pc[b] : pc[b]);
        rho(4 * a + 2 * b + c, 4 * a + 2 * b + c) = p;
      }
  return rho;
}

}  // namespace

TEST(Petz, MatchesKroneckerOracle) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 10; ++t) {
    const CMatrix r = oracle::random_density(8, rng);
    const auto rec = petz_recover(from(r, {2, 2, 2}), Partition::chain(3, {0}, {1}, {2}));
    EXPECT_LE((rec.matrix() - oracle_petz(r)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Petz, ProductStateIsRecoveredExactly) {
  std::mt19937_64 rng(2);
  const CMatrix r = oracle::kron_all(
      {oracle::random_density(2, rng), oracle::random_density(2, rng), oracle::random_density(2, rng)});
  const auto rho = from(r, {2, 2, 2});
  const auto rec = petz_recover(rho, Partition::chain(3, {0}, {1}, {2}));
  EXPECT_LE(norm(CMatrix(rec.matrix() - r), NormKind::trace), 1e-10);

  const auto rep = recovery_report(rho, Partition::chain(3, {0}, {1}, {2}));
  EXPECT_LE(rep.trace_distance, 1e-10);
  EXPECT_GE(rep.fr_bound_margin, -1e-12);
  EXPECT_GE(rep.figbound_margin, -1e-12);
}

TEST(Petz, ClassicalMarkovChainIsRecovered) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    const auto rho = from(markov_chain_state(rng), {2, 2, 2});
    const auto p = Partition::chain(3, {0}, {1}, {2});
    ASSERT_LE(cmi(rho, p), 1e-10);
    EXPECT_GE(root_fidelity(rho.op(), petz_recover(rho, p).op()), 1.0 - 1e-9);
  }
}

TEST(Petz, LambdaIndependentAtMarkovPoints) {
  std::mt19937_64 rng(4);
  const CMatrix r = oracle::kron_all(
      {oracle::random_density(2, rng), oracle::random_density(4, rng), oracle::random_density(2, rng)});
  const auto rho = from(r, {2, 2, 2, 2});
  const auto p = Partition::chain(4, {0}, {1, 2}, {3});
  const CMatrix base = petz_recover(rho, p, 0.0).matrix();
  for (double l : {-1.0, 1.0}) {
    EXPECT_LE((petz_recover(rho, p, l).matrix() - base).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Petz, RecoveredKeepsAAndBcMarginals) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 5; ++t) {
    const auto rho = from(oracle::random_density(16, rng), {2, 2, 2, 2});
    const auto p = Partition::chain(4, {0, 3}, {1}, {2});
    const auto rec = petz_recover(rho, p, t * 0.5);
    for (const std::vector<int>& keep : {std::vector<int>{0, 3}, std::vector<int>{1, 2}}) {
      const CMatrix diff = partial_trace(rec, keep).matrix() - partial_trace(rho, keep).matrix();
      EXPECT_LE(norm(diff, NormKind::trace), 1e-9);
    }
  }
}

TEST(Petz, OutputKeepsInputSiteOrder) {
  // Interleaved blocks: the recovered state must be expressed in the original
  // site order, so tracing it equals tracing the brute-force result after the
  // block reordering.
  std::mt19937_64 rng(6);
  const CMatrix r = oracle::random_density(8, rng);
  const auto p = Partition::chain(3, {1}, {2}, {0});  // A = site 1, B = 2, C = 0
  const auto rec = petz_recover(from(r, {2, 2, 2}), p);
  // Reorder to A|B|C = (1, 2, 0), recover by oracle, reorder back.
  const CMatrix u = oracle::swap_network({2, 2, 2}, {1, 2, 0});
  const CMatrix want = u.adjoint() * oracle_petz(u * r * u.adjoint()) * u;
  EXPECT_LE((rec.matrix() - want).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Petz, EmptyBIsPartitionError) {
  const auto rho = from(CMatrix::Identity(4, 4) / 4.0, {2, 2});
  Partition p{{2, 2}, {0}, {}, {1}, {}};
  EXPECT_THROW(petz_recover(rho, p), PartitionError);
}

TEST(Petz, EmptyAOrCIsAllowed) {
  std::mt19937_64 rng(7);
  const auto rho = from(oracle::random_density(8, rng), {2, 2, 2});
  const Partition no_c{{2, 2, 2}, {0}, {1, 2}, {}, {}};
  // With C empty the map is the identity on rho_AB = rho.
  EXPECT_LE((petz_recover(rho, no_c).matrix() - rho.matrix()).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(cmi(rho, no_c), 0.0, 1e-10);
}

TEST(Petz, RankDeficientBIsFlagged) {
  // B pure: rho = rho_A (x) |0><0| (x) rho_C.
  std::mt19937_64 rng(8);
  CMatrix zero = CMatrix::Zero(2, 2);
  zero(0, 0) = 1.0;
  const CMatrix r =
      oracle::kron_all({oracle::random_density(2, rng), zero, oracle::random_density(2, rng)});
  const auto rep = recovery_report(from(r, {2, 2, 2}), Partition::chain(3, {0}, {1}, {2}));
  EXPECT_TRUE(rep.b_rank_deficient);
  EXPECT_NEAR(rep.fidelity, 1.0, 1e-9);
  EXPECT_NEAR(rep.recovered_trace, 1.0, 1e-10);
}

TEST(RecoveryReport, InfiniteTemperature) {
  const auto s = eigh(build_hamiltonian({6, 1.0, -0.5, 1.05}));
  const auto rho = gibbs_state(s, 0.0, std::vector<int>(6, 2));
  for (const auto& p : {Partition::chain_default(6), Partition::chain(6, {5}, {0, 2}, {1, 3, 4})}) {
    const auto r = recovery_report(rho, p);
    EXPECT_LE(r.cmi, 1e-10);
    EXPECT_NEAR(r.fidelity, 1.0, 1e-10);
    EXPECT_LE(r.opnorm_distance, 1e-12);
    EXPECT_NEAR(r.fr_bound_margin, 0.0, 1e-10);
    EXPECT_NEAR(r.figbound_margin, 0.0, 1e-10);
  }
}

TEST(RecoveryReport, BoundsHoldOnRandomStates) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 30; ++t) {
    const auto rho = from(oracle::random_density(16, rng, 1 + t % 16), {2, 2, 2, 2});
    const auto r = recovery_report(rho, Partition::chain(4, {0}, {1, 2}, {3}));
    EXPECT_GE(r.fr_bound_margin, -1e-8) << t;
    EXPECT_GE(r.figbound_margin, -1e-8) << t;
  }
}

TEST(RecoveryReport, OpnormBoundFunction) {
  EXPECT_EQ(opnorm_cmi_bound(0.0), 0.0);
  EXPECT_NEAR(opnorm_cmi_bound(1.0), -2.0 * std::log2(0.75), 1e-15);
}
