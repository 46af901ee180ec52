#pragma once

// Random band model H = O I + D R, R real symmetric tridiagonal with unit
// variance Gaussian entries, on a d = dA dB dC factorization (factor 0 most
// significant). Second-order entropy expansion around the maximally mixed
// state and the resulting perturbative CMI, against exact diagonalization.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "petzkit/petz.hpp"

namespace petzkit {

struct BandModel {
  int d_a = 2;
  int d_b = 2;
  int d_c = 2;
  double offset = 0.0;
  double strength = 1e-3;
  double beta = 1.0;
  std::uint64_t seed = 0;

  int dim() const { return d_a * d_b * d_c; }
  Partition partition() const { return Partition::factors(d_a, d_b, d_c); }
};

/// Diagonal entries are drawn first, then the super-diagonal; the
/// sub-diagonal mirrors it.
inline RHermitian sample_band_matrix(int d, std::uint64_t seed) {
  if (d < 2) throw DomainError("band matrix needs d >= 2");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  RMatrix r = RMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) r(i, i) = g(rng);
  for (int i = 0; i + 1 < d; ++i) {
    r(i, i + 1) = g(rng);
    r(i + 1, i) = r(i, i + 1);
  }
  return RHermitian::trusted(std::move(r));
}

inline RHermitian band_hamiltonian(const RHermitian& r, const BandModel& model) {
  const Index d = r.dim();
  return RHermitian::trusted(model.offset * RMatrix::Identity(d, d) +
                             model.strength * r.matrix());
}

/// rho_1 = -(beta/d) (R - tr(R)/d I).
inline RHermitian first_order_term(const RHermitian& r, const BandModel& model) {
  const Index d = r.dim();
  if (d != model.dim()) throw ShapeError("band matrix dimension differs from dA dB dC");
  const double mean = r.matrix().trace() / static_cast<double>(d);
  return RHermitian::trusted(-(model.beta / static_cast<double>(d)) *
                             (r.matrix() - mean * RMatrix::Identity(d, d)));
}

struct PerturbativeEntropy {
  double bits = 0.0;
  bool valid = true;  ///< ||D dim_X rho_1||_op < 1
};

/// log2(dim) - (D^2/2) dim tr(rho_1^2) / ln 2.
inline PerturbativeEntropy perturbative_entropy(const RHermitian& rho1, Index dim_x,
                                                double strength) {
  if (rho1.dim() != dim_x) throw ShapeError("marginal dimension differs from dim_X");
  PerturbativeEntropy e;
  const double dx = static_cast<double>(dim_x);
  e.valid = std::abs(strength) * dx * norm(rho1, NormKind::op) < 1.0;
  const double tr2 = rho1.matrix().squaredNorm();
  e.bits = std::log2(dx) - 0.5 * strength * strength * dx * tr2 / std::log(2.0);
  return e;
}

struct PerturbativeCmi {
  double bits = 0.0;            ///< general second-order marginal form
  double paper_formula_bits = 0.0;  ///< literal R-expressed closed form, comparison only
  bool valid = true;
};

namespace detail {

inline RMatrix factor_marginal(const RMatrix& m, const std::vector<int>& dims,
                               std::vector<int> keep) {
  return trace_to(m, dims, keep);
}

}  // namespace detail

/// I = (D^2/2)[dB tr rho1_B^2 + d tr rho1^2 - dAB tr rho1_AB^2 - dBC tr rho1_BC^2],
/// converted to bits.
inline PerturbativeCmi perturbative_cmi(const RHermitian& r, const BandModel& model) {
  const RHermitian rho1 = first_order_term(r, model);
  const std::vector<int> dims{model.d_a, model.d_b, model.d_c};
  const double d = model.dim();
  const double d_b = model.d_b;
  const double d_ab = model.d_a * model.d_b;
  const double d_bc = model.d_b * model.d_c;
  auto tr2 = [&](const RMatrix& m, std::vector<int> keep) {
    return detail::factor_marginal(m, dims, std::move(keep)).squaredNorm();
  };
  const RMatrix& x = rho1.matrix();
  const double s = 0.5 * model.strength * model.strength / std::log(2.0);

  PerturbativeCmi out;
  out.bits = s * (d_b * tr2(x, {1}) + d * x.squaredNorm() - d_ab * tr2(x, {0, 1}) -
                  d_bc * tr2(x, {1, 2}));

  const RMatrix& rm = r.matrix();
  const double pre = model.beta * model.beta / (d * d);
  out.paper_formula_bits = s * pre *
                           (d_b * tr2(rm, {1}) + d_b * d * rm.squaredNorm() -
                            d_ab * tr2(rm, {0, 1}) - d_bc * tr2(rm, {1, 2}));

  for (const auto& [keep, dx] :
       std::vector<std::pair<std::vector<int>, double>>{{{1}, d_b}, {{0, 1, 2}, d},
                                                        {{0, 1}, d_ab}, {{1, 2}, d_bc}}) {
    const RHermitian marg = RHermitian::trusted(detail::factor_marginal(x, dims, keep));
    if (std::abs(model.strength) * dx * norm(marg, NormKind::op) >= 1.0) out.valid = false;
  }
  return out;
}

inline RDensity band_gibbs_state(const RHermitian& r, const BandModel& model) {
  return gibbs_state(eigh(band_hamiltonian(r, model)), model.beta,
                     {model.d_a, model.d_b, model.d_c});
}

inline double exact_band_cmi(const RHermitian& r, const BandModel& model) {
  return cmi(band_gibbs_state(r, model), model.partition());
}

struct ConvergenceRow {
  double strength = 0.0;
  double exact_cmi = 0.0;
  double perturbative_cmi = 0.0;
  double abs_error = 0.0;
  bool valid = true;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double slope = 0.0;  ///< least-squares slope of log(error) vs log(D), D > 0
};

namespace detail {

inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  if (lx.size() < 2) return 0.0;
  const double n = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace detail

inline ConvergenceTable perturbation_convergence(const BandModel& model,
                                                 const std::vector<double>& strengths) {
  for (std::size_t i = 1; i < strengths.size(); ++i) {
    if (strengths[i] > strengths[i - 1]) {
      throw DomainError("perturbation_convergence expects descending strengths");
    }
  }
  const RHermitian r = sample_band_matrix(model.dim(), model.seed);
  ConvergenceTable t;
  std::vector<double> xs, ys;
  for (double strength : strengths) {
    BandModel m = model;
    m.strength = strength;
    const auto pert = perturbative_cmi(r, m);
    ConvergenceRow row{strength, exact_band_cmi(r, m), pert.bits, 0.0, pert.valid};
    row.abs_error = std::abs(row.exact_cmi - row.perturbative_cmi);
    t.rows.push_back(row);
    xs.push_back(strength);
    ys.push_back(row.abs_error);
  }
  t.slope = detail::loglog_slope(xs, ys);
  return t;
}

/// Seed-averaged errors over seeds model.seed, model.seed + 1, ...
inline ConvergenceTable averaged_convergence(const BandModel& model,
                                             const std::vector<double>& strengths,
                                             int n_seeds) {
  ConvergenceTable avg;
  for (double s : strengths) avg.rows.push_back({s, 0.0, 0.0, 0.0, true});
  for (int k = 0; k < n_seeds; ++k) {
    BandModel m = model;
    m.seed = model.seed + static_cast<std::uint64_t>(k);
    const auto t = perturbation_convergence(m, strengths);
    for (std::size_t i = 0; i < strengths.size(); ++i) {
      avg.rows[i].exact_cmi += t.rows[i].exact_cmi / n_seeds;
      avg.rows[i].perturbative_cmi += t.rows[i].perturbative_cmi / n_seeds;
      avg.rows[i].abs_error += t.rows[i].abs_error / n_seeds;
      avg.rows[i].valid = avg.rows[i].valid && t.rows[i].valid;
    }
  }
  std::vector<double> xs, ys;
  for (const auto& r : avg.rows) {
    xs.push_back(r.strength);
    ys.push_back(r.abs_error);
  }
  avg.slope = detail::loglog_slope(xs, ys);
  return avg;
}

}  // namespace petzkit
