#pragma once

// Executable checks of the recovery lemmas: data processing under channels,
// pairs of unitary channels, observable expectation gaps and the
// high-temperature effective-Hamiltonian comparison.
//
// Asserted trace-norm bounds use eps_safe = 2 sqrt(1 - 2^{-I}), which follows
// from F >= 2^{-I/2} and ||rho - sigma||_1 <= 2 sqrt(1 - F^2). The weaker
// expression sqrt(4 (1 - 2^{-I/2})) is carried along as `eps_reported` for
// comparison only.

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "petzkit/petz.hpp"

namespace petzkit {

inline constexpr double kBoundSlack = 1e-8;

inline double eps_safe(double cmi_bits) {
  return 2.0 * std::sqrt(std::max(0.0, 1.0 - std::exp2(-cmi_bits)));
}

inline double eps_reported(double cmi_bits) {
  return std::sqrt(std::max(0.0, 4.0 * (1.0 - std::exp2(-0.5 * cmi_bits))));
}

/// CPTP map in Kraus form, sum_i K_i^H K_i = I.
class QuantumChannel {
 public:
  explicit QuantumChannel(std::vector<CMatrix> kraus, double tol = 1e-10)
      : kraus_(std::move(kraus)) {
    if (kraus_.empty()) throw ValidationError("channel needs at least one Kraus operator");
    const Index din = kraus_.front().cols();
    const Index dout = kraus_.front().rows();
    CMatrix acc = CMatrix::Zero(din, din);
    for (const auto& k : kraus_) {
      if (k.cols() != din || k.rows() != dout) {
        throw ShapeError("Kraus operators must share one shape");
      }
      acc += k.adjoint() * k;
    }
    const double dev = (acc - CMatrix::Identity(din, din)).norm();
    if (dev > tol) {
      std::ostringstream os;
      os << "Kraus set is not trace preserving: ||sum K^H K - I||_F = " << dev;
      throw ValidationError(os.str());
    }
  }

  Index input_dim() const { return kraus_.front().cols(); }
  Index output_dim() const { return kraus_.front().rows(); }
  const std::vector<CMatrix>& kraus() const noexcept { return kraus_; }

  static QuantumChannel identity(Index d) { return QuantumChannel({CMatrix::Identity(d, d)}); }

  static QuantumChannel unitary(const CMatrix& u) { return QuantumChannel({u}); }

  /// rho -> (1 - p) rho + p tr(rho) I/d, Kraus set {sqrt(1-p) I, sqrt(p/d) |i><j|}.
  static QuantumChannel depolarizing(Index d, double p) {
    if (p < 0.0 || p > 1.0) throw DomainError("depolarizing probability outside [0,1]");
    std::vector<CMatrix> ks;
    if (p < 1.0) ks.push_back(std::sqrt(1.0 - p) * CMatrix::Identity(d, d));
    const double w = std::sqrt(p / static_cast<double>(d));
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) {
        CMatrix k = CMatrix::Zero(d, d);
        k(i, j) = w;
        ks.push_back(std::move(k));
      }
    return QuantumChannel(std::move(ks));
  }

  /// Single-qubit depolarizing channel with Pauli Kraus operators, acting on
  /// `site` of a register with local dimensions `dims`.
  static QuantumChannel local_depolarizing(std::span<const int> dims, int site, double p) {
    if (dims[site] != 2) throw ShapeError("local_depolarizing acts on a qubit");
    CMatrix x(2, 2), y(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    y << 0, cplx(0, -1), cplx(0, 1), 0;
    z << 1, 0, 0, -1;
    const std::vector<int> support{site};
    std::vector<CMatrix> ks;
    ks.push_back(embed(CMatrix(std::sqrt(1.0 - 0.75 * p) * CMatrix::Identity(2, 2)), dims, support));
    for (const CMatrix* s : {&x, &y, &z}) {
      ks.push_back(embed(CMatrix(std::sqrt(p / 4.0) * *s), dims, support));
    }
    return QuantumChannel(std::move(ks));
  }

  /// Random channel from a Haar-like isometry d -> d * n_kraus.
  template <class Rng>
  static QuantumChannel random(Index d, int n_kraus, Rng& rng) {
    std::normal_distribution<double> g;
    CMatrix m(d * n_kraus, d);
    for (Index j = 0; j < m.cols(); ++j)
      for (Index i = 0; i < m.rows(); ++i) m(i, j) = cplx(g(rng), g(rng));
    Eigen::HouseholderQR<CMatrix> qr(m);
    const CMatrix iso = qr.householderQ() * CMatrix::Identity(m.rows(), d);
    std::vector<CMatrix> ks;
    for (int k = 0; k < n_kraus; ++k) ks.push_back(iso.middleRows(k * d, d));
    return QuantumChannel(std::move(ks));
  }

 private:
  std::vector<CMatrix> kraus_;
};

/// sum_i K_i rho K_i^H. Site structure is kept when the dimension is.
template <class Scalar>
CDensity apply_channel(const QuantumChannel& ch, const DensityMatrix<Scalar>& rho) {
  if (ch.input_dim() != rho.dim()) throw ShapeError("channel input dimension mismatch");
  const CMatrix r = rho.matrix().template cast<cplx>();
  CMatrix out = CMatrix::Zero(ch.output_dim(), ch.output_dim());
  for (const auto& k : ch.kraus()) out.noalias() += k * r * k.adjoint();
  auto h = CHermitian::trusted(std::move(out));
  if (ch.output_dim() == rho.dim()) {
    return CDensity::trusted(std::move(h), {rho.dims().begin(), rho.dims().end()},
                             {rho.labels().begin(), rho.labels().end()});
  }
  return CDensity::trusted(std::move(h), {static_cast<int>(ch.output_dim())});
}

struct Lemma1Check {
  double cmi = 0.0;
  double fidelity = 0.0;        ///< F(N(rho), N(rho~))
  double fidelity_bound = 0.0;  ///< 2^{-I/2}
  double fidelity_margin = 0.0;
  double trace_distance = 0.0;  ///< ||N(rho) - N(rho~)||_1
  double eps_safe = 0.0;
  double eps_reported = 0.0;
  double trace_margin = 0.0;  ///< eps_safe - trace_distance
  bool holds() const {
    return fidelity_margin >= -kBoundSlack && trace_margin >= -kBoundSlack;
  }
};

template <class Scalar>
Lemma1Check check_lemma1(const DensityMatrix<Scalar>& rho, const Partition& p,
                         const QuantumChannel& ch) {
  const auto m = tripartite_marginals(rho, p);
  const CDensity rec = petz_recover_from(m, 0.0, rho.labels()).state;
  const CDensity n_rho = apply_channel(ch, rho);
  const CDensity n_rec = apply_channel(ch, rec);

  Lemma1Check c;
  c.cmi = cmi(m);
  c.fidelity = root_fidelity(n_rho.op(), n_rec.op());
  c.fidelity_bound = std::exp2(-0.5 * c.cmi);
  c.fidelity_margin = c.fidelity - c.fidelity_bound;
  c.trace_distance = norm(CHermitian::trusted(n_rho.matrix() - n_rec.matrix()), NormKind::trace);
  c.eps_safe = eps_safe(c.cmi);
  c.eps_reported = eps_reported(c.cmi);
  c.trace_margin = c.eps_safe - c.trace_distance;
  return c;
}

inline void require_unitary(const CMatrix& u, const char* name) {
  if (u.rows() != u.cols()) throw ValidationError(std::string(name) + " is not square");
  const double dev = (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).norm();
  if (dev > 1e-10) {
    std::ostringstream os;
    os << name << " is not unitary: ||U^H U - I||_F = " << dev;
    throw ValidationError(os.str());
  }
}

struct Lemma2Check {
  double cmi = 0.0;
  double lhs = 0.0;      ///< ||U1 rho U1^H - U2 rho~ U2^H||_1
  double delta_upper = 0.0;  ///< 2 ||U1 - U2||_op >= diamond distance
  double eps_safe = 0.0;
  double eps_reported = 0.0;
  double margin = 0.0;  ///< eps_safe + delta_upper - lhs
  bool holds() const { return margin >= -kBoundSlack; }
};

template <class Scalar>
Lemma2Check check_lemma2(const DensityMatrix<Scalar>& rho, const Partition& p,
                         const CMatrix& u1, const CMatrix& u2) {
  require_unitary(u1, "u1");
  require_unitary(u2, "u2");
  if (u1.rows() != rho.dim() || u2.rows() != rho.dim()) {
    throw ShapeError("unitaries must act on the full space");
  }
  const auto m = tripartite_marginals(rho, p);
  const CDensity rec = petz_recover_from(m, 0.0, rho.labels()).state;
  const CMatrix r = rho.matrix().template cast<cplx>();
  const CMatrix d = u1 * r * u1.adjoint() - u2 * rec.matrix() * u2.adjoint();

  Lemma2Check c;
  c.cmi = cmi(m);
  c.lhs = norm(CHermitian::trusted(d), NormKind::trace);
  c.delta_upper = 2.0 * norm(u1 - u2, NormKind::op);
  c.eps_safe = eps_safe(c.cmi);
  c.eps_reported = eps_reported(c.cmi);
  c.margin = c.eps_safe + c.delta_upper - c.lhs;
  return c;
}

struct Lemma3Check {
  double cmi = 0.0;
  double lhs = 0.0;    ///< ||O (rho - rho~)||_1
  double bound = 0.0;  ///< ||O||_op eps_safe
  double bound_reported = 0.0;
  double expectation_gap = 0.0;  ///< |tr O rho - tr O rho~|
  double margin = 0.0;
  bool holds() const {
    return margin >= -kBoundSlack && expectation_gap <= bound + kBoundSlack;
  }
};

template <class Scalar, class ObsScalar>
Lemma3Check check_lemma3(const DensityMatrix<Scalar>& rho, const Partition& p,
                         const Hermitian<ObsScalar>& obs) {
  if (obs.dim() != rho.dim()) throw ShapeError("observable must act on the full space");
  const auto m = tripartite_marginals(rho, p);
  const CDensity rec = petz_recover_from(m, 0.0, rho.labels()).state;
  const CMatrix o = obs.matrix().template cast<cplx>();
  const CMatrix delta = rho.matrix().template cast<cplx>() - rec.matrix();

  Lemma3Check c;
  c.cmi = cmi(m);
  c.lhs = norm(o * delta, NormKind::trace);
  const double o_op = norm(obs, NormKind::op);
  c.bound = o_op * eps_safe(c.cmi);
  c.bound_reported = o_op * eps_reported(c.cmi);
  c.expectation_gap = std::abs((o * delta).trace());
  c.margin = c.bound - c.lhs;
  return c;
}

struct Lemma4Check {
  double beta = 0.0;
  double cmi = 0.0;
  double hamiltonian_gap = 0.0;  ///< ||H~ - H_eff||_1, both traceless
  double delta = 0.0;            ///< sqrt(1 - ||rho - rho~||_1^2 / 4)
  double bound = 0.0;            ///< delta / beta
  bool holds = false;
  bool first_order_regime = true;  ///< beta <= 0.1
};

namespace detail {

inline CMatrix traceless(const CMatrix& m) {
  const Index d = m.rows();
  return m - (m.trace() / static_cast<double>(d)) * CMatrix::Identity(d, d);
}

}  // namespace detail

/// Diagnostic: compares -log(rho~)/beta with -log(rho)/beta after removing
/// the trace parts, against delta/beta. Reported, never asserted.
template <class Scalar>
Lemma4Check check_lemma4(const Hermitian<Scalar>& h, const Partition& p, double beta) {
  if (!(beta > 0.0)) throw DomainError("check_lemma4: beta must be positive");
  const auto rho = gibbs_state(eigh(h), beta, p.local_dims);
  const auto m = tripartite_marginals(rho, p);
  const CDensity rec = petz_recover_from(m, 0.0, rho.labels()).state;
  const CHermitian rho_c = rho.op().template cast<cplx>();

  const CMatrix h_eff = detail::traceless(-support_log(eigh(rho_c)).matrix() / beta);
  const CMatrix h_rec = detail::traceless(-support_log(eigh(rec.op())).matrix() / beta);

  Lemma4Check c;
  c.beta = beta;
  c.first_order_regime = beta <= 0.1;
  c.cmi = cmi(m);
  c.hamiltonian_gap = norm(CHermitian::trusted(h_rec - h_eff), NormKind::trace);
  const double tn = norm(CHermitian::trusted(rho_c.matrix() - rec.matrix()), NormKind::trace);
  c.delta = std::sqrt(std::max(0.0, 1.0 - 0.25 * tn * tn));
  c.bound = c.delta / beta;
  c.holds = c.hamiltonian_gap <= c.bound;
  return c;
}

}  // namespace petzkit
