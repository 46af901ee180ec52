#pragma once

// Rotated Petz recovery map R_{B->BC} applied to rho_AB,
//
//   R(X) = rho_BC^{1/2 - i l/2} (rho_B^{-1/2 + i l/2} X rho_B^{-1/2 - i l/2} (x) I_C)
//          rho_BC^{1/2 + i l/2},
//
// and the recovery-quality report around it.

#include <cmath>
#include <vector>

#include "petzkit/thermal.hpp"

namespace petzkit {

struct RecoveryReport {
  double cmi = 0.0;              ///< I(A:C|B) in bits
  double fidelity = 1.0;         ///< root fidelity F(rho, rho~)
  double trace_distance = 0.0;   ///< ||rho - rho~||_1 (no factor 1/2)
  double opnorm_distance = 0.0;  ///< ||rho - rho~||_inf
  double fr_bound_margin = 0.0;  ///< F - 2^{-cmi/2}
  double figbound_margin = 0.0;  ///< cmi + 2 log2(1 - opnorm_distance^2 / 4)
  double recovered_trace = 1.0;
  double lambda = 0.0;
  bool b_rank_deficient = false;
  double b_off_support_weight = 0.0;  ///< rho_B eigenvalue mass dropped by the cutoff
};

/// -2 log2(1 - d^2/4): lower bound on the CMI from the operator-norm distance.
inline double opnorm_cmi_bound(double opnorm_distance) {
  return -2.0 * std::log2(1.0 - 0.25 * opnorm_distance * opnorm_distance);
}

struct Recovery {
  CDensity state;  ///< rho~ in the input's site order
  bool b_rank_deficient = false;
  double b_off_support_weight = 0.0;
};

template <class Scalar>
Recovery petz_recover_from(const TripartiteMarginals<Scalar>& m, double lambda,
                           std::span<const int> output_order,
                           double cutoff = kSupportCutoff) {
  if (m.d_b == 1 && m.b.labels()[0] == -1) {
    throw PartitionError("Petz recovery needs a non-empty B block");
  }
  const Spectrum<Scalar> sb = eigh(m.b.op());
  const Spectrum<Scalar> sbc = eigh(m.bc.op());
  const double thr = support_threshold(sb.values, cutoff);

  Recovery out{CDensity::trusted(CHermitian::trusted(CMatrix::Ones(1, 1)), {1}), false, 0.0};
  for (Index i = 0; i < sb.dim(); ++i) {
    if (sb.values(i) <= thr) {
      out.b_rank_deficient = true;
      out.b_off_support_weight += std::max(sb.values(i), 0.0);
    }
  }

  const cplx half_l{0.0, 0.5 * lambda};
  const CMatrix b_left = support_power(sb, -0.5 + half_l, cutoff);
  const CMatrix bc_left = support_power(sbc, 0.5 - half_l, cutoff);

  // Block dims: A as one factor, B as one factor, C as one factor.
  const std::vector<int> ab_dims{static_cast<int>(m.d_a), static_cast<int>(m.d_b)};
  const std::vector<int> abc_dims{static_cast<int>(m.d_a), static_cast<int>(m.d_b),
                                  static_cast<int>(m.d_c)};
  const CMatrix b_on_ab = embed(b_left, ab_dims, {1});
  const CMatrix bc_on_abc = embed(bc_left, abc_dims, {1, 2});

  const CMatrix x = b_on_ab * m.ab.matrix().template cast<cplx>() * b_on_ab.adjoint();
  const CMatrix x_c = embed(x, abc_dims, {0, 1});
  CMatrix rec = bc_on_abc * x_c * bc_on_abc.adjoint();

  // Back from block order A|B|C to the requested site order.
  std::vector<int> site_dims(m.abc.dims().begin(), m.abc.dims().end());
  auto block = CDensity::trusted(CHermitian::trusted(std::move(rec)), site_dims,
                                 {m.abc.labels().begin(), m.abc.labels().end()});
  out.state = partial_trace(block, output_order);
  return out;
}

/// (id_A (x) R^{lambda}_{B->BC})(rho_AB), returned in rho's site order.
template <class Scalar>
CDensity petz_recover(const DensityMatrix<Scalar>& rho, const Partition& p,
                      double lambda = 0.0) {
  return petz_recover_from(tripartite_marginals(rho, p), lambda, rho.labels()).state;
}

template <class Scalar>
RecoveryReport recovery_report(const DensityMatrix<Scalar>& rho, const Partition& p,
                               double lambda = 0.0) {
  const auto m = tripartite_marginals(rho, p);
  const Recovery rec = petz_recover_from(m, lambda, rho.labels());

  RecoveryReport r;
  r.lambda = lambda;
  r.cmi = cmi(m);
  r.b_rank_deficient = rec.b_rank_deficient;
  r.b_off_support_weight = rec.b_off_support_weight;
  r.recovered_trace = rec.state.trace();

  const CHermitian original = rho.op().template cast<cplx>();
  const CHermitian diff = CHermitian::trusted(original.matrix() - rec.state.matrix());
  const VectorXd ev = eigvalsh(diff);
  r.trace_distance = ev.cwiseAbs().sum();
  r.opnorm_distance = ev.cwiseAbs().maxCoeff();
  r.fidelity = root_fidelity(original, rec.state.op());
  r.fr_bound_margin = r.fidelity - std::exp2(-0.5 * r.cmi);
  r.figbound_margin = r.cmi - opnorm_cmi_bound(r.opnorm_distance);
  return r;
}

}  // namespace petzkit
