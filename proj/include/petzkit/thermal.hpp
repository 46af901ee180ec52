#pragma once

// Gibbs states, von Neumann entropies (bits) and conditional mutual
// information I(A:C|B) = S(AB) + S(BC) - S(ABC) - S(B).

#include <cmath>
#include <sstream>
#include <vector>

#include "petzkit/hilbert.hpp"

namespace petzkit {

template <class Scalar>
struct GibbsSpec {
  Hermitian<Scalar> hamiltonian;
  double beta = 0.0;
};

/// exp(-beta (H - E0)) / tr(...) from a precomputed spectrum of H. The shift
/// by the ground energy E0 cancels in the quotient and keeps the largest
/// weight at exactly 1.
template <class Scalar>
DensityMatrix<Scalar> gibbs_state(const Spectrum<Scalar>& h, double beta,
                                  std::vector<int> dims) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw DomainError("inverse temperature must be finite and non-negative");
  }
  const double e0 = h.values(0);
  VectorXd w(h.dim());
  for (Index i = 0; i < h.dim(); ++i) w(i) = std::exp(-beta * (h.values(i) - e0));
  w /= w.sum();
  return DensityMatrix<Scalar>::trusted(
      Hermitian<Scalar>::trusted(h.vectors * w.template cast<Scalar>().asDiagonal() *
                                 h.vectors.adjoint()),
      std::move(dims));
}

template <class Scalar>
DensityMatrix<Scalar> gibbs_state(const GibbsSpec<Scalar>& spec, std::vector<int> dims) {
  if (!(spec.beta >= 0.0)) throw DomainError("inverse temperature must be non-negative");
  return gibbs_state(eigh(spec.hamiltonian), spec.beta, std::move(dims));
}

/// Normalized projector onto the ground space (the beta -> infinity limit).
template <class Scalar>
DensityMatrix<Scalar> ground_state_projector(const Spectrum<Scalar>& h,
                                             std::vector<int> dims,
                                             double degeneracy_tol = 1e-9) {
  Index g = 1;
  while (g < h.dim() && h.values(g) - h.values(0) <= degeneracy_tol) ++g;
  const auto v = h.vectors.leftCols(g);
  return DensityMatrix<Scalar>::trusted(
      Hermitian<Scalar>::trusted(v * v.adjoint() / static_cast<double>(g)),
      std::move(dims));
}

/// -sum p log2 p over eigenvalues above the support cutoff.
inline double entropy_bits(const VectorXd& eigenvalues,
                           double cutoff = kSupportCutoff) {
  const double thr = support_threshold(eigenvalues, cutoff);
  double s = 0.0;
  for (Index i = 0; i < eigenvalues.size(); ++i) {
    const double p = eigenvalues(i);
    if (p > thr) s -= p * std::log2(p);
  }
  return s;
}

template <class Scalar>
double entropy(const DensityMatrix<Scalar>& rho) {
  const double tr = rho.trace();
  if (std::abs(tr - 1.0) > 1e-8) {
    std::ostringstream os;
    os << "entropy: trace " << tr << " differs from 1";
    throw NormalizationError(os.str());
  }
  return entropy_bits(eigvalsh(rho.op()));
}

/// The four marginals entering the CMI and the Petz map. `abc` is the full
/// state relabelled into block order A|B|C (original site labels retained).
template <class Scalar>
struct TripartiteMarginals {
  DensityMatrix<Scalar> abc;
  DensityMatrix<Scalar> ab;
  DensityMatrix<Scalar> bc;
  DensityMatrix<Scalar> b;
  Index d_a = 1;
  Index d_b = 1;
  Index d_c = 1;
};

namespace detail {

inline std::vector<int> concat(std::initializer_list<const std::vector<int>*> parts) {
  std::vector<int> out;
  for (const auto* p : parts) out.insert(out.end(), p->begin(), p->end());
  return out;
}

template <class Scalar>
void require_matching(const DensityMatrix<Scalar>& rho, const Partition& p) {
  p.validate();
  if (p.n_sites() != rho.n_sites()) {
    throw ShapeError("partition site count differs from the state's");
  }
  // Partition dims are listed in the original labelling.
  for (int s = 0; s < p.n_sites(); ++s) {
    const int pos = rho.position_of(s);
    if (pos < 0) throw ShapeError("partition refers to a site the state lacks");
    if (rho.dims()[pos] != p.local_dims[s]) {
      throw ShapeError("partition local dimension differs from the state's");
    }
  }
}

}  // namespace detail

template <class Scalar>
TripartiteMarginals<Scalar> tripartite_marginals(const DensityMatrix<Scalar>& rho,
                                                 const Partition& p) {
  detail::require_matching(rho, p);
  const auto a = p.a_sites();
  const auto b = p.b_sites();
  const auto c = p.c_sites();
  auto block_dim = [&](const std::vector<int>& sites) {
    Index d = 1;
    for (int s : sites) d *= p.local_dims[s];
    return d;
  };
  auto take = [&](const std::vector<int>& sites) {
    if (sites.empty()) {
      return DensityMatrix<Scalar>::trusted(
          Hermitian<Scalar>::trusted(Matrix<Scalar>::Ones(1, 1)), {1}, {-1});
    }
    return partial_trace(rho, sites);
  };
  auto abc = take(detail::concat({&a, &b, &c}));
  auto ab = take(detail::concat({&a, &b}));
  auto bc = take(detail::concat({&b, &c}));
  auto bm = take(b);
  return {std::move(abc), std::move(ab), std::move(bc), std::move(bm),
          block_dim(a),   block_dim(b),  block_dim(c)};
}

/// Entropies of the empty subsystem are 0, so empty blocks are allowed.
template <class Scalar>
double cmi(const TripartiteMarginals<Scalar>& m) {
  auto s = [](const DensityMatrix<Scalar>& r) {
    return r.dim() == 1 ? 0.0 : entropy(r);
  };
  const double i = s(m.ab) + s(m.bc) - s(m.abc) - s(m.b);
  return (i < 0.0 && i >= -1e-9) ? 0.0 : i;
}

template <class Scalar>
double cmi(const DensityMatrix<Scalar>& rho, const Partition& p) {
  return cmi(tripartite_marginals(rho, p));
}

}  // namespace petzkit
