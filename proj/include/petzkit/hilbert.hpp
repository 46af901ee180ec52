#pragma once

// Tensor-product bookkeeping.
//
// Index convention: a global basis index is the mixed-radix number whose
// digits are the local indices, with position 0 the most significant digit.
// Every operation here (partial trace, embedding, permutation) and every
// module above it shares this convention.

#include <algorithm>
#include <functional>
#include <numeric>
#include <span>
#include <sstream>
#include <vector>

#include "petzkit/linops.hpp"

namespace petzkit {

namespace detail {

inline Index product(std::span<const int> dims) {
  Index p = 1;
  for (int d : dims) p *= d;
  return p;
}

/// Offsets into the global index for every multi-index over `positions`,
/// enumerated with positions[0] as the most significant digit.
inline std::vector<Index> offsets(std::span<const int> dims,
                                  std::span<const int> positions) {
  const int n = static_cast<int>(dims.size());
  std::vector<Index> stride(n, 1);
  for (int p = n - 2; p >= 0; --p) stride[p] = stride[p + 1] * dims[p + 1];

  std::vector<Index> out{0};
  for (int pos : positions) {
    std::vector<Index> next;
    next.reserve(out.size() * dims[pos]);
    for (Index base : out)
      for (int digit = 0; digit < dims[pos]; ++digit)
        next.push_back(base + digit * stride[pos]);
    out = std::move(next);
  }
  return out;
}

inline std::vector<int> complement(int n, std::span<const int> positions) {
  std::vector<bool> used(n, false);
  for (int p : positions) used[p] = true;
  std::vector<int> rest;
  for (int p = 0; p < n; ++p)
    if (!used[p]) rest.push_back(p);
  return rest;
}

inline void require_valid_dims(std::span<const int> dims) {
  if (dims.empty()) throw ShapeError("at least one site is required");
  for (int d : dims)
    if (d < 1) throw ShapeError("local dimensions must be positive");
}

inline void require_bijection(std::span<const int> perm, int n) {
  if (static_cast<int>(perm.size()) != n) {
    throw ValidationError("permutation length does not match the site count");
  }
  std::vector<bool> seen(n, false);
  for (int p : perm) {
    if (p < 0 || p >= n || seen[p]) {
      throw ValidationError("permutation is not a bijection on the sites");
    }
    seen[p] = true;
  }
}

}  // namespace detail

inline std::vector<int> identity_permutation(int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

inline std::vector<int> inverse_permutation(std::span<const int> perm) {
  std::vector<int> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = static_cast<int>(i);
  return inv;
}

/// Unit-trace positive semidefinite operator on labelled sites.
///
/// Position p of the tensor factorization carries local dimension dims()[p]
/// and site label labels()[p]. Fresh states are labelled 0..n-1; a partial
/// trace keeps the labels of the retained sites.
template <class Scalar>
class DensityMatrix {
 public:
  DensityMatrix(Hermitian<Scalar> m, std::vector<int> dims,
                std::vector<int> labels = {})
      : DensityMatrix(std::move(m), std::move(dims), std::move(labels), true) {}

  /// Skips the trace and positivity checks. Used where the construction
  /// guarantees both up to rounding, or where the trace is reported rather
  /// than required (Petz output on a rank-deficient marginal).
  static DensityMatrix trusted(Hermitian<Scalar> m, std::vector<int> dims,
                               std::vector<int> labels = {}) {
    return DensityMatrix(std::move(m), std::move(dims), std::move(labels), false);
  }

  const Hermitian<Scalar>& op() const noexcept { return m_; }
  const Matrix<Scalar>& matrix() const noexcept { return m_.matrix(); }
  std::span<const int> dims() const noexcept { return dims_; }
  std::span<const int> labels() const noexcept { return labels_; }
  int n_sites() const noexcept { return static_cast<int>(dims_.size()); }
  Index dim() const noexcept { return m_.dim(); }
  double trace() const { return std::real(m_.matrix().trace()); }

  /// Position of a site label, or -1.
  int position_of(int label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    return it == labels_.end() ? -1 : static_cast<int>(it - labels_.begin());
  }

  template <class T>
  DensityMatrix<T> cast() const {
    return DensityMatrix<T>::trusted(m_.template cast<T>(), dims_, labels_);
  }

 private:
  DensityMatrix(Hermitian<Scalar> m, std::vector<int> dims,
                std::vector<int> labels, bool check)
      : m_(std::move(m)), dims_(std::move(dims)), labels_(std::move(labels)) {
    detail::require_valid_dims(dims_);
    if (detail::product(dims_) != m_.dim()) {
      throw ShapeError("product of local dimensions differs from matrix dimension");
    }
    if (labels_.empty()) labels_ = identity_permutation(n_sites());
    if (static_cast<int>(labels_.size()) != n_sites()) {
      throw ShapeError("one label per site is required");
    }
    auto sorted = labels_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ValidationError("site labels must be unique");
    }
    if (!check) return;
    const double tr = trace();
    if (std::abs(tr - 1.0) > 1e-10) {
      std::ostringstream os;
      os << "density matrix trace " << tr << " differs from 1";
      throw NormalizationError(os.str());
    }
    detail::require_positive(eigvalsh(m_), "density matrix");
  }

  Hermitian<Scalar> m_;
  std::vector<int> dims_;
  std::vector<int> labels_;
};

using RDensity = DensityMatrix<double>;
using CDensity = DensityMatrix<cplx>;

template <class Scalar>
double root_fidelity(const DensityMatrix<Scalar>& rho,
                     const DensityMatrix<Scalar>& sigma) {
  return root_fidelity(rho.op(), sigma.op());
}

/// Site list, local dimensions and a disjoint, exhaustive A/B/C assignment.
///
/// Blocks name sites in the permuted frame: after applying `permutation`
/// (new position i holds original site permutation[i]) block A is
/// positions `a`, and so on. With an empty permutation the frames coincide.
struct Partition {
  std::vector<int> local_dims;
  std::vector<int> a;
  std::vector<int> b;
  std::vector<int> c;
  std::vector<int> permutation;

  int n_sites() const noexcept { return static_cast<int>(local_dims.size()); }

  Index dim() const { return detail::product(local_dims); }

  void validate() const {
    detail::require_valid_dims(local_dims);
    const int n = n_sites();
    std::vector<int> count(n, 0);
    for (const auto* block : {&a, &b, &c}) {
      for (int s : *block) {
        if (s < 0 || s >= n) throw PartitionError("block references an unknown site");
        ++count[s];
      }
    }
    for (int k : count) {
      if (k != 1) throw PartitionError("blocks must be disjoint and cover every site");
    }
    if (!permutation.empty()) detail::require_bijection(permutation, n);
  }

  /// Block sites expressed in the original (unpermuted) labelling.
  std::vector<int> original(const std::vector<int>& block) const {
    if (permutation.empty()) return block;
    std::vector<int> out;
    out.reserve(block.size());
    for (int s : block) out.push_back(permutation[s]);
    return out;
  }
  std::vector<int> a_sites() const { return original(a); }
  std::vector<int> b_sites() const { return original(b); }
  std::vector<int> c_sites() const { return original(c); }

  Partition swapped_ac() const {
    Partition p = *this;
    std::swap(p.a, p.c);
    return p;
  }

  static Partition chain(int n_sites, std::vector<int> a, std::vector<int> b,
                         std::vector<int> c, std::vector<int> permutation = {}) {
    Partition p{std::vector<int>(n_sites, 2), std::move(a), std::move(b),
                std::move(c), std::move(permutation)};
    p.validate();
    return p;
  }

  /// Three factors of dimensions dA, dB, dC (one "site" each).
  static Partition factors(int d_a, int d_b, int d_c) {
    Partition p{{d_a, d_b, d_c}, {0}, {1}, {2}, {}};
    p.validate();
    return p;
  }

  /// Edge blocks of two sites each with the bulk in B.
  static Partition chain_default(int n_sites) {
    if (n_sites < 5) throw PartitionError("default chain blocks need at least 5 sites");
    std::vector<int> b;
    for (int s = 2; s < n_sites - 2; ++s) b.push_back(s);
    return chain(n_sites, {0, 1}, std::move(b), {n_sites - 2, n_sites - 1});
  }

  /// 8-site chain, A=(0,1) B=(2,3,4,5) C=(6,7) after the PERMUTE relabelling
  /// [0..7] -> [3,4,1,2,5,6,0,7].
  static Partition chain8_permuted() {
    return chain(8, {0, 1}, {2, 3, 4, 5}, {6, 7}, {3, 4, 1, 2, 5, 6, 0, 7});
  }
};

namespace detail {

template <class Scalar>
std::vector<int> positions_for(const DensityMatrix<Scalar>& rho,
                               std::span<const int> labels) {
  std::vector<int> pos;
  pos.reserve(labels.size());
  std::vector<bool> seen(rho.n_sites(), false);
  for (int label : labels) {
    const int p = rho.position_of(label);
    if (p < 0) {
      std::ostringstream os;
      os << "site " << label << " is not present in the state";
      throw IndexError(os.str());
    }
    if (seen[p]) throw IndexError("site listed twice");
    seen[p] = true;
    pos.push_back(p);
  }
  return pos;
}

/// Partial trace over the complement of `keep_pos`, output ordered as keep_pos.
template <class Scalar>
Matrix<Scalar> trace_to(const Matrix<Scalar>& m, std::span<const int> dims,
                        std::span<const int> keep_pos) {
  const auto traced = complement(static_cast<int>(dims.size()), keep_pos);
  const auto keep_off = offsets(dims, keep_pos);
  const auto trace_off = offsets(dims, traced);
  const Index dk = static_cast<Index>(keep_off.size());
  Matrix<Scalar> out = Matrix<Scalar>::Zero(dk, dk);
  for (Index t : trace_off)
    for (Index j = 0; j < dk; ++j) {
      const Index col = keep_off[j] + t;
      for (Index i = 0; i < dk; ++i) out(i, j) += m(keep_off[i] + t, col);
    }
  return out;
}

}  // namespace detail

/// Reduced state on `keep` (site labels), ordered as listed in `keep`.
/// Keeping every site in the stored order returns the input unchanged; any
/// other order of all sites is a pure relabelling.
template <class Scalar>
DensityMatrix<Scalar> partial_trace(const DensityMatrix<Scalar>& rho,
                                    std::span<const int> keep) {
  if (keep.empty()) throw IndexError("partial_trace: keep set is empty");
  const auto pos = detail::positions_for(rho, keep);
  std::vector<int> dims;
  for (int p : pos) dims.push_back(rho.dims()[p]);
  std::vector<int> labels(keep.begin(), keep.end());
  return DensityMatrix<Scalar>::trusted(
      Hermitian<Scalar>::trusted(detail::trace_to(rho.matrix(), rho.dims(), pos)),
      std::move(dims), std::move(labels));
}

template <class Scalar>
DensityMatrix<Scalar> partial_trace(const DensityMatrix<Scalar>& rho,
                                    std::initializer_list<int> keep) {
  return partial_trace(rho, std::span<const int>(keep.begin(), keep.size()));
}

/// op on `support` (positions, in op's factor order) tensored with identity
/// on the remaining positions. Dual to partial_trace:
/// tr[embed(X) rho] = tr[X partial_trace(rho, support)].
template <class Derived>
auto embed(const Eigen::MatrixBase<Derived>& op, std::span<const int> dims,
           std::span<const int> support) {
  using S = typename Derived::Scalar;
  detail::require_valid_dims(dims);
  const int n = static_cast<int>(dims.size());
  std::vector<bool> seen(n, false);
  Index dsup = 1;
  for (int p : support) {
    if (p < 0 || p >= n || seen[p]) throw IndexError("embed: invalid support site");
    seen[p] = true;
    dsup *= dims[p];
  }
  if (op.rows() != dsup || op.cols() != dsup) {
    std::ostringstream os;
    os << "embed: operator is " << op.rows() << "x" << op.cols()
       << " but the support has dimension " << dsup;
    throw ShapeError(os.str());
  }
  const auto sup_off = detail::offsets(dims, support);
  const auto rest_off = detail::offsets(dims, detail::complement(n, support));
  const Index d = detail::product(dims);
  Matrix<S> out = Matrix<S>::Zero(d, d);
  for (Index r : rest_off)
    for (Index j = 0; j < dsup; ++j)
      for (Index i = 0; i < dsup; ++i) out(sup_off[i] + r, sup_off[j] + r) = op(i, j);
  return out;
}

template <class Derived>
auto embed(const Eigen::MatrixBase<Derived>& op, std::span<const int> dims,
           std::initializer_list<int> support) {
  return embed(op, dims, std::span<const int>(support.begin(), support.size()));
}

/// Site permutation as an index relabelling: new position i holds old
/// position perm[i]. Equivalent to conjugation by the SWAP-network unitary.
template <class Derived>
auto permute_sites(const Eigen::MatrixBase<Derived>& m, std::span<const int> dims,
                   std::span<const int> perm) {
  using S = typename Derived::Scalar;
  detail::require_valid_dims(dims);
  detail::require_bijection(perm, static_cast<int>(dims.size()));
  const auto off = detail::offsets(dims, perm);
  const Index d = static_cast<Index>(off.size());
  if (m.rows() != d || m.cols() != d) throw ShapeError("permute_sites: dimension mismatch");
  Matrix<S> out(d, d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i) out(i, j) = m(off[i], off[j]);
  return out;
}

/// Permuted state with fresh labels 0..n-1 in the new order.
template <class Scalar>
DensityMatrix<Scalar> permute_sites(const DensityMatrix<Scalar>& rho,
                                    std::span<const int> perm) {
  Matrix<Scalar> m = permute_sites(rho.matrix(), rho.dims(), perm);
  std::vector<int> dims;
  for (int p : perm) dims.push_back(rho.dims()[p]);
  return DensityMatrix<Scalar>::trusted(Hermitian<Scalar>::trusted(std::move(m)),
                                        std::move(dims));
}

}  // namespace petzkit
