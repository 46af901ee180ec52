#pragma once

// Dense Hermitian kernels: eigendecomposition, matrix functions restricted to
// the support, Schatten norms and root fidelity.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <sstream>
#include <type_traits>
#include <utility>

#include <Eigen/Dense>

#include "petzkit/errors.hpp"

namespace petzkit {

using cplx = std::complex<double>;

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using RMatrix = Matrix<double>;
using CMatrix = Matrix<cplx>;
using Eigen::Index;
using Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kSupportCutoff = 1e-12;
inline constexpr double kPositivityTol = 1e-10;

namespace detail {

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};

template <class Derived>
double relative_asymmetry(const Eigen::MatrixBase<Derived>& m) {
  const double scale = m.norm();
  if (scale == 0.0) return 0.0;
  return (m - m.adjoint()).norm() / scale;
}

}  // namespace detail

/// Square matrix equal to its conjugate transpose.
///
/// Construction measures the relative deviation ||m - m^H||_F / ||m||_F,
/// rejects it above `tol`, and stores the symmetrized (m + m^H)/2. The
/// measured deviation stays available through asymmetry().
template <class Scalar>
class Hermitian {
 public:
  using scalar_type = Scalar;

  Hermitian() = default;

  explicit Hermitian(Matrix<Scalar> m, double tol = kHermitianTol) {
    if (m.rows() != m.cols() || m.rows() < 1) {
      throw ShapeError("Hermitian matrix must be square with dim >= 1");
    }
    asymmetry_ = detail::relative_asymmetry(m);
    if (asymmetry_ > tol) {
      std::ostringstream os;
      os << "matrix is not Hermitian: relative deviation " << asymmetry_
         << " exceeds " << tol;
      throw SymmetryError(os.str(), asymmetry_);
    }
    symmetrize(std::move(m));
  }

  /// Symmetrizes without the tolerance check. For results that are
  /// Hermitian by construction up to rounding.
  static Hermitian trusted(Matrix<Scalar> m) {
    Hermitian h;
    h.asymmetry_ = 0.0;
    h.symmetrize(std::move(m));
    return h;
  }

  const Matrix<Scalar>& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }
  double asymmetry() const noexcept { return asymmetry_; }
  Scalar operator()(Index i, Index j) const { return m_(i, j); }

  template <class T>
  Hermitian<T> cast() const {
    return Hermitian<T>::trusted(m_.template cast<T>());
  }

 private:
  void symmetrize(Matrix<Scalar> m) {
    m_ = (m + m.adjoint()) * 0.5;
  }

  Matrix<Scalar> m_;
  double asymmetry_ = 0.0;
};

using RHermitian = Hermitian<double>;
using CHermitian = Hermitian<cplx>;

/// Ascending eigenvalues with orthonormal eigenvector columns.
template <class Scalar>
struct Spectrum {
  VectorXd values;
  Matrix<Scalar> vectors;

  Index dim() const noexcept { return values.size(); }

  Matrix<Scalar> reconstruct() const {
    return vectors * values.template cast<Scalar>().asDiagonal() *
           vectors.adjoint();
  }
};

template <class Scalar>
Spectrum<Scalar> eigh(const Hermitian<Scalar>& m) {
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(m.matrix(),
                                                       Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw DomainError("eigendecomposition failed to converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

template <class Scalar>
VectorXd eigvalsh(const Hermitian<Scalar>& m) {
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(m.matrix(),
                                                       Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw DomainError("eigendecomposition failed to converge");
  }
  return solver.eigenvalues();
}

/// Absolute support threshold: eigenvalues at or below it are off-support.
inline double support_threshold(const VectorXd& values, double relative_cutoff) {
  const double top = values.size() ? values.maxCoeff() : 0.0;
  return relative_cutoff * std::max(top, 0.0);
}

/// V f(diag) V^H.
///
/// With a support cutoff, eigenvalues <= cutoff * max eigenvalue map to 0
/// instead of f(lambda); this is the pseudo-inverse convention for negative
/// powers and logarithms. Real-valued f yields a Hermitian result; complex
/// valued f (rotated powers) yields a general complex matrix.
template <class Scalar, class F>
auto spectral_function(const Spectrum<Scalar>& s, F&& f,
                       std::optional<double> support_cutoff = std::nullopt) {
  using R = std::decay_t<decltype(f(0.0))>;
  const double threshold =
      support_cutoff ? support_threshold(s.values, *support_cutoff) : 0.0;
  Eigen::Matrix<R, Eigen::Dynamic, 1> fv(s.dim());
  for (Index i = 0; i < s.dim(); ++i) {
    const double lambda = s.values(i);
    if (support_cutoff && lambda <= threshold) {
      fv(i) = R(0);
      continue;
    }
    const R value = f(lambda);
    if (!std::isfinite(std::abs(value))) {
      std::ostringstream os;
      os << "matrix function undefined at eigenvalue " << lambda;
      throw DomainError(os.str());
    }
    fv(i) = value;
  }
  if constexpr (detail::is_complex<R>::value) {
    const CMatrix v = s.vectors.template cast<cplx>();
    return CMatrix(v * fv.asDiagonal() * v.adjoint());
  } else {
    return Hermitian<Scalar>::trusted(
        s.vectors * fv.template cast<Scalar>().asDiagonal() * s.vectors.adjoint());
  }
}

/// Real power on the support; negative exponents act as pseudo-inverse powers.
template <class Scalar>
Hermitian<Scalar> support_power(const Spectrum<Scalar>& s, double exponent,
                                double cutoff = kSupportCutoff) {
  return spectral_function(
      s, [exponent](double x) { return std::pow(x, exponent); }, cutoff);
}

/// Complex power x^(re + i im) on the support.
template <class Scalar>
CMatrix support_power(const Spectrum<Scalar>& s, cplx exponent,
                      double cutoff = kSupportCutoff) {
  return spectral_function(
      s, [exponent](double x) { return std::exp(exponent * std::log(x)); },
      cutoff);
}

template <class Scalar>
Hermitian<Scalar> support_log(const Spectrum<Scalar>& s,
                              double cutoff = kSupportCutoff) {
  return spectral_function(s, [](double x) { return std::log(x); }, cutoff);
}

enum class NormKind { trace, op, frobenius };

template <class Derived>
double norm(const Eigen::MatrixBase<Derived>& m, NormKind kind) {
  if (kind == NormKind::frobenius) return m.norm();
  using S = typename Derived::Scalar;
  if (m.size() == 0) return 0.0;
  const Matrix<S> dense = m;
  Eigen::BDCSVD<Matrix<S>> svd(dense);
  const auto& sv = svd.singularValues();
  return kind == NormKind::trace ? sv.sum() : sv.maxCoeff();
}

/// Hermitian shortcut: singular values are |eigenvalues|.
template <class Scalar>
double norm(const Hermitian<Scalar>& m, NormKind kind) {
  if (kind == NormKind::frobenius) return m.matrix().norm();
  const VectorXd ev = eigvalsh(m);
  return kind == NormKind::trace ? ev.cwiseAbs().sum() : ev.cwiseAbs().maxCoeff();
}

namespace detail {

inline void require_positive(const VectorXd& values, const char* which) {
  const double lo = values.minCoeff();
  if (lo < -kPositivityTol) {
    std::ostringstream os;
    os << which << " has eigenvalue " << lo << " below -" << kPositivityTol;
    throw PositivityError(os.str(), lo);
  }
}

}  // namespace detail

/// Root fidelity tr sqrt(sqrt(rho) sigma sqrt(rho)).
template <class Scalar>
double root_fidelity(const Hermitian<Scalar>& rho, const Hermitian<Scalar>& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw ShapeError("root_fidelity: dimension mismatch");
  }
  const Spectrum<Scalar> sr = eigh(rho);
  const Spectrum<Scalar> ss = eigh(sigma);
  detail::require_positive(sr.values, "rho");
  detail::require_positive(ss.values, "sigma");
  // F = || sqrt(rho) sqrt(sigma) ||_1. Singular values keep absolute accuracy
  // near zero, unlike square roots of the eigenvalues of the sandwich.
  // Eigenvalues under the eigensolver's backward error are zero; their square
  // roots would otherwise add ~sqrt(eps) each.
  auto root = [](const Spectrum<Scalar>& s) {
    const double floor = 10.0 * static_cast<double>(s.values.size()) *
                         std::numeric_limits<double>::epsilon() * s.values.cwiseAbs().maxCoeff();
    return spectral_function(s, [floor](double x) { return x > floor ? std::sqrt(x) : 0.0; });
  };
  const Matrix<Scalar> prod = root(sr).matrix() * root(ss).matrix();
  const Eigen::BDCSVD<Matrix<Scalar>> svd(prod);
  const double f = svd.singularValues().sum();
  return f;
}

}  // namespace petzkit
