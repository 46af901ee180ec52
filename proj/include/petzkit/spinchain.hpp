#pragma once

// Open Ising-type chain
//   H = alpha sum_{i<L} Z_i Z_{i+1} + h_z sum_i Z_i + J_x sum_i X_i
// with its reflection (parity) symmetry. Site 0 is the most significant bit
// of the basis index; bit value 0 is the Z = +1 state.

#include <cmath>
#include <cstdint>
#include <sstream>
#include <utility>
#include <vector>

#include "petzkit/linops.hpp"

namespace petzkit {

struct ChainParams {
  int L = 8;
  double alpha = 1.0;
  double h_z = -0.5;
  double J_x = 1.05;
};

inline constexpr int kDefaultMaxSites = 14;

enum class Sector { even, odd };

inline const char* to_string(Sector s) { return s == Sector::even ? "even" : "odd"; }

namespace detail {

inline std::uint64_t reverse_bits(std::uint64_t s, int L) {
  std::uint64_t r = 0;
  for (int i = 0; i < L; ++i) {
    r = (r << 1) | (s & 1u);
    s >>= 1;
  }
  return r;
}

inline int z_value(std::uint64_t s, int site, int L) {
  return ((s >> (L - 1 - site)) & 1u) ? -1 : 1;
}

inline double diagonal_energy(std::uint64_t s, const ChainParams& p) {
  double e = 0.0;
  for (int i = 0; i < p.L; ++i) {
    const int zi = z_value(s, i, p.L);
    e += p.h_z * zi;
    if (i + 1 < p.L) e += p.alpha * zi * z_value(s, i + 1, p.L);
  }
  return e;
}

inline void require_sites(int L, int max_sites) {
  if (L < 1) throw DomainError("chain needs at least one site");
  if (L > max_sites) {
    const double bytes = std::ldexp(8.0, 2 * L);
    std::ostringstream os;
    os << "L=" << L << " exceeds the cap of " << max_sites
       << " sites (dense Hamiltonian needs ~" << bytes / (1 << 20) << " MiB)";
    throw ResourceError(os.str(), static_cast<std::size_t>(bytes));
  }
}

/// Orbit-pair basis of one parity sector: each vector has one or two
/// computational-basis components.
struct SectorBasis {
  struct Vec {
    std::uint64_t s;
    std::uint64_t r;  // == s for reflection-symmetric states
    double coef_s;
    double coef_r;
  };
  std::vector<Vec> vectors;
  std::vector<std::int64_t> index_of;  // basis state -> vector index or -1
  std::vector<double> coef_of;         // basis state -> component in its vector
};

inline SectorBasis sector_basis(int L, Sector sector) {
  const std::uint64_t n = std::uint64_t{1} << L;
  const double h = 1.0 / std::sqrt(2.0);
  SectorBasis basis;
  basis.index_of.assign(n, -1);
  basis.coef_of.assign(n, 0.0);
  for (std::uint64_t s = 0; s < n; ++s) {
    const std::uint64_t r = reverse_bits(s, L);
    if (r < s) continue;
    const auto idx = static_cast<std::int64_t>(basis.vectors.size());
    if (r == s) {
      if (sector == Sector::odd) continue;
      basis.vectors.push_back({s, s, 1.0, 0.0});
      basis.index_of[s] = idx;
      basis.coef_of[s] = 1.0;
    } else {
      const double sign = sector == Sector::even ? 1.0 : -1.0;
      basis.vectors.push_back({s, r, h, sign * h});
      basis.index_of[s] = idx;
      basis.index_of[r] = idx;
      basis.coef_of[s] = h;
      basis.coef_of[r] = sign * h;
    }
  }
  return basis;
}

}  // namespace detail

/// Dense 2^L Hamiltonian, real symmetric and traceless.
inline RHermitian build_hamiltonian(const ChainParams& p,
                                    int max_sites = kDefaultMaxSites) {
  detail::require_sites(p.L, max_sites);
  const Index n = Index{1} << p.L;
  RMatrix h = RMatrix::Zero(n, n);
  for (Index s = 0; s < n; ++s) {
    const auto us = static_cast<std::uint64_t>(s);
    h(s, s) = detail::diagonal_energy(us, p);
    for (int i = 0; i < p.L; ++i) {
      h(static_cast<Index>(us ^ (std::uint64_t{1} << (p.L - 1 - i))), s) += p.J_x;
    }
  }
  return RHermitian::trusted(std::move(h));
}

/// Reflection P|s_1..s_L> = |s_L..s_1>.
inline RHermitian parity_operator(int L, int max_sites = kDefaultMaxSites) {
  detail::require_sites(L, max_sites);
  const Index n = Index{1} << L;
  RMatrix p = RMatrix::Zero(n, n);
  for (Index s = 0; s < n; ++s) {
    p(static_cast<Index>(detail::reverse_bits(static_cast<std::uint64_t>(s), L)), s) = 1.0;
  }
  return RHermitian::trusted(std::move(p));
}

inline Index sector_dimension(int L, Sector sector) {
  const Index full = Index{1} << L;
  const Index fixed = Index{1} << ((L + 1) / 2);
  return sector == Sector::even ? (full + fixed) / 2 : (full - fixed) / 2;
}

struct ParityBlocks {
  RHermitian even;
  RHermitian odd;
};

/// ||[h, P]||_F computed without materializing P.
inline double parity_commutator_norm(const RHermitian& h, int L) {
  const Index n = h.dim();
  double acc = 0.0;
  for (Index j = 0; j < n; ++j) {
    const auto rj = static_cast<Index>(detail::reverse_bits(static_cast<std::uint64_t>(j), L));
    for (Index i = 0; i < n; ++i) {
      const auto ri = static_cast<Index>(detail::reverse_bits(static_cast<std::uint64_t>(i), L));
      const double d = h(i, rj) - h(ri, j);
      acc += d * d;
    }
  }
  return std::sqrt(acc);
}

/// h restricted to the +1 and -1 eigenspaces of the reflection, in the
/// orbit-pair basis (|s> +- |reverse(s)>)/sqrt(2).
inline ParityBlocks parity_blocks(const RHermitian& h, int L) {
  if (h.dim() != (Index{1} << L)) throw ShapeError("parity_blocks: dimension is not 2^L");
  const double comm = parity_commutator_norm(h, L);
  if (comm > 1e-10 * std::max(1.0, h.matrix().norm())) {
    std::ostringstream os;
    os << "matrix does not commute with parity: ||[H,P]||_F = " << comm;
    throw SymmetryError(os.str(), comm);
  }
  auto project = [&](Sector sector) {
    const auto basis = detail::sector_basis(L, sector);
    const auto m = static_cast<Index>(basis.vectors.size());
    RMatrix block(m, m);
    for (Index b = 0; b < m; ++b) {
      const auto& vb = basis.vectors[b];
      for (Index a = 0; a < m; ++a) {
        const auto& va = basis.vectors[a];
        auto at = [&](std::uint64_t x, std::uint64_t y) {
          return h(static_cast<Index>(x), static_cast<Index>(y));
        };
        double v = va.coef_s * vb.coef_s * at(va.s, vb.s);
        if (vb.r != vb.s) v += va.coef_s * vb.coef_r * at(va.s, vb.r);
        if (va.r != va.s) {
          v += va.coef_r * vb.coef_s * at(va.r, vb.s);
          if (vb.r != vb.s) v += va.coef_r * vb.coef_r * at(va.r, vb.r);
        }
        block(a, b) = v;
      }
    }
    return RHermitian::trusted(std::move(block));
  };
  return {project(Sector::even), project(Sector::odd)};
}

/// One parity block assembled directly from the operator action, without
/// the dense 2^L matrix. Agrees with parity_blocks(build_hamiltonian(p)).
inline RHermitian sector_hamiltonian(const ChainParams& p, Sector sector,
                                     int max_sites = kDefaultMaxSites) {
  detail::require_sites(p.L, max_sites);
  const auto basis = detail::sector_basis(p.L, sector);
  const auto m = static_cast<Index>(basis.vectors.size());
  RMatrix block = RMatrix::Zero(m, m);
  auto apply = [&](Index b, std::uint64_t y, double cy) {
    auto deposit = [&](std::uint64_t x, double amp) {
      const auto a = basis.index_of[x];
      if (a >= 0) block(a, b) += basis.coef_of[x] * amp * cy;
    };
    deposit(y, detail::diagonal_energy(y, p));
    for (int i = 0; i < p.L; ++i) deposit(y ^ (std::uint64_t{1} << (p.L - 1 - i)), p.J_x);
  };
  for (Index b = 0; b < m; ++b) {
    const auto& v = basis.vectors[b];
    apply(b, v.s, v.coef_s);
    if (v.r != v.s) apply(b, v.r, v.coef_r);
  }
  return RHermitian::trusted(std::move(block));
}

}  // namespace petzkit
