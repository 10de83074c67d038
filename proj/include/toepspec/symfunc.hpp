#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "toepspec/symbol.hpp"

namespace toepspec {

/// Non-increasing parts, all >= 0.
struct IntegerPartition {
  std::vector<long> parts;

  IntegerPartition() = default;
  explicit IntegerPartition(std::vector<long> p);
  long length() const { return static_cast<long>(parts.size()); }
  long weight() const;
  long part(long i) const { return i < length() ? parts[static_cast<size_t>(i)] : 0; }
};

/// mu inside lambda (zero-padded comparison).
struct SkewShape {
  IntegerPartition lambda, mu;
  SkewShape(IntegerPartition l, IntegerPartition m);
};

/// h_r(t); h_0 = 1, h_r = 0 for r < 0. Stable two-term recurrence.
cplx complete_homogeneous(long r, std::span<const cplx> t);

/// Jacobi form sum_j t_j^{r+w-1} / prod_{k != j} (t_j - t_k); falls back
/// to the recurrence when arguments nearly coincide.
cplx complete_homogeneous_jacobi(long r, std::span<const cplx> t);

/// Jacobi-Trudi determinant det[h_{lambda_u - mu_v - u + v}].
cplx skew_schur(const SkewShape& shape, std::span<const cplx> t);

/// Upper triangular banded Toeplitz T(i,j) = a_{i-j} with a_{-k} = a[k],
/// k = 0..gstar; a[gstar] is normalized to 1 internally.
struct UpperToeplitzData {
  int n_hat = 0;
  std::vector<cplx> a;  // a[k] = a_{-k}

  int gstar() const { return static_cast<int>(a.size()) - 1; }
};

/// det T[rows not in X, cols not in Y] through the skew-Schur identity;
/// exact 0 on interlacing-violating index pairs. X and Y are 1-based.
cplx toeplitz_minor(const UpperToeplitzData& t, const std::vector<int>& X,
                    const std::vector<int>& Y);

/// Same minor by direct dense determinant (test oracle).
cplx toeplitz_minor_direct(const UpperToeplitzData& t, const std::vector<int>& X,
                           const std::vector<int>& Y);

/// det(P_N(p) - z) as the root-subset sum
///   (-1)^{N m} lead^N sum_{|I| = m} C_I prod_{i in I} zeta_i^N,
/// C_I = prod_{i in I, j not in I} zeta_i / (zeta_i - zeta_j),
/// accumulated in log space. Requires simple well-separated roots.
cplx widom_determinant(const LaurentSymbol& sym, cplx z, int n);

/// det((J_n + eta I_n)[rows not in X; cols not in Y]) in closed form
/// (power of eta times the interlacing indicator). X, Y 1-based.
cplx bidiagonal_minor(cplx eta, int n, const std::vector<int>& X, const std::vector<int>& Y);

/// Coefficients det_k of the expansion det(P_z + s N^-gamma Q) in powers
/// of s, evaluated at s = 1 (the noise expansion). Extraction by
/// evaluation at N+1 scaled roots of unity and an inverse DFT.
struct DetExpansion {
  cplx z{};
  double gamma = 0.0;
  std::vector<cplx> detk;           // k = 0..N; may overflow to inf for huge magnitudes
  std::vector<double> logabs_detk;  // log|det_k|, safe against overflow
  int k0 = 0;                       // dominant index m_hat_2 - N_+
  std::vector<double> normalized_abs;  // |det_k| / |K(z)|
  double sum_rel_residual = 0.0;    // |sum_k det_k - det(P_z + dQ)| / |det|
};

DetExpansion det_expansion(const LaurentSymbol& sym, cplx z, double gamma,
                           const Eigen::MatrixXcd& q);

/// Brute-force subset sum for det_k (Cauchy-Binet over k-subsets with
/// permutation signs); feasible only for tiny n. Test oracle.
cplx det_expansion_subset_oracle(const LaurentSymbol& sym, cplx z, double gamma,
                                 const Eigen::MatrixXcd& q, int k);

}  // namespace toepspec
