#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "toepspec/matrices.hpp"
#include "toepspec/symbol.hpp"

namespace toepspec {

struct EigenPair {
  cplx value;
  Eigen::VectorXcd vector;  // unit norm, first significant entry real positive
};

/// Dense eigendecomposition, sorted by (re, im) of the eigenvalue.
std::vector<EigenPair> eigenpairs(const Eigen::MatrixXcd& m);

/// The k smallest singular triplets of P_N(p) - z (or of a raw matrix):
/// ascending t with (P-z) e_i = t_i f_i and (P-z)^* f_i = t_i e_i.
struct SingularTriplets {
  cplx z{};
  Eigen::VectorXd t;    // ascending, size k
  Eigen::MatrixXcd e;   // right vectors, N x k
  Eigen::MatrixXcd f;   // left vectors, N x k
  double residual = 0;  // max_i ||A e_i - t_i f_i||
};

SingularTriplets singular_triplets(const Eigen::MatrixXcd& a, cplx z_tag, int k);
SingularTriplets singular_triplets(const LaurentSymbol& sym, cplx z, int n, int k);

/// Bottom singular subspace of a (nearly) invertible matrix via inverse
/// iteration on the normal equations; used for n past the dense-SVD range
/// and for cheap per-eigenvalue projections.
SingularTriplets smallest_triplets_iterative(const Eigen::MatrixXcd& a, int k, int iters = 24);

/// Boundary singular values around the splitting indices |d| and
/// |d| - m0, with ratio diagnostics.
struct GapReport {
  cplx z{};
  int d = 0;       // winding number
  int m0 = 0;      // slow-decay count from the root profile
  double t_low = 0;     // t_{|d|-m0} (0 when the index is 0)
  double t_mid_lo = 0;  // t_{|d|-m0+1}
  double t_d = 0;       // t_{|d|}
  double t_next = 0;    // t_{|d|+1}
  double ratio_next = 0;  // t_next / t_d
  double ratio_mid = 0;   // t_mid_lo / max(t_low, tiny)
};

GapReport gap_report(const LaurentSymbol& sym, cplx z, int n, const RootThresholds& th = {});

/// Fundamental solution E of the convolution operator of q = p - z:
/// sum_k b_k E(n - k) = delta_{n,0} with b_k the coefficient of zeta^k in
/// q. Computed from the residue form on the window [lo, hi].
std::map<int, cplx> fundamental_solution(const LaurentSymbol& sym, cplx z, int lo, int hi);

/// 1 / s_min(P_N(p) - z). Throws if the matrix is singular to working
/// precision.
double resolvent_norm(const LaurentSymbol& sym, cplx z, int n);

}  // namespace toepspec
