#pragma once

#include <Eigen/Dense>
#include <vector>

#include "toepspec/spectral.hpp"
#include "toepspec/symbol.hpp"

namespace toepspec {

/// Columns of powers of the inside (side = +1) or outside (side = -1)
/// roots: plus side (1, zeta, ..., zeta^{N-1}), minus side mirrored
/// with the convention 1/infinity = 0.
struct ExponentialStateSet {
  cplx z{};
  int n = 0;
  int side = +1;
  Eigen::MatrixXcd states;  // n x m_side
  Eigen::VectorXd norms;
};

ExponentialStateSet exponential_states(const RootProfile& profile, int n, int side);

/// Closed-form |<z_n | z_m>| of two plus-side power columns (the Gram
/// identity used as a cross-check).
double exponential_gram_closed_form(cplx zeta_n, cplx zeta_m, int n);

/// Kernel coefficient matrix A of the half-line problem: |d| linearly
/// independent solutions of the boundary constraint, columns split into
/// the fast block and the pinned slow block.
struct KernelCoefficients {
  int side = +1;
  Eigen::MatrixXcd A;  // m_side x |d|
  int n_fast = 0;      // columns in the fast-decay class
  int n_slow = 0;      // pinned columns (slow class)
  double b_cond = 1.0;  // condition number of the Vandermonde block
  /// Column order matches the quasimode basis: for d > 0 fast block
  /// first, for d < 0 slow block first.
};

KernelCoefficients kernel_coefficients(const RootProfile& profile, const LaurentSymbol& sym,
                                       const RootThresholds& th = {});

/// Tapered, block-orthonormalized quasimodes of P_N - z.
struct QuasimodeBasis {
  cplx z{};
  int d = 0;
  int n = 0;
  int N0 = 0;  // taper start index, round((1 - 1/log N)(N-1))
  std::vector<int> class1;  // fast-decay column indices into psi
  std::vector<int> class2;  // slow-decay column indices into psi
  Eigen::MatrixXcd psi;      // n x |d|
  Eigen::MatrixXcd u_tilde;  // pre-taper states
  Eigen::VectorXd residuals;  // ||(P_N - z) psi_j||
  double gram_error = 0.0;    // max |<psi_i|psi_j> - delta_ij|
};

QuasimodeBasis quasimode_basis(const LaurentSymbol& sym, cplx z, int n,
                               const RootThresholds& th = {});

/// Comparison of the quasimodes with the true bottom singular vectors:
/// principal angle between the fast spans, and the regression of each
/// slow singular vector on the normalized slow exponential states.
struct QuasimodeComparison {
  double max_principal_angle_class1 = 0.0;
  Eigen::MatrixXcd b;                  // regression coefficients, class2 x class2
  Eigen::VectorXd regression_residuals;
  double b_gram_error = 0.0;
};

QuasimodeComparison compare_with_singular_vectors(const LaurentSymbol& sym, cplx z,
                                                  const QuasimodeBasis& qb,
                                                  const SingularTriplets& st);

}  // namespace toepspec
