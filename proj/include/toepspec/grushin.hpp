#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "toepspec/spectral.hpp"

namespace toepspec {

/// Inverse blocks of the augmented system [[P, R-], [R+, 0]] built from
/// the full singular value decomposition of P. E_minus_plus is the
/// effective Hamiltonian -diag(t_1, ..., t_M).
struct GrushinBlocks {
  cplx z{};
  int M = 0;
  double alpha = 0.0;  // t_M <= alpha < t_{M+1}
  Eigen::MatrixXcd E;           // N x N
  Eigen::MatrixXcd E_plus;      // N x M
  Eigen::MatrixXcd E_minus;     // M x N
  Eigen::MatrixXcd E_minus_plus;  // M x M
  Eigen::MatrixXcd R_plus;      // M x N
  Eigen::MatrixXcd R_minus;     // N x M
  Eigen::VectorXd t;            // all N singular values ascending

  /// The full (N+M) x (N+M) inverse pair product ||P E - I||_max.
  double inverse_residual(const Eigen::MatrixXcd& p) const;
};

/// Requires triplets for all N singular values (full SVD path) and a
/// strict gap t_{M+1} > t_M.
GrushinBlocks build_grushin(const SingularTriplets& st, int M);

struct PerturbedGrushinBlocks {
  double delta = 0.0;
  Eigen::MatrixXcd E, E_plus, E_minus, E_minus_plus;
  double invertibility_margin = 0.0;  // s_min(I + delta Q E)
};

PerturbedGrushinBlocks perturbed_blocks(const GrushinBlocks& g, const Eigen::MatrixXcd& q,
                                        double delta);

/// Basis pairs (u, v): u spans the numerical null space of the effective
/// Hamiltonian E_minus_plus^delta, v = E_plus^delta u spans null(P^delta).
std::vector<std::pair<Eigen::VectorXcd, Eigen::VectorXcd>> kernel_via_grushin(
    const PerturbedGrushinBlocks& pg, const GrushinBlocks& g, double null_tol = 1e-8);

/// Neumann truncation error of (I + delta Q E)^{-1} plus the four
/// Hilbert-Schmidt diagnostics with their probabilistic envelopes;
/// measured values are reported, never asserted.
struct ResolventExpansionReport {
  int L = 0;
  double truncation_error = 0.0;   // ||(I+dQE)^{-1} - sum_{i<L} (-dQE)^i||
  double neumann_bound = 0.0;      // (d||QE||)^L / (1 - d||QE||), inf if >= 1
  double dqe_norm = 0.0;           // ||delta Q E||
  struct HsDiag {
    int kappa = 0;
    double eqe_plus = 0, eqe_plus_env = 0;      // N^-gk ||(EQ)^k E+||_HS vs N^{-(g-1)k/2}
    double eqe_e = 0, eqe_e_env = 0;            // N^-gk ||(EQ)^k E||_HS  vs N^{1-(g-1)k/2}
    double eminus_qe = 0, eminus_qe_env = 0;    // N^-gk ||E-(QE)^k||_HS  vs N^{-(g-1)k/2}
    double eminus_qe_plus = 0, eminus_qe_plus_env = 0;
  };
  std::vector<HsDiag> diagnostics;
};

ResolventExpansionReport resolvent_expansion_check(const GrushinBlocks& g,
                                                   const Eigen::MatrixXcd& q, double delta, int L,
                                                   double gamma = 0.0);

}  // namespace toepspec
