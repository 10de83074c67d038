#include "toepspec/grushin.hpp"

#include <cmath>
#include <limits>

namespace toepspec {

GrushinBlocks build_grushin(const SingularTriplets& st, int M) {
  const int n = static_cast<int>(st.e.rows());
  if (st.t.size() != n) throw std::invalid_argument("build_grushin: full SVD required");
  if (M < 1 || M >= n) throw std::invalid_argument("build_grushin: M out of range");
  if (st.t(M) - st.t(M - 1) <= 1e-12)
    throw std::runtime_error("build_grushin: no spectral gap at M");

  GrushinBlocks g;
  g.z = st.z;
  g.M = M;
  g.t = st.t;
  const double geo = std::sqrt(st.t(M - 1) * st.t(M));
  g.alpha = std::min(std::max(geo, st.t(M - 1)), std::nextafter(st.t(M), 0.0));

  // delta basis = standard basis of C^M.
  g.R_plus = st.e.leftCols(M).adjoint();
  g.R_minus = st.f.leftCols(M);
  g.E_plus = st.e.leftCols(M);
  g.E_minus = st.f.leftCols(M).adjoint();
  g.E_minus_plus = Eigen::MatrixXcd::Zero(M, M);
  for (int i = 0; i < M; ++i) g.E_minus_plus(i, i) = -st.t(i);
  g.E = Eigen::MatrixXcd::Zero(n, n);
  for (int i = M; i < n; ++i)
    g.E += (1.0 / st.t(i)) * st.e.col(i) * st.f.col(i).adjoint();
  return g;
}

double GrushinBlocks::inverse_residual(const Eigen::MatrixXcd& p) const {
  const int n = static_cast<int>(p.rows());
  Eigen::MatrixXcd big(n + M, n + M), inv(n + M, n + M);
  big.topLeftCorner(n, n) = p;
  big.topRightCorner(n, M) = R_minus;
  big.bottomLeftCorner(M, n) = R_plus;
  big.bottomRightCorner(M, M).setZero();
  inv.topLeftCorner(n, n) = E;
  inv.topRightCorner(n, M) = E_plus;
  inv.bottomLeftCorner(M, n) = E_minus;
  inv.bottomRightCorner(M, M) = E_minus_plus;
  Eigen::MatrixXcd prod = big * inv;
  prod.diagonal().array() -= 1.0;
  return prod.cwiseAbs().maxCoeff();
}

PerturbedGrushinBlocks perturbed_blocks(const GrushinBlocks& g, const Eigen::MatrixXcd& q,
                                        double delta) {
  const int n = static_cast<int>(g.E.rows());
  PerturbedGrushinBlocks out;
  out.delta = delta;
  Eigen::MatrixXcd iqe = Eigen::MatrixXcd::Identity(n, n) + delta * q * g.E;
  {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(iqe);
    out.invertibility_margin = svd.singularValues()(n - 1);
  }
  if (out.invertibility_margin <= 1e-10)
    throw std::runtime_error("perturbed_blocks: I + delta Q E nearly singular, margin " +
                             std::to_string(out.invertibility_margin));
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(iqe);
  out.E = g.E * lu.inverse();
  out.E_minus = g.E_minus * lu.inverse();
  Eigen::MatrixXcd core = lu.solve(delta * q * g.E_plus);
  out.E_minus_plus = g.E_minus_plus - g.E_minus * core;
  out.E_plus = g.E_plus - g.E * core;
  return out;
}

std::vector<std::pair<Eigen::VectorXcd, Eigen::VectorXcd>> kernel_via_grushin(
    const PerturbedGrushinBlocks& pg, const GrushinBlocks& g, double null_tol) {
  const int M = g.M;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(pg.E_minus_plus, Eigen::ComputeFullV);
  const double top = svd.singularValues()(0);
  std::vector<std::pair<Eigen::VectorXcd, Eigen::VectorXcd>> out;
  for (int i = M - 1; i >= 0; --i) {
    if (svd.singularValues()(i) > null_tol * std::max(top, 1e-300)) break;
    Eigen::VectorXcd u = svd.matrixV().col(i);
    Eigen::VectorXcd v = pg.E_plus * u;
    v.normalize();
    out.emplace_back(std::move(u), std::move(v));
  }
  return out;
}

ResolventExpansionReport resolvent_expansion_check(const GrushinBlocks& g,
                                                   const Eigen::MatrixXcd& q, double delta, int L,
                                                   double gamma) {
  const int n = static_cast<int>(g.E.rows());
  ResolventExpansionReport rep;
  rep.L = L;
  const Eigen::MatrixXcd dqe = delta * q * g.E;
  rep.dqe_norm = dqe.operatorNorm();
  Eigen::MatrixXcd inv = (Eigen::MatrixXcd::Identity(n, n) + dqe).inverse();
  Eigen::MatrixXcd partial = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd pw = Eigen::MatrixXcd::Identity(n, n);
  for (int i = 0; i < L; ++i) {
    partial += pw;
    pw = -dqe * pw;
  }
  rep.truncation_error = (inv - partial).operatorNorm();
  rep.neumann_bound = rep.dqe_norm < 1.0
                          ? std::pow(rep.dqe_norm, L) / (1.0 - rep.dqe_norm)
                          : std::numeric_limits<double>::infinity();

  if (gamma > 0.0) {
    const double dn = static_cast<double>(n);
    Eigen::MatrixXcd eq_pow = Eigen::MatrixXcd::Identity(n, n);  // (E Q)^kappa
    for (int kappa = 1; kappa <= std::max(1, L); ++kappa) {
      eq_pow = eq_pow * g.E * q;
      ResolventExpansionReport::HsDiag d;
      d.kappa = kappa;
      const double scale = std::pow(dn, -gamma * kappa);
      d.eqe_plus = scale * (eq_pow * g.E_plus).norm();
      d.eqe_plus_env = std::pow(dn, -0.5 * (gamma - 1.0) * kappa);
      d.eqe_e = scale * (eq_pow * g.E).norm();
      d.eqe_e_env = std::pow(dn, 1.0 - 0.5 * (gamma - 1.0) * kappa);
      Eigen::MatrixXcd qe_pow = Eigen::MatrixXcd::Identity(n, n);
      for (int i = 0; i < kappa; ++i) qe_pow = qe_pow * q * g.E;
      d.eminus_qe = scale * (g.E_minus * qe_pow).norm();
      d.eminus_qe_env = d.eqe_plus_env;
      d.eminus_qe_plus = std::pow(dn, -gamma * (kappa + 1.0)) * (g.E_minus * qe_pow * q * g.E_plus).norm();
      d.eminus_qe_plus_env = std::pow(dn, -gamma - 0.5 * (gamma - 1.0) * kappa);
      rep.diagnostics.push_back(d);
    }
  }
  return rep;
}

}  // namespace toepspec
