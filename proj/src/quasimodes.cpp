#include "toepspec/quasimodes.hpp"

#include <cmath>
#include <numbers>

#include "toepspec/matrices.hpp"

namespace toepspec {

namespace {

constexpr double kPi = std::numbers::pi;

// Inverse square root of a Hermitian positive definite Gram matrix with
// an eigenvalue floor; throws when the conditioning is hopeless.
Eigen::MatrixXcd inv_sqrt(const Eigen::MatrixXcd& g, const char* what) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
  const auto& ev = es.eigenvalues();
  const double top = ev(ev.size() - 1);
  if (!(top > 0) || ev(0) < top / 1e12)
    throw std::runtime_error(std::string(what) + ": Gram matrix not invertible");
  Eigen::VectorXd d(ev.size());
  for (int i = 0; i < ev.size(); ++i) d(i) = 1.0 / std::sqrt(std::max(ev(i), 1e-14));
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double exponential_gram_closed_form(cplx zn, cplx zm, int n) {
  const double an = std::abs(zn), am = std::abs(zm);
  const double num = (1.0 - std::pow(an, 2.0 * n)) * (1.0 - std::pow(am, 2.0 * n)) +
                     std::norm(std::pow(zn, cplx(n, 0)) - std::pow(zm, cplx(n, 0)));
  const double den = (1.0 - an * an) * (1.0 - am * am) + std::norm(zn - zm);
  return std::sqrt(num / den);
}

ExponentialStateSet exponential_states(const RootProfile& profile, int n, int side) {
  if (side != 1 && side != -1) throw std::invalid_argument("exponential_states: side must be +-1");
  ExponentialStateSet out;
  out.z = profile.z;
  out.n = n;
  out.side = side;
  if (side == 1) {
    const auto roots = profile.inside();
    out.states.resize(n, static_cast<Eigen::Index>(roots.size()));
    for (size_t j = 0; j < roots.size(); ++j) {
      cplx pw = 1.0;
      for (int v = 0; v < n; ++v) {
        out.states(v, static_cast<Eigen::Index>(j)) = pw;
        pw *= roots[j];
      }
    }
  } else {
    const auto roots = profile.outside();
    const int mtot = static_cast<int>(roots.size()) + profile.m_inf;
    out.states = Eigen::MatrixXcd::Zero(n, mtot);
    for (size_t j = 0; j < roots.size(); ++j) {
      cplx pw = 1.0;
      for (int v = n - 1; v >= 0; --v) {
        out.states(v, static_cast<Eigen::Index>(j)) = pw;
        pw /= roots[j];
      }
    }
    for (int j = 0; j < profile.m_inf; ++j)
      out.states(n - 1, static_cast<Eigen::Index>(roots.size()) + j) = 1.0;  // 1/infinity = 0
  }
  out.norms.resize(out.states.cols());
  for (int j = 0; j < out.states.cols(); ++j) out.norms(j) = out.states.col(j).norm();
  return out;
}

KernelCoefficients kernel_coefficients(const RootProfile& profile, const LaurentSymbol&,
                                       const RootThresholds&) {
  if (profile.on_curve) throw std::runtime_error("kernel_coefficients: z on spectral curve");
  const int d = profile.winding;
  if (d == 0) throw std::runtime_error("kernel_coefficients: winding number is zero");
  if (profile.m_zero > 0 || profile.m_inf > 0)
    throw std::runtime_error("kernel_coefficients: symbol not in Case 1 at z");
  if (profile.min_root_gap() < 1e-6)
    throw std::runtime_error("kernel_coefficients: roots too close for a stable Vandermonde");

  KernelCoefficients out;
  out.side = d > 0 ? 1 : -1;

  const std::vector<cplx> roots = d > 0 ? profile.inside() : profile.outside();
  const int m = static_cast<int>(roots.size());
  const int m0 = d > 0 ? profile.m0_plus : profile.m0_minus;
  const int ad = std::abs(d);
  if (m0 > ad)
    throw std::runtime_error(
        "kernel_coefficients: slow-decay count exceeds |winding|; adjust thresholds");
  out.n_fast = ad - m0;
  out.n_slow = m0;

  const int nb = d > 0 ? std::max(profile.eff_plus, 0) : std::max(profile.eff_minus, 0);
  if (nb == 0) {
    out.A = Eigen::MatrixXcd::Identity(m, m);
    out.b_cond = 1.0;
    return out;
  }

  // Constraint matrix: columns are root powers on the boundary indices,
  // nu in [-nb, -1] for the plus side and [1, nb] for the minus side.
  Eigen::MatrixXcd bc(nb, m);
  for (int j = 0; j < m; ++j)
    for (int r = 0; r < nb; ++r) {
      const double nu = d > 0 ? static_cast<double>(r - nb) : static_cast<double>(r + 1);
      bc(r, j) = std::pow(roots[static_cast<size_t>(j)], cplx(nu, 0.0));
    }

  // Invertible Vandermonde block: the fastest-decaying roots for the
  // relevant side (smallest moduli inside, largest moduli outside).
  Eigen::MatrixXcd B(nb, nb);
  std::vector<int> bcols(static_cast<size_t>(nb));
  for (int r = 0; r < nb; ++r) bcols[static_cast<size_t>(r)] = d > 0 ? r : m - nb + r;
  for (int r = 0; r < nb; ++r) B.col(r) = bc.col(bcols[static_cast<size_t>(r)]);
  Eigen::JacobiSVD<Eigen::MatrixXcd> bsvd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.b_cond = bsvd.singularValues()(0) / bsvd.singularValues()(nb - 1);
  if (!(out.b_cond < 1e12))
    throw std::runtime_error("kernel_coefficients: Vandermonde block condition " +
                             std::to_string(out.b_cond));

  // Fast block: orthonormal kernel basis of the fast-column submatrix.
  const int fast_lo = d > 0 ? 0 : m0;          // fast column range in root order
  const int fast_n = m - m0;
  Eigen::MatrixXcd fast_cols(nb, fast_n);
  for (int j = 0; j < fast_n; ++j) fast_cols.col(j) = bc.col(fast_lo + j);
  Eigen::MatrixXcd fast_block(m, out.n_fast);
  if (out.n_fast > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> ksvd(fast_cols, Eigen::ComputeFullV);
    if (ksvd.singularValues()(nb - 1) < 1e-12 * ksvd.singularValues()(0))
      throw std::runtime_error("kernel_coefficients: boundary system rank-deficient");
    fast_block.setZero();
    for (int c = 0; c < out.n_fast; ++c) {
      Eigen::VectorXcd x = ksvd.matrixV().col(fast_n - 1 - c);
      for (int j = 0; j < fast_n; ++j) fast_block(fast_lo + j, c) = x(j);
    }
  }

  // Slow block: indicator at the slow root plus a correction carried by
  // the Vandermonde roots.
  const int slow_lo = d > 0 ? m - m0 : 0;
  Eigen::MatrixXcd slow_block = Eigen::MatrixXcd::Zero(m, m0);
  for (int s = 0; s < m0; ++s) {
    const int js = slow_lo + s;
    Eigen::VectorXcd corr = bsvd.solve(-bc.col(js));
    slow_block(js, s) = 1.0;
    for (int r = 0; r < nb; ++r) slow_block(bcols[static_cast<size_t>(r)], s) += corr(r);
  }

  out.A.resize(m, ad);
  if (d > 0) {
    out.A.leftCols(out.n_fast) = fast_block;
    out.A.rightCols(out.n_slow) = slow_block;
  } else {
    out.A.leftCols(out.n_slow) = slow_block;
    out.A.rightCols(out.n_fast) = fast_block;
  }
  return out;
}

QuasimodeBasis quasimode_basis(const LaurentSymbol& sym, cplx z, int n,
                               const RootThresholds& th) {
  RootProfile profile = roots_at(sym, z, th);
  if (profile.on_curve) throw std::runtime_error("quasimode_basis: z on spectral curve");
  if (profile.winding == 0) throw std::runtime_error("quasimode_basis: winding number is zero");
  KernelCoefficients kc = kernel_coefficients(profile, sym, th);
  const int d = profile.winding;
  const int ad = std::abs(d);
  const int m0 = kc.n_slow;

  ExponentialStateSet states = exponential_states(profile, n, kc.side);
  const Eigen::MatrixXcd& Z = states.states;
  const int m = static_cast<int>(Z.cols());

  QuasimodeBasis qb;
  qb.z = z;
  qb.d = d;
  qb.n = n;
  const double logN = std::log(static_cast<double>(n));
  qb.N0 = static_cast<int>(std::lround((1.0 - 1.0 / logN) * (n - 1)));

  // Column split of A in paper order.
  Eigen::MatrixXcd A_fast, A_slow;
  if (d > 0) {
    A_fast = kc.A.leftCols(kc.n_fast);
    A_slow = kc.A.rightCols(m0);
    for (int i = 0; i < kc.n_fast; ++i) qb.class1.push_back(i);
    for (int i = 0; i < m0; ++i) qb.class2.push_back(kc.n_fast + i);
  } else {
    A_slow = kc.A.leftCols(m0);
    A_fast = kc.A.rightCols(kc.n_fast);
    for (int i = 0; i < m0; ++i) qb.class2.push_back(i);
    for (int i = 0; i < kc.n_fast; ++i) qb.class1.push_back(m0 + i);
  }

  // Slow-root state norms for the L scaling.
  const int slow_lo = d > 0 ? m - m0 : 0;
  Eigen::MatrixXcd U(n, ad);
  Eigen::MatrixXcd u_fast, u_slow;
  if (kc.n_fast > 0) {
    Eigen::MatrixXcd za = Z * A_fast;
    u_fast = za * inv_sqrt(za.adjoint() * za, "quasimode_basis fast block");
  }
  if (m0 > 0) {
    Eigen::MatrixXcd za = Z * A_slow;
    for (int s = 0; s < m0; ++s) za.col(s) /= states.norms(slow_lo + s);
    u_slow = za * inv_sqrt(za.adjoint() * za, "quasimode_basis slow block");
  }
  if (d > 0) {
    if (kc.n_fast > 0) U.leftCols(kc.n_fast) = u_fast;
    if (m0 > 0) U.rightCols(m0) = u_slow;
  } else {
    if (m0 > 0) U.leftCols(m0) = u_slow;
    if (kc.n_fast > 0) U.rightCols(kc.n_fast) = u_fast;
  }
  qb.u_tilde = U;

  // Cosine taper on the slow columns only.
  qb.psi = U;
  const double denom = std::cos(kPi * 0.5 * qb.N0 / (n - 1.0));
  for (int idx : qb.class2) {
    for (int v = 0; v < n; ++v) {
      const int mu = d > 0 ? v : (n - 1 - v);  // distance from the decay edge
      if (mu <= qb.N0) continue;
      const double factor = std::cos(kPi * 0.5 * mu / (n - 1.0)) / denom;
      qb.psi(v, idx) *= factor;
    }
  }

  Eigen::MatrixXcd pn = build_toeplitz(sym, n).m;
  pn.diagonal().array() -= z;
  qb.residuals.resize(ad);
  for (int j = 0; j < ad; ++j) qb.residuals(j) = (pn * qb.psi.col(j)).norm();
  Eigen::MatrixXcd g = qb.psi.adjoint() * qb.psi;
  g.diagonal().array() -= 1.0;
  qb.gram_error = g.cwiseAbs().maxCoeff();
  return qb;
}

QuasimodeComparison compare_with_singular_vectors(const LaurentSymbol& sym, cplx z,
                                                  const QuasimodeBasis& qb,
                                                  const SingularTriplets& st) {
  const int ad = std::abs(qb.d);
  if (st.t.size() < ad)
    throw std::invalid_argument("compare_with_singular_vectors: need at least |d| triplets");
  QuasimodeComparison out;

  const int nf = static_cast<int>(qb.class1.size());
  if (nf > 0) {
    Eigen::MatrixXcd psi1(qb.psi.rows(), nf);
    for (int i = 0; i < nf; ++i) psi1.col(i) = qb.psi.col(qb.class1[static_cast<size_t>(i)]);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(psi1);
    Eigen::MatrixXcd qpsi =
        qr.householderQ() * Eigen::MatrixXcd::Identity(qb.psi.rows(), nf);
    Eigen::MatrixXcd cross = qpsi.adjoint() * st.e.leftCols(nf);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(cross);
    double minsv = svd.singularValues()(nf - 1);
    out.max_principal_angle_class1 = std::acos(std::min(1.0, std::max(-1.0, minsv)));
  }

  const int ns = static_cast<int>(qb.class2.size());
  if (ns > 0) {
    RootProfile profile = roots_at(sym, z);
    ExponentialStateSet states = exponential_states(profile, qb.n, qb.d > 0 ? 1 : -1);
    const int m = static_cast<int>(states.states.cols());
    const int slow_lo = qb.d > 0 ? m - ns : 0;
    Eigen::MatrixXcd S(qb.n, ns);
    for (int s = 0; s < ns; ++s)
      S.col(s) = states.states.col(slow_lo + s) / states.norms(slow_lo + s);
    out.b.resize(ns, ns);
    out.regression_residuals.resize(ns);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(S);
    for (int j = 0; j < ns; ++j) {
      const Eigen::VectorXcd ej = st.e.col(ad - ns + j);
      Eigen::VectorXcd bj = cod.solve(ej);
      out.b.col(j) = bj;
      out.regression_residuals(j) = (S * bj - ej).norm();
    }
    Eigen::MatrixXcd g = out.b.adjoint() * out.b;
    g.diagonal().array() -= 1.0;
    out.b_gram_error = g.cwiseAbs().maxCoeff();
  }
  return out;
}

}  // namespace toepspec
