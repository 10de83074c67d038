#include "toepspec/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace toepspec {

namespace {

void fix_phase(Eigen::Ref<Eigen::VectorXcd> v) {
  const double mx = v.cwiseAbs().maxCoeff();
  if (mx == 0.0) return;
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12 * mx) {
      v *= std::abs(v(i)) / v(i);
      return;
    }
  }
}

}  // namespace

std::vector<EigenPair> eigenpairs(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("eigenpairs: matrix must be square");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, true);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigenpairs: solver did not converge");
  const int n = static_cast<int>(m.rows());
  std::vector<EigenPair> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    out[static_cast<size_t>(i)].value = es.eigenvalues()(i);
    Eigen::VectorXcd v = es.eigenvectors().col(i);
    v.normalize();
    fix_phase(v);
    out[static_cast<size_t>(i)].vector = std::move(v);
  }
  std::sort(out.begin(), out.end(), [](const EigenPair& a, const EigenPair& b) {
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });
  return out;
}

SingularTriplets singular_triplets(const Eigen::MatrixXcd& a, cplx z_tag, int k) {
  const int n = static_cast<int>(a.rows());
  if (k < 1 || k > n) throw std::invalid_argument("singular_triplets: k out of range");
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SingularTriplets out;
  out.z = z_tag;
  out.t.resize(k);
  out.e.resize(n, k);
  out.f.resize(n, k);
  for (int i = 0; i < k; ++i) {
    const int src = n - 1 - i;  // SVD returns descending singular values
    out.t(i) = svd.singularValues()(src);
    out.e.col(i) = svd.matrixV().col(src);
    out.f.col(i) = svd.matrixU().col(src);
    // Phase-lock the pair: rotating e and f together preserves the
    // couplings A e = t f and A^* f = t e exactly.
    const Eigen::VectorXcd& e = out.e.col(i);
    const double mx = e.cwiseAbs().maxCoeff();
    for (int r = 0; r < e.size(); ++r) {
      if (std::abs(e(r)) > 1e-12 * mx) {
        const cplx rot = std::abs(e(r)) / e(r);
        out.e.col(i) *= rot;
        out.f.col(i) *= rot;
        break;
      }
    }
  }
  double res = 0.0;
  for (int i = 0; i < k; ++i) {
    res = std::max(res, (a * out.e.col(i) - out.t(i) * out.f.col(i)).norm());
    res = std::max(res, (a.adjoint() * out.f.col(i) - out.t(i) * out.e.col(i)).norm());
  }
  out.residual = res;
  return out;
}

SingularTriplets singular_triplets(const LaurentSymbol& sym, cplx z, int n, int k) {
  Eigen::MatrixXcd a = build_toeplitz(sym, n).m;
  a.diagonal().array() -= z;
  if (n <= 1024) return singular_triplets(a, z, k);
  SingularTriplets st = smallest_triplets_iterative(a, k);
  st.z = z;
  return st;
}

SingularTriplets smallest_triplets_iterative(const Eigen::MatrixXcd& a, int k, int iters) {
  const int n = static_cast<int>(a.rows());
  if (k < 1 || k > n) throw std::invalid_argument("smallest_triplets_iterative: k out of range");
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  // Buffer vectors speed up convergence when t_k and t_{k+1} are close.
  const int kb = std::min(n, k + 3);
  Eigen::MatrixXcd x(n, kb);
  std::mt19937_64 gen(12345);
  std::normal_distribution<double> n01;
  for (int j = 0; j < kb; ++j)
    for (int i = 0; i < n; ++i) x(i, j) = cplx(n01(gen), n01(gen));
  // Convergence is judged on the k requested Ritz values only; the
  // buffer values may keep rotating inside near-degenerate clusters.
  Eigen::VectorXd prev = Eigen::VectorXd::Constant(k, -1.0);
  const int max_it = std::max(iters, 16);
  for (int it = 0; it < max_it; ++it) {
    // One step of inverse iteration on A^* A: x <- A^{-1} A^{-*} x.
    x = lu.adjoint().solve(x);
    x = lu.solve(x);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(x);
    x = qr.householderQ() * Eigen::MatrixXcd::Identity(n, kb);
    if (it >= 5 && (it % 2) == 1) {
      Eigen::VectorXd all(kb);
      for (int j = 0; j < kb; ++j) all(j) = (a * x.col(j)).norm();
      std::sort(all.data(), all.data() + kb);
      const Eigen::VectorXd cur = all.head(k);
      if ((cur - prev).cwiseAbs().maxCoeff() <= 1e-12 * (cur(k - 1) + 1e-300)) break;
      prev = cur;
    }
  }
  // Ritz extraction from the converged subspace: SVD of A X.
  Eigen::MatrixXcd ax = a * x;
  Eigen::JacobiSVD<Eigen::MatrixXcd> small(ax, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SingularTriplets out;
  out.t.resize(k);
  out.e.resize(n, k);
  out.f.resize(n, k);
  for (int i = 0; i < k; ++i) {
    const int src = kb - 1 - i;
    out.t(i) = small.singularValues()(src);
    out.e.col(i) = x * small.matrixV().col(src);
    out.e.col(i).normalize();
    fix_phase(out.e.col(i));
    Eigen::VectorXcd img = a * out.e.col(i);
    const double tn = img.norm();
    out.t(i) = tn;
    if (tn > 1e-280)
      out.f.col(i) = img / tn;
    else
      out.f.col(i) = small.matrixU().col(src);
  }
  double res = 0.0;
  for (int i = 0; i < k; ++i)
    res = std::max(res, (a.adjoint() * out.f.col(i) - out.t(i) * out.e.col(i)).norm());
  out.residual = res;
  return out;
}

GapReport gap_report(const LaurentSymbol& sym, cplx z, int n, const RootThresholds& th) {
  RootProfile prof = roots_at(sym, z, th);
  if (prof.on_curve || prof.winding == 0)
    throw std::runtime_error("gap_report: no small singular values expected (winding 0)");
  GapReport rep;
  rep.z = z;
  rep.d = prof.winding;
  rep.m0 = prof.winding > 0 ? prof.m0_plus : prof.m0_minus;
  const int ad = std::abs(rep.d);
  const int keep = ad + 1;
  SingularTriplets st = singular_triplets(sym, z, n, std::min(keep, n));
  auto tv = [&](int idx1) { return idx1 >= 1 && idx1 <= st.t.size() ? st.t(idx1 - 1) : 0.0; };
  rep.t_low = (ad - rep.m0 >= 1) ? tv(ad - rep.m0) : 0.0;
  rep.t_mid_lo = tv(ad - rep.m0 + 1);
  rep.t_d = tv(ad);
  rep.t_next = tv(ad + 1);
  rep.ratio_next = rep.t_d > 0 ? rep.t_next / rep.t_d : std::numeric_limits<double>::infinity();
  rep.ratio_mid = rep.t_low > 0 ? rep.t_mid_lo / rep.t_low : std::numeric_limits<double>::infinity();
  return rep;
}

std::map<int, cplx> fundamental_solution(const LaurentSymbol& sym, cplx z, int lo, int hi) {
  if (lo > hi) throw std::invalid_argument("fundamental_solution: empty window");

  std::map<int, cplx> e;
  for (int n = lo; n <= hi; ++n) e[n] = 0.0;

  // Monomial q = c zeta^{-j}: 1/q is the single Laurent term zeta^{j} / c.
  {
    std::map<int, cplx> c = sym.coeffs();
    c[0] = sym.coeff(0) - z;
    if (c[0] == 0.0) c.erase(0);
    if (c.empty()) throw std::runtime_error("fundamental_solution: identically zero symbol at z");
    if (c.size() == 1) {
      const auto& [j, a] = *c.begin();
      if (lo <= j && j <= hi) e[j] = 1.0 / a;
      return e;
    }
  }

  RootProfile prof = roots_at(sym, z);
  if (prof.on_curve) throw std::runtime_error("fundamental_solution: 0 on q(S^1)");
  if (prof.m_zero > 0 || prof.m_inf > 0)
    throw std::runtime_error("fundamental_solution: symbol not in Case 1");
  if (prof.min_root_gap() < 1e-6) throw std::runtime_error("fundamental_solution: near-degenerate roots");
  const int npl = prof.eff_plus;  // q = zeta^{-npl} * Pol(zeta)

  // E(n) = (1/2pi i) oint zeta^{npl - n - 1} / Pol(zeta) dzeta: sum of
  // residues over the inside roots for n <= npl - 1, minus the outside
  // residues otherwise.
  auto residue_at = [&](size_t r, int power) {
    cplx denom = prof.lead;
    for (size_t j = 0; j < prof.roots.size(); ++j)
      if (j != r) denom *= prof.roots[r] - prof.roots[j];
    return std::pow(prof.roots[r], cplx(power, 0.0)) / denom;
  };
  for (int n = lo; n <= hi; ++n) {
    const int power = npl - n - 1;
    cplx val = 0.0;
    if (power >= 0) {
      for (size_t r = 0; r < prof.roots.size(); ++r)
        if (std::abs(prof.roots[r]) < 1.0) val += residue_at(r, power);
    } else {
      for (size_t r = 0; r < prof.roots.size(); ++r)
        if (std::abs(prof.roots[r]) > 1.0) val -= residue_at(r, power);
    }
    e[n] = val;
  }
  return e;
}

double resolvent_norm(const LaurentSymbol& sym, cplx z, int n) {
  Eigen::MatrixXcd a = build_toeplitz(sym, n).m;
  a.diagonal().array() -= z;
  double smin;
  if (n <= 1024) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(a);
    smin = svd.singularValues()(n - 1);
  } else {
    smin = smallest_triplets_iterative(a, 1).t(0);
  }
  if (smin <= 1e-300 * a.norm()) throw std::runtime_error("resolvent_norm: singular matrix");
  return 1.0 / smin;
}

}  // namespace toepspec
