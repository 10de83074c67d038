#include "toepspec/symfunc.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "toepspec/matrices.hpp"

namespace toepspec {

IntegerPartition::IntegerPartition(std::vector<long> p) : parts(std::move(p)) {
  for (size_t i = 0; i < parts.size(); ++i) {
    if (parts[i] < 0) throw std::invalid_argument("IntegerPartition: negative part");
    if (i > 0 && parts[i] > parts[i - 1])
      throw std::invalid_argument("IntegerPartition: parts must be non-increasing");
  }
}

long IntegerPartition::weight() const {
  long w = 0;
  for (long p : parts) w += p;
  return w;
}

SkewShape::SkewShape(IntegerPartition l, IntegerPartition m)
    : lambda(std::move(l)), mu(std::move(m)) {
  if (mu.length() > lambda.length()) throw std::invalid_argument("SkewShape: mu longer than lambda");
  for (long s = 0; s < mu.length(); ++s)
    if (mu.part(s) > lambda.part(s)) throw std::invalid_argument("SkewShape: mu not inside lambda");
}

cplx complete_homogeneous(long r, std::span<const cplx> t) {
  if (r < 0) return 0.0;
  if (r == 0) return 1.0;
  // h_r(t_1..t_k) = h_r(t_1..t_{k-1}) + t_k h_{r-1}(t_1..t_k): one row of
  // the DP table per variable.
  std::vector<cplx> h(static_cast<size_t>(r) + 1, cplx(0.0));
  h[0] = 1.0;
  for (const cplx& x : t)
    for (long s = 1; s <= r; ++s) h[static_cast<size_t>(s)] += x * h[static_cast<size_t>(s) - 1];
  return h[static_cast<size_t>(r)];
}

cplx complete_homogeneous_jacobi(long r, std::span<const cplx> t) {
  if (r < 0) return 0.0;
  const long w = static_cast<long>(t.size());
  if (w == 0) return r == 0 ? cplx(1.0) : cplx(0.0);
  double sep = 1e300, scale = 0.0;
  for (long i = 0; i < w; ++i) {
    scale = std::max(scale, std::abs(t[static_cast<size_t>(i)]));
    for (long j = i + 1; j < w; ++j)
      sep = std::min(sep, std::abs(t[static_cast<size_t>(i)] - t[static_cast<size_t>(j)]));
  }
  if (w > 1 && sep <= 1e-8 * std::max(scale, 1.0)) return complete_homogeneous(r, t);
  cplx sum = 0.0;
  for (long j = 0; j < w; ++j) {
    cplx denom = 1.0;
    for (long k = 0; k < w; ++k)
      if (k != j) denom *= t[static_cast<size_t>(j)] - t[static_cast<size_t>(k)];
    sum += std::pow(t[static_cast<size_t>(j)], cplx(static_cast<double>(r + w - 1), 0.0)) / denom;
  }
  return sum;
}

cplx skew_schur(const SkewShape& shape, std::span<const cplx> t) {
  const long m = shape.lambda.length();
  if (m == 0) return 1.0;
  Eigen::MatrixXcd jt(m, m);
  for (long u = 0; u < m; ++u)
    for (long v = 0; v < m; ++v)
      jt(u, v) = complete_homogeneous(shape.lambda.part(u) - shape.mu.part(v) - u + v, t);
  return jt.determinant();
}

namespace {

void check_index_set(const std::vector<int>& s, int n_hat, const char* name) {
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 1 || s[i] > n_hat) throw std::invalid_argument(std::string(name) + ": index out of range");
    if (i > 0 && s[i] <= s[i - 1])
      throw std::invalid_argument(std::string(name) + ": indices must be strictly increasing");
  }
}

Eigen::MatrixXcd complement_minor(const Eigen::MatrixXcd& m, const std::vector<int>& X,
                                  const std::vector<int>& Y) {
  const int n = static_cast<int>(m.rows());
  std::vector<int> rows, cols;
  std::vector<bool> xm(static_cast<size_t>(n) + 1, false), ym(static_cast<size_t>(n) + 1, false);
  for (int x : X) xm[static_cast<size_t>(x)] = true;
  for (int y : Y) ym[static_cast<size_t>(y)] = true;
  for (int i = 1; i <= n; ++i) {
    if (!xm[static_cast<size_t>(i)]) rows.push_back(i - 1);
    if (!ym[static_cast<size_t>(i)]) cols.push_back(i - 1);
  }
  Eigen::MatrixXcd sub(rows.size(), cols.size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols.size(); ++j) sub(i, j) = m(rows[i], cols[j]);
  return sub;
}

Eigen::MatrixXcd upper_toeplitz_dense(const UpperToeplitzData& t) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(t.n_hat, t.n_hat);
  for (int k = 0; k <= t.gstar(); ++k)
    for (int i = 0; i + k < t.n_hat; ++i) m(i, i + k) = t.a[static_cast<size_t>(k)];
  return m;
}

}  // namespace

cplx toeplitz_minor_direct(const UpperToeplitzData& t, const std::vector<int>& X,
                           const std::vector<int>& Y) {
  check_index_set(X, t.n_hat, "X");
  check_index_set(Y, t.n_hat, "Y");
  if (X.size() != Y.size()) throw std::invalid_argument("toeplitz_minor: |X| != |Y|");
  Eigen::MatrixXcd sub = complement_minor(upper_toeplitz_dense(t), X, Y);
  if (sub.rows() == 0) return 1.0;
  return Eigen::PartialPivLU<Eigen::MatrixXcd>(sub).determinant();
}

cplx toeplitz_minor(const UpperToeplitzData& t, const std::vector<int>& X,
                    const std::vector<int>& Y) {
  check_index_set(X, t.n_hat, "X");
  check_index_set(Y, t.n_hat, "Y");
  if (X.size() != Y.size()) throw std::invalid_argument("toeplitz_minor: |X| != |Y|");
  const int n = static_cast<int>(X.size());
  const int g = t.gstar();
  if (g < 1) throw std::invalid_argument("toeplitz_minor: need bandwidth >= 1");
  if (t.a[static_cast<size_t>(g)] == 0.0 || t.a[0] == 0.0)
    throw std::invalid_argument("toeplitz_minor: band endpoints must be nonzero");

  // Interlacing fast path (vanishing lemma): zero before any arithmetic.
  for (int i = 0; i < n; ++i)
    if (X[static_cast<size_t>(i)] < Y[static_cast<size_t>(i)]) return 0.0;
  for (int i = 0; i + g < n; ++i)
    if (X[static_cast<size_t>(i)] >= Y[static_cast<size_t>(i + g)]) return 0.0;

  // Normalize so the top band coefficient is 1; the minor scales by the
  // normalizer to the power of the kept dimension.
  const cplx top = t.a[static_cast<size_t>(g)];
  std::vector<cplx> monic(t.a.begin(), t.a.end());
  for (auto& c : monic) c /= top;

  // eta = roots of the monic polynomial sum_k a_{-k} tau^k.
  std::vector<cplx> eta = poly_roots(monic);
  double sep = 1e300, scale = 0.0;
  for (size_t i = 0; i < eta.size(); ++i) {
    scale = std::max(scale, std::abs(eta[i]));
    for (size_t j = i + 1; j < eta.size(); ++j) sep = std::min(sep, std::abs(eta[i] - eta[j]));
  }
  if (eta.size() > 1 && sep <= 1e-8 * std::max(scale, 1.0))
    throw std::runtime_error("toeplitz_minor: requires distinct roots");
  std::vector<cplx> xi(eta.size());
  for (size_t i = 0; i < eta.size(); ++i) xi[i] = 1.0 / eta[i];

  // det = sign * a_0^{N-n} * det[ h_{x_v - y_u}(xi) ].
  long xsum = 0, ysum = 0;
  for (int v : X) xsum += v;
  for (int v : Y) ysum += v;
  cplx value;
  if (n == 0) {
    value = 1.0;
  } else {
    // The stable h recurrence; the Jacobi closed form amplifies rounding
    // when root gaps are small.
    Eigen::MatrixXcd jt(n, n);
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v)
        jt(u, v) =
            complete_homogeneous(X[static_cast<size_t>(v)] - Y[static_cast<size_t>(u)], xi);
    value = jt.determinant();
  }
  const double sign = ((xsum + ysum) % 2 == 0) ? 1.0 : -1.0;
  const cplx a0 = monic[0];
  return sign * std::pow(a0, cplx(static_cast<double>(t.n_hat - n), 0.0)) * value *
         std::pow(top, cplx(static_cast<double>(t.n_hat - n), 0.0));
}

cplx widom_determinant(const LaurentSymbol& sym, cplx z, int n) {
  LaurentSymbol work = sym;
  RootProfile prof = roots_at(work, z);
  if (prof.eff_minus < 1) {
    work = sym.reflected();  // det is invariant under transposition
    prof = roots_at(work, z);
  }
  if (prof.eff_plus < 0 || prof.eff_minus < 1)
    throw std::runtime_error("widom_determinant: degenerate band after reflection");
  if (prof.m_zero > 0 || prof.m_inf > 0)
    throw std::runtime_error("widom_determinant: roots at 0 or infinity");
  const auto& zeta = prof.roots;
  const int nt = static_cast<int>(zeta.size());
  const int m = prof.eff_minus;
  {
    double sep = 1e300, scale = 0.0;
    for (int i = 0; i < nt; ++i) {
      scale = std::max(scale, std::abs(zeta[static_cast<size_t>(i)]));
      for (int j = i + 1; j < nt; ++j)
        sep = std::min(sep, std::abs(zeta[static_cast<size_t>(i)] - zeta[static_cast<size_t>(j)]));
    }
    if (nt > 1 && sep <= 1e-6 * std::max(scale, 1.0))
      throw std::runtime_error("widom_determinant: near-coincident roots");
  }

  // log-space accumulation of lead^N * sum_I C_I prod_{i in I} zeta_i^N.
  std::vector<int> idx(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) idx[static_cast<size_t>(i)] = i;
  double max_log = -1e300;
  struct Term {
    double logmag;
    double arg;
  };
  std::vector<Term> terms;
  auto emit = [&]() {
    std::vector<bool> in(static_cast<size_t>(nt), false);
    for (int i : idx) in[static_cast<size_t>(i)] = true;
    double logmag = 0.0, arg = 0.0;
    for (int i = 0; i < nt; ++i) {
      if (!in[static_cast<size_t>(i)]) continue;
      const cplx& zi = zeta[static_cast<size_t>(i)];
      logmag += n * std::log(std::abs(zi));
      arg += n * std::arg(zi);
      for (int j = 0; j < nt; ++j) {
        if (in[static_cast<size_t>(j)]) continue;
        const cplx ratio = zi / (zi - zeta[static_cast<size_t>(j)]);
        logmag += std::log(std::abs(ratio));
        arg += std::arg(ratio);
      }
    }
    terms.push_back({logmag, arg});
    max_log = std::max(max_log, logmag);
  };
  // Iterate over all m-subsets of [nt].
  while (true) {
    emit();
    int i = m - 1;
    while (i >= 0 && idx[static_cast<size_t>(i)] == nt - m + i) --i;
    if (i < 0) break;
    ++idx[static_cast<size_t>(i)];
    for (int j = i + 1; j < m; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
  }
  cplx sum = 0.0;
  for (const auto& t : terms) sum += std::exp(t.logmag - max_log) * cplx(std::cos(t.arg), std::sin(t.arg));

  const cplx lead = prof.lead;
  const double lead_log = n * std::log(std::abs(lead));
  const double lead_arg = n * std::arg(lead);
  const double sign = ((static_cast<long>(n) * m) % 2 == 0) ? 1.0 : -1.0;
  const double logmag = lead_log + max_log;
  return sign * std::exp(logmag) * cplx(std::cos(lead_arg), std::sin(lead_arg)) * sum;
}

cplx bidiagonal_minor(cplx eta, int n, const std::vector<int>& X, const std::vector<int>& Y) {
  check_index_set(X, n, "X");
  check_index_set(Y, n, "Y");
  if (X.size() != Y.size()) throw std::invalid_argument("bidiagonal_minor: |X| != |Y|");
  const int k = static_cast<int>(X.size());
  // Interlacing indicator: Y_l <= X_l < Y_{l+1} for all l (Y_{k+1} = n+1).
  for (int l = 0; l < k; ++l) {
    const int ynext = (l + 1 < k) ? Y[static_cast<size_t>(l + 1)] : n + 1;
    if (!(Y[static_cast<size_t>(l)] <= X[static_cast<size_t>(l)] &&
          X[static_cast<size_t>(l)] < ynext))
      return 0.0;
  }
  long expo = (k == 0) ? n : (Y.empty() ? n : Y[0] - 1);
  for (int l = 1; l < k; ++l) expo += Y[static_cast<size_t>(l)] - X[static_cast<size_t>(l - 1)] - 1;
  if (k > 0) expo += n - X[static_cast<size_t>(k - 1)];
  return std::pow(eta, cplx(static_cast<double>(expo), 0.0));
}

namespace {

double perm_sign(const std::vector<int>& front, int n) {
  // Sign of the permutation placing `front` (sorted, 1-based) before the
  // rest in order: (-1)^{sum (z_i - i)}.
  long s = 0;
  for (size_t i = 0; i < front.size(); ++i) s += front[i] - static_cast<long>(i) - 1;
  (void)n;
  return (s % 2 == 0) ? 1.0 : -1.0;
}

void k_subsets(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<size_t>(i)] = i + 1;
  if (k == 0) {
    fn(idx);
    return;
  }
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<size_t>(i)] == n - k + i + 1) --i;
    if (i < 0) break;
    ++idx[static_cast<size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
  }
}

}  // namespace

cplx det_expansion_subset_oracle(const LaurentSymbol& sym, cplx z, double gamma,
                                 const Eigen::MatrixXcd& q, int k) {
  const int n = static_cast<int>(q.rows());
  if (n > 12) throw std::invalid_argument("det_expansion_subset_oracle: n too large");
  Eigen::MatrixXcd pz = build_toeplitz(sym, n).m;
  pz.diagonal().array() -= z;
  const double scale = std::pow(n, -gamma * k);
  cplx total = 0.0;
  k_subsets(n, k, [&](const std::vector<int>& X) {
    k_subsets(n, k, [&](const std::vector<int>& Y) {
      Eigen::MatrixXcd pzc = complement_minor(pz, X, Y);
      Eigen::MatrixXcd qm(k, k);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) qm(i, j) = q(X[static_cast<size_t>(i)] - 1, Y[static_cast<size_t>(j)] - 1);
      const cplx dp = pzc.rows() == 0 ? cplx(1.0)
                                      : Eigen::PartialPivLU<Eigen::MatrixXcd>(pzc).determinant();
      const cplx dq = k == 0 ? cplx(1.0) : Eigen::PartialPivLU<Eigen::MatrixXcd>(qm).determinant();
      total += perm_sign(X, n) * perm_sign(Y, n) * dp * dq;
    });
  });
  return scale * total;
}

DetExpansion det_expansion(const LaurentSymbol& sym, cplx z, double gamma,
                           const Eigen::MatrixXcd& q) {
  const int n = static_cast<int>(q.rows());
  if (n > 512) throw std::invalid_argument("det_expansion: n > 512 unsupported");
  Eigen::MatrixXcd pz = build_toeplitz(sym, n).m;
  pz.diagonal().array() -= z;
  const Eigen::MatrixXcd dq = std::pow(n, -gamma) * q;

  DetExpansion out;
  out.z = z;
  out.gamma = gamma;

  const double pnorm = pz.norm();
  const double qnorm = dq.norm();
  double rho = (qnorm > 0 && pnorm > 0) ? std::sqrt(pnorm / qnorm) : 1.0;
  rho = std::min(1e3, std::max(1e-3, rho));

  // Normalize entries so evaluation determinants stay in range; this
  // scales every det_k by the same sigma^n and divides out below.
  const double sigma = std::max(pz.cwiseAbs().maxCoeff(), 1e-12);

  const int m = n + 1;
  std::vector<cplx> vals(static_cast<size_t>(m));
  for (int j = 0; j < m; ++j) {
    const double th = 2.0 * std::numbers::pi * j / m;
    const cplx s = rho * cplx(std::cos(th), std::sin(th));
    Eigen::MatrixXcd a = (pz + s * dq) / sigma;
    vals[static_cast<size_t>(j)] = Eigen::PartialPivLU<Eigen::MatrixXcd>(a).determinant();
  }
  out.detk.assign(static_cast<size_t>(m), cplx(0.0));
  out.logabs_detk.assign(static_cast<size_t>(m), -std::numeric_limits<double>::infinity());
  const double logsigma_n = n * std::log(sigma);
  for (int k = 0; k < m; ++k) {
    cplx c = 0.0;
    for (int j = 0; j < m; ++j) {
      const double th = -2.0 * std::numbers::pi * j * k / m;
      c += vals[static_cast<size_t>(j)] * cplx(std::cos(th), std::sin(th));
    }
    c /= static_cast<double>(m);
    // unscale: true coefficient = sigma^n * c / rho^k
    const double logmag = std::log(std::abs(c)) + logsigma_n - k * std::log(rho);
    out.logabs_detk[static_cast<size_t>(k)] = std::abs(c) == 0.0 ? -std::numeric_limits<double>::infinity() : logmag;
    const cplx phase = std::abs(c) == 0.0 ? cplx(0.0) : c / std::abs(c);
    out.detk[static_cast<size_t>(k)] = std::exp(logmag) * phase;
  }

  // Consistency: coefficients must reproduce det(P_z + dQ) at s = 1.
  {
    Eigen::MatrixXcd a = (pz + dq) / sigma;
    const cplx direct = Eigen::PartialPivLU<Eigen::MatrixXcd>(a).determinant();
    cplx recon = 0.0;
    for (int k = 0; k < m; ++k) {
      double th = 0.0;
      cplx c = 0.0;
      for (int j = 0; j < m; ++j) {
        th = -2.0 * std::numbers::pi * j * k / m;
        c += vals[static_cast<size_t>(j)] * cplx(std::cos(th), std::sin(th));
      }
      recon += c / static_cast<double>(m) * std::pow(cplx(1.0 / rho, 0.0), cplx(k, 0.0));
    }
    out.sum_rel_residual = std::abs(recon - direct) / std::max(std::abs(direct), 1e-300);
    if (out.sum_rel_residual > 1e-4)
      throw std::runtime_error(
          "det_expansion: interpolation conditioning failure (residual " +
          std::to_string(out.sum_rel_residual) + "); retry with smaller n");
  }

  // Dominant index from the root profile: the g0 roots nearest the unit
  // circle determine the branch.
  RootProfile prof = roots_at(sym, z);
  const int d = prof.on_curve ? 0 : prof.winding;
  double best = 1e300;
  bool nearest_inside = true;
  for (const auto& r : prof.roots) {
    const double gap = std::abs(std::abs(r) - 1.0);
    if (gap < best) {
      best = gap;
      nearest_inside = std::abs(r) < 1.0;
    }
  }
  int k0 = nearest_inside ? d - sym.g0() : d;
  out.k0 = std::max(0, k0);

  // |det_k| / |K(z)| with K = lead^N N^{-gamma k0} prod_{outside-block} eta^N;
  // equivalently |K| = |det-scale| of the dominant term.
  double logK = n * std::log(std::abs(prof.lead)) - gamma * out.k0 * std::log(n);
  {
    // product over the m_hat_1 + g0 largest-modulus roots
    const int nt = static_cast<int>(prof.roots.size());
    const int mhat1_g0 = std::min(nt, prof.m_minus + (nearest_inside ? sym.g0() : 0));
    int taken = 0;
    for (int i = nt - 1; i >= 0 && taken < mhat1_g0; --i, ++taken)
      logK += n * std::log(std::abs(prof.roots[static_cast<size_t>(i)]));
  }
  out.normalized_abs.resize(static_cast<size_t>(m));
  for (int k = 0; k < m; ++k)
    out.normalized_abs[static_cast<size_t>(k)] = std::exp(out.logabs_detk[static_cast<size_t>(k)] - logK);
  return out;
}

}  // namespace toepspec
