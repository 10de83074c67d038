#include "toepspec/symbol.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace toepspec {

namespace {

constexpr double kPi = std::numbers::pi;

cplx unit_point(double theta) { return cplx(std::cos(theta), std::sin(theta)); }

// Parlett-Reinsch style balancing: scale rows/columns by powers of 2 until
// their 1-norms are of comparable size.
void balance_in_place(Eigen::MatrixXcd& a) {
  const int n = static_cast<int>(a.rows());
  bool converged = false;
  for (int sweep = 0; sweep < 32 && !converged; ++sweep) {
    converged = true;
    for (int i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double f = 1.0;
      const double s = c + r;
      while (c < r / 2.0) {
        c *= 2.0;
        r /= 2.0;
        f *= 2.0;
      }
      while (c >= r * 2.0) {
        c /= 2.0;
        r *= 2.0;
        f /= 2.0;
      }
      if (c + r < 0.95 * s) {
        converged = false;
        a.col(i) *= f;
        a.row(i) /= f;
      }
    }
  }
}

// Strips whitespace.
std::string strip(const std::string& s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  return out;
}

}  // namespace

LaurentSymbol::LaurentSymbol(const std::map<int, cplx>& coeffs) {
  for (const auto& [j, a] : coeffs)
    if (a != 0.0) coeffs_[j] = a;
  if (coeffs_.empty()) throw std::invalid_argument("LaurentSymbol: no nonzero coefficients");
  n_minus_ = -coeffs_.begin()->first;
  n_plus_ = coeffs_.rbegin()->first;
  bool constant = true;
  for (const auto& [j, a] : coeffs_)
    if (j != 0) constant = false;
  if (constant) throw std::invalid_argument("LaurentSymbol: constant symbol is not allowed");
  int g = 0;
  for (const auto& [j, a] : coeffs_)
    if (j != 0) g = std::gcd(g, std::abs(j));
  g0_ = std::max(1, g);
}

cplx LaurentSymbol::coeff(int j) const {
  auto it = coeffs_.find(j);
  return it == coeffs_.end() ? cplx(0.0) : it->second;
}

cplx LaurentSymbol::eval(cplx zeta) const {
  if (zeta == 0.0) throw std::invalid_argument("LaurentSymbol::eval at zeta = 0");
  cplx sum = 0.0;
  for (const auto& [j, a] : coeffs_) sum += a * std::pow(zeta, cplx(-j, 0.0));
  return sum;
}

cplx LaurentSymbol::eval_derivative(cplx zeta) const {
  if (zeta == 0.0) throw std::invalid_argument("LaurentSymbol::eval_derivative at zeta = 0");
  cplx sum = 0.0;
  for (const auto& [j, a] : coeffs_) {
    if (j == 0) continue;
    sum += a * cplx(-j, 0.0) * std::pow(zeta, cplx(-j - 1, 0.0));
  }
  return sum;
}

LaurentSymbol LaurentSymbol::reflected() const {
  std::map<int, cplx> out;
  for (const auto& [j, a] : coeffs_) out[-j] = a;
  return LaurentSymbol(out);
}

LaurentSymbol LaurentSymbol::contracted() const {
  if (g0_ == 1) return *this;
  std::map<int, cplx> out;
  for (const auto& [j, a] : coeffs_) out[j / g0_] = a;
  return LaurentSymbol(out);
}

LaurentSymbol LaurentSymbol::shifted(cplx z) const {
  std::map<int, cplx> out = coeffs_;
  out[0] = coeff(0) - z;
  if (out[0] == 0.0) out.erase(0);
  return LaurentSymbol(out);
}

LaurentSymbol LaurentSymbol::parse(const std::string& literal) {
  const std::string s = strip(literal);
  if (s.empty()) throw std::invalid_argument("empty symbol literal");
  std::map<int, cplx> coeffs;
  size_t pos = 0;
  while (pos < s.size()) {
    double sign = 1.0;
    while (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
      if (s[pos] == '-') sign = -sign;
      ++pos;
    }
    size_t next = pos;
    int depth = 0;
    while (next < s.size()) {
      if (s[next] == '(') ++depth;
      if (s[next] == ')') --depth;
      if (depth == 0 && (s[next] == '+' || s[next] == '-') && next != pos) {
        const char prev = s[next - 1];
        // not a term break when it is an exponent or scientific-notation sign
        if (prev != '^' && prev != 'e' && prev != 'E') break;
      }
      ++next;
    }
    std::string term = s.substr(pos, next - pos);
    pos = next;

    cplx c(1.0, 0.0);
    int e = 0;
    size_t star = term.find('*');
    std::string cpart, zpart;
    if (star != std::string::npos) {
      cpart = term.substr(0, star);
      zpart = term.substr(star + 1);
    } else if (term.find('z') != std::string::npos) {
      zpart = term;
    } else {
      cpart = term;
    }
    if (!cpart.empty()) {
      if (cpart.front() == '(') {
        size_t comma = cpart.find(',');
        if (comma == std::string::npos || cpart.back() != ')')
          throw std::invalid_argument("bad complex coefficient in symbol literal: " + term);
        c = cplx(std::stod(cpart.substr(1, comma - 1)),
                 std::stod(cpart.substr(comma + 1, cpart.size() - comma - 2)));
      } else {
        c = cplx(std::stod(cpart), 0.0);
      }
    }
    if (!zpart.empty()) {
      if (zpart[0] != 'z') throw std::invalid_argument("bad term in symbol literal: " + term);
      if (zpart.size() == 1) {
        e = 1;
      } else {
        if (zpart[1] != '^') throw std::invalid_argument("bad exponent in symbol literal: " + term);
        e = std::stoi(zpart.substr(2));
      }
    }
    coeffs[-e] += sign * c;  // a term c*z^e contributes a_{-e} = c
  }
  return LaurentSymbol(coeffs);
}

std::string LaurentSymbol::to_literal() const {
  std::ostringstream os;
  bool first = true;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    const auto& [j, a] = *it;
    if (!first) os << " + ";
    first = false;
    if (a.imag() == 0.0)
      os << a.real();
    else
      os << '(' << a.real() << ',' << a.imag() << ')';
    os << "*z^" << -j;
  }
  return os.str();
}

LaurentSymbol LaurentSymbol::from_json(const nlohmann::json& j) {
  std::map<int, cplx> coeffs;
  for (const auto& t : j.at("coeffs"))
    coeffs[t.at("j").get<int>()] +=
        cplx(t.value("re", 0.0), t.value("im", 0.0));
  return LaurentSymbol(coeffs);
}

nlohmann::json LaurentSymbol::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [j, a] : coeffs_)
    arr.push_back({{"j", j}, {"re", a.real()}, {"im", a.imag()}});
  return {{"coeffs", arr}};
}

double LaurentSymbol::curve_diameter(int grid) const {
  std::vector<cplx> pts(grid);
  for (int k = 0; k < grid; ++k) pts[k] = eval(unit_point(2.0 * kPi * k / grid));
  double lo_re = 1e300, hi_re = -1e300, lo_im = 1e300, hi_im = -1e300;
  for (const auto& p : pts) {
    lo_re = std::min(lo_re, p.real());
    hi_re = std::max(hi_re, p.real());
    lo_im = std::min(lo_im, p.imag());
    hi_im = std::max(hi_im, p.imag());
  }
  return std::hypot(hi_re - lo_re, hi_im - lo_im);
}

std::vector<cplx> poly_roots(const std::vector<cplx>& coeffs_ascending) {
  std::vector<cplx> c = coeffs_ascending;
  double maxmag = 0.0;
  for (const auto& v : c) maxmag = std::max(maxmag, std::abs(v));
  if (maxmag == 0.0) throw std::invalid_argument("poly_roots: zero polynomial");
  while (!c.empty() && std::abs(c.back()) <= 1e-300 * maxmag) c.pop_back();
  const int d = static_cast<int>(c.size()) - 1;
  if (d <= 0) return {};
  if (d == 1) return {-c[0] / c[1]};

  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) comp(i, d - 1) = -c[i] / c[d];
  balance_in_place(comp);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("poly_roots: eigensolver failed");
  std::vector<cplx> roots(es.eigenvalues().data(), es.eigenvalues().data() + d);
  return roots;
}

std::vector<cplx> RootProfile::eta() const {
  std::vector<cplx> out;
  out.reserve(roots.size());
  for (auto it = roots.rbegin(); it != roots.rend(); ++it) out.push_back(-*it);
  return out;
}

std::vector<cplx> RootProfile::inside() const {
  std::vector<cplx> out;
  for (size_t i = 0; i < roots.size() && static_cast<int>(i) < m_plus; ++i) out.push_back(roots[i]);
  return out;
}

std::vector<cplx> RootProfile::outside() const {
  std::vector<cplx> out;
  for (size_t i = m_plus; i < roots.size(); ++i) out.push_back(roots[i]);
  return out;
}

double RootProfile::min_root_gap() const {
  double g = 1e300;
  for (size_t i = 0; i < roots.size(); ++i)
    for (size_t j = i + 1; j < roots.size(); ++j) g = std::min(g, std::abs(roots[i] - roots[j]));
  return g;
}

RootProfile roots_at(const LaurentSymbol& sym, cplx z, const RootThresholds& th) {
  RootProfile out;
  out.z = z;

  // Coefficients of p - z over the (possibly extended) band.
  std::map<int, cplx> c = sym.coeffs();
  c[0] = sym.coeff(0) - z;
  int jmin = 0, jmax = 0;
  bool any = false;
  for (const auto& [j, a] : c) {
    if (a == 0.0) continue;
    jmin = any ? std::min(jmin, j) : j;
    jmax = any ? std::max(jmax, j) : j;
    any = true;
  }
  if (!any) throw std::runtime_error("identically zero symbol at z");
  bool only_const = (jmin == 0 && jmax == 0);
  if (only_const) throw std::runtime_error("identically zero symbol at z");  // cannot happen for valid symbols

  out.eff_plus = jmax;
  out.eff_minus = -jmin;

  // zeta^(eff_plus v 0) * (p - z) as an ascending polynomial in zeta.
  const int shift = std::max(out.eff_plus, 0);
  const int deg_hi = shift + out.eff_minus;  // power of the a_{-N-} term
  std::vector<cplx> poly(static_cast<size_t>(std::max(deg_hi, shift - jmin)) + 1, cplx(0.0));
  for (const auto& [j, a] : c) {
    if (a == 0.0) continue;
    poly.at(static_cast<size_t>(shift - j)) += a;
  }
  while (!poly.empty() && poly.back() == 0.0) poly.pop_back();
  out.lead = poly.back();

  const int total = std::max(out.eff_plus, 0) + std::max(out.eff_minus, 0);
  const int deg = static_cast<int>(poly.size()) - 1;
  out.m_inf = total - deg;

  // Explicit zero roots (trailing zero coefficients) factored out first:
  // the companion solver handles them, but exact zeros keep Case 2 clean.
  std::vector<cplx> work = poly;
  while (work.size() > 1 && work.front() == 0.0) {
    ++out.m_zero;
    work.erase(work.begin());
  }
  std::vector<cplx> finite = poly_roots(work);
  finite.insert(finite.end(), static_cast<size_t>(out.m_zero), cplx(0.0));

  std::sort(finite.begin(), finite.end(), [](const cplx& a, const cplx& b) {
    double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma < mb;
    return std::arg(a) < std::arg(b);
  });
  out.roots = std::move(finite);

  for (const auto& r : out.roots) {
    const double m = std::abs(r);
    if (std::abs(m - 1.0) <= th.tau_circle) out.on_curve = true;
    if (m < 1.0)
      ++out.m_plus;
    else if (m > 1.0)
      ++out.m_minus;
    else
      out.on_curve = true;
  }
  out.m_minus += out.m_inf;

  if (!out.on_curve) out.winding = out.m_plus - std::max(out.eff_plus, 0);

  for (const auto& r : out.roots) {
    const double m = std::abs(r);
    if (m < 1.0 && m > 1.0 - th.kappa) ++out.m0_plus;
    if (m > 1.0 && m < 1.0 / (1.0 - th.kappa)) ++out.m0_minus;
  }
  return out;
}

int winding_number(const LaurentSymbol& sym, cplx z, const RootThresholds& th) {
  RootProfile p = roots_at(sym, z, th);
  if (p.on_curve) throw std::runtime_error("winding undefined on spectral curve");
  return p.winding;
}

int winding_number_contour(const LaurentSymbol& sym, cplx z, int grid) {
  double total = 0.0;
  cplx prev = sym.eval(unit_point(0.0)) - z;
  for (int k = 1; k <= grid; ++k) {
    cplx cur = sym.eval(unit_point(2.0 * kPi * k / grid)) - z;
    total += std::arg(cur / prev);
    prev = cur;
  }
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

double log_potential(const LaurentSymbol& sym, cplx z, const RootThresholds& th) {
  RootProfile p = roots_at(sym, z, th);
  if (p.on_curve) throw std::runtime_error("log potential undefined on spectral curve");
  double phi = std::log(std::abs(p.lead));
  for (const auto& r : p.roots) {
    const double m = std::abs(r);
    if (m > 1.0) phi += std::log(m);
  }
  return phi;
}

double log_potential_quadrature(const LaurentSymbol& sym, cplx z, int nodes) {
  double sum = 0.0;
  for (int k = 0; k < nodes; ++k)
    sum += std::log(std::abs(z - sym.eval(unit_point(2.0 * kPi * k / nodes))));
  return sum / nodes;
}

double dist_to_curve(const LaurentSymbol& sym, cplx z, int grid) {
  if (grid < 8) throw std::invalid_argument("dist_to_curve: grid too small");
  auto f = [&](double theta) { return std::abs(z - sym.eval(unit_point(theta))); };
  double best = 1e300;
  int best_k = 0;
  const double h = 2.0 * kPi / grid;
  for (int k = 0; k < grid; ++k) {
    const double v = f(k * h);
    if (v < best) {
      best = v;
      best_k = k;
    }
  }
  // Golden-section refinement on the bracketing interval.
  double a = (best_k - 1) * h, b = (best_k + 1) * h;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    }
  }
  return std::min(best, std::min(f1, f2));
}

double BadSets::dist_to(cplx z) const {
  double d = 1e300;
  for (const auto& w : b1) d = std::min(d, std::abs(z - w));
  for (const auto& w : b2) d = std::min(d, std::abs(z - w));
  return d;
}

namespace {

// Two-variable Newton for q(e^{i t1}) = q(e^{i t2}); returns residual.
double newton_self_intersection(const LaurentSymbol& q, double& t1, double& t2, int max_iter) {
  for (int it = 0; it < max_iter; ++it) {
    const cplx z1 = unit_point(t1), z2 = unit_point(t2);
    const cplx F = q.eval(z1) - q.eval(z2);
    if (std::abs(F) < 1e-13) return std::abs(F);
    // d/dt q(e^{it}) = i e^{it} q'(e^{it})
    const cplx d1 = cplx(0, 1) * z1 * q.eval_derivative(z1);
    const cplx d2 = -cplx(0, 1) * z2 * q.eval_derivative(z2);
    Eigen::Matrix2d J;
    J << d1.real(), d2.real(), d1.imag(), d2.imag();
    Eigen::Vector2d rhs(-F.real(), -F.imag());
    Eigen::Vector2d step = J.fullPivLu().solve(rhs);
    if (!step.allFinite()) break;
    t1 += step(0);
    t2 += step(1);
  }
  return std::abs(q.eval(unit_point(t1)) - q.eval(unit_point(t2)));
}

bool segments_intersect(cplx a, cplx b, cplx c, cplx d) {
  auto cross = [](cplx u, cplx v) { return u.real() * v.imag() - u.imag() * v.real(); };
  const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

}  // namespace

BadSets bad_sets(const LaurentSymbol& sym, double radius) {
  if (radius <= 0.0) throw std::invalid_argument("bad_sets: radius must be positive");
  BadSets out;
  out.radius = radius;

  // Branch points: critical values p(zeta*) at finite nonzero roots of p'.
  {
    const int npl = std::max(sym.n_plus(), 0);
    std::vector<cplx> dpoly(static_cast<size_t>(npl + std::max(sym.n_minus(), 0)) + 2, cplx(0.0));
    bool nonzero = false;
    for (const auto& [j, a] : sym.coeffs()) {
      if (j == 0) continue;
      // zeta^{N+ + 1} p'(zeta) = sum_j (-j a_j) zeta^{N+ - j}
      const int pow = npl - j;
      if (pow >= 0 && pow < static_cast<int>(dpoly.size())) {
        dpoly[static_cast<size_t>(pow)] += cplx(-j, 0.0) * a;
        nonzero = true;
      }
    }
    if (nonzero) {
      while (!dpoly.empty() && dpoly.back() == 0.0) dpoly.pop_back();
      std::vector<cplx> crit;
      if (dpoly.size() > 1) crit = poly_roots(dpoly);
      for (const auto& zeta : crit) {
        if (std::abs(zeta) < 1e-12) continue;
        const cplx w = sym.eval(zeta);
        bool dup = false;
        for (const auto& u : out.b2)
          if (std::abs(u - w) < radius / 10.0) dup = true;
        if (!dup) out.b2.push_back(w);
      }
    }
  }

  // Self intersections of q_p(S^1), located on a theta grid by a
  // segment-intersection sweep and polished with Newton.
  const LaurentSymbol q = sym.contracted();
  const int M = 4096;
  std::vector<cplx> pts(M + 1);
  for (int k = 0; k <= M; ++k) pts[k] = q.eval(unit_point(2.0 * kPi * k / M));

  std::vector<std::pair<double, double>> candidates;
  for (int i = 0; i < M; ++i) {
    const double xlo = std::min(pts[i].real(), pts[i + 1].real());
    const double xhi = std::max(pts[i].real(), pts[i + 1].real());
    for (int j = i + 2; j < M; ++j) {
      if (i == 0 && j == M - 1) continue;  // adjacent through wrap-around
      if (std::min(pts[j].real(), pts[j + 1].real()) > xhi) continue;
      if (std::max(pts[j].real(), pts[j + 1].real()) < xlo) continue;
      if (segments_intersect(pts[i], pts[i + 1], pts[j], pts[j + 1]))
        candidates.emplace_back(2.0 * kPi * (i + 0.5) / M, 2.0 * kPi * (j + 0.5) / M);
    }
  }
  for (auto [t1, t2] : candidates) {
    const double res = newton_self_intersection(q, t1, t2, 100);
    // Discard spurious pairs that collapsed onto the same preimage.
    if (std::abs(unit_point(t1) - unit_point(t2)) < 1e-6) continue;
    const cplx w = q.eval(unit_point(t1));
    if (res > 1e-8) {
      out.unrefined.emplace_back(w, res);
      continue;
    }
    bool dup = false;
    for (const auto& u : out.b1)
      if (std::abs(u - w) < radius / 10.0) dup = true;
    if (!dup) out.b1.push_back(w);
  }
  return out;
}

}  // namespace toepspec
