#include "toepspec/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace toepspec {

namespace {
constexpr double kPi = std::numbers::pi;
cplx unit_point(double theta) { return cplx(std::cos(theta), std::sin(theta)); }
}  // namespace

TubeSpec TubeSpec::hatted(int d, int branch, double eps0, double gamma_prime, int N) {
  TubeSpec s;
  s.d = d;
  s.branch = branch;
  s.eps0 = eps0;
  s.eps0_prime = (gamma_prime - 1.0) * std::log(static_cast<double>(N)) / N;
  return s;
}

namespace {

// Sorted non-increasing moduli with the conventions |eta_0| = +inf and
// |eta_{m+1}| = 0 for out-of-range indices (1-based access).
struct ModView {
  std::vector<double> mods;
  double at(int i) const {
    if (i <= 0) return std::numeric_limits<double>::infinity();
    if (i > static_cast<int>(mods.size())) return 0.0;
    return mods[static_cast<size_t>(i - 1)];
  }
  double inv_at(int i) const {
    const double v = at(i);
    return v == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / v;
  }
};

// Pattern A: the g0 inside roots nearest the circle pinch against it.
bool pattern_a(const ModView& v, int m_minus, int g0, double eps0, double eps0p,
               TubeWitness& w) {
  const double away = std::max(v.at(m_minus + g0 + 1), v.inv_at(m_minus));
  w.sep = away;
  w.slow_lo = v.at(m_minus + g0);
  w.slow_hi = v.at(m_minus + 1);
  return away <= 1.0 - eps0 && 1.0 - eps0p <= w.slow_lo && w.slow_lo <= w.slow_hi &&
         w.slow_hi <= 1.0;
}

// Pattern B: the g0 outside roots nearest the circle pinch against it.
bool pattern_b(const ModView& v, int m_minus, int g0, double eps0, double eps0p,
               TubeWitness& w) {
  const double away = std::max(v.at(m_minus + 1), v.inv_at(m_minus - g0));
  w.sep = away;
  w.slow_lo = v.inv_at(m_minus - g0 + 1);
  w.slow_hi = v.inv_at(m_minus);
  return away <= 1.0 - eps0 && 1.0 - eps0p <= w.slow_lo && w.slow_lo <= w.slow_hi &&
         w.slow_hi <= 1.0;
}

}  // namespace

TubeWitness tube_membership(const TubeSpec& spec, const LaurentSymbol& sym, cplx z) {
  if (!(spec.eps0_prime > 0.0 && spec.eps0_prime < spec.eps0))
    throw std::invalid_argument("tube_membership: need 0 < eps0' < eps0");
  TubeWitness w;

  // Normalize to the N- >= 1 form used by the tube definition; the
  // reflection flips the winding sign but preserves the branch label.
  LaurentSymbol work = sym;
  RootProfile prof = roots_at(work, z);
  int want_d = spec.d;
  if (prof.eff_minus < 1) {
    work = sym.reflected();
    prof = roots_at(work, z);
    want_d = -want_d;
  }
  if (prof.m_zero > 0 || prof.m_inf > 0) return w;  // degenerate root pattern, not in any tube

  w.d_actual = prof.on_curve ? 0 : prof.winding;
  if (!prof.on_curve && prof.winding != want_d) return w;
  if (prof.on_curve) {
    // Tube closures include curve points; the counts m_plus/m_minus are
    // taken from the root pattern with on-circle roots counted inside.
    const int total = static_cast<int>(prof.roots.size());
    int strict_out = 0;
    for (const auto& r : prof.roots)
      if (std::abs(r) > 1.0) ++strict_out;
    const int d_closure = (total - strict_out) - std::max(prof.eff_plus, 0);
    if (d_closure != want_d) return w;
  }

  ModView view;
  view.mods.reserve(prof.roots.size());
  for (auto it = prof.roots.rbegin(); it != prof.roots.rend(); ++it)
    view.mods.push_back(std::abs(*it));
  int m_minus = 0;
  for (double m : view.mods)
    if (m > 1.0) ++m_minus;
  const int g0 = work.g0();

  bool member;
  if (want_d > 0)
    member = spec.branch == 1 ? pattern_a(view, m_minus, g0, spec.eps0, spec.eps0_prime, w)
                              : pattern_b(view, m_minus, g0, spec.eps0, spec.eps0_prime, w);
  else if (want_d < 0)
    member = spec.branch == 1 ? pattern_b(view, m_minus, g0, spec.eps0, spec.eps0_prime, w)
                              : pattern_a(view, m_minus, g0, spec.eps0, spec.eps0_prime, w);
  else
    member = spec.branch == 2 && pattern_b(view, m_minus, g0, spec.eps0, spec.eps0_prime, w);
  w.member = member;
  return w;
}

double dist_to_curve_off_bad(const LaurentSymbol& sym, const BadSets& bad, cplx z, int grid) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < grid; ++k) {
    const cplx w = sym.eval(unit_point(2.0 * kPi * k / grid));
    if (bad.in_blowup(w)) continue;
    best = std::min(best, std::abs(z - w));
  }
  return best;
}

bool good_region_test(const GoodRegion& gr, const LaurentSymbol& sym, const BadSets& bad,
                      cplx z) {
  if (gr.N < 3) throw std::invalid_argument("good_region_test: N too small");
  const double scale = std::log(static_cast<double>(gr.N)) / gr.N;
  const double dist = dist_to_curve_off_bad(sym, bad, z, 2048);
  if (!(dist > scale / gr.C && dist < scale * gr.C)) return false;
  RootProfile prof = roots_at(sym, z);
  return !prof.on_curve && prof.winding != 0;
}

double root_derivative_sup(const LaurentSymbol& sym, const BadSets& bad, double eps_tilde,
                           int grid, double step) {
  // Matched finite differences of the root multiset along a curve
  // neighborhood, excluding B2 blow-ups where roots collide.
  double sup = 0.0;
  for (int k = 0; k < grid; ++k) {
    const cplx z0 = sym.eval(unit_point(2.0 * kPi * k / grid));
    for (double off : {-0.5 * eps_tilde, 0.0, 0.5 * eps_tilde}) {
      const cplx z = z0 + cplx(off, off / 2.0);
      bool near_b2 = false;
      for (const auto& w : bad.b2)
        if (std::abs(z - w) < eps_tilde) near_b2 = true;
      if (near_b2) continue;
      RootProfile p0, p1;
      try {
        p0 = roots_at(sym, z);
        p1 = roots_at(sym, z + step);
      } catch (const std::exception&) {
        continue;
      }
      if (p0.roots.size() != p1.roots.size()) continue;
      // Greedy nearest matching between the two root sets.
      std::vector<bool> used(p1.roots.size(), false);
      for (const auto& r : p0.roots) {
        double bd = std::numeric_limits<double>::infinity();
        size_t bj = 0;
        for (size_t j = 0; j < p1.roots.size(); ++j) {
          if (used[j]) continue;
          const double dd = std::abs(p1.roots[j] - r);
          if (dd < bd) {
            bd = dd;
            bj = j;
          }
        }
        used[bj] = true;
        sup = std::max(sup, bd / step);
      }
    }
  }
  return sup;
}

LocationStats location_stats(const std::vector<cplx>& eigs, const LaurentSymbol& sym,
                             const BadSets& bad, const LocationParams& params) {
  LocationStats out;
  out.n_total = static_cast<int>(eigs.size());
  const double scale = std::log(static_cast<double>(params.N)) / params.N;
  const double sup = root_derivative_sup(sym, bad, params.eps_tilde0);
  out.c_hat = sup > 0 ? (params.gamma_prime - 1.0) / sup : 0.0;
  out.min_dist_off_bad = std::numeric_limits<double>::infinity();

  for (const cplx& lam : eigs) {
    EigenvalueRecord rec;
    rec.lambda = lam;
    rec.dist = dist_to_curve_off_bad(sym, bad, lam, 2048);
    rec.dist_scaled = rec.dist / scale;
    rec.near_bad = bad.dist_to(lam) < params.eps_tilde0;
    try {
      rec.winding = winding_number(sym, lam);
    } catch (const std::exception&) {
      rec.winding = 0;
    }
    if (good_region_test(params.good, sym, bad, lam)) {
      rec.cls = 0;
      ++out.n_good;
    } else if (!rec.near_bad && rec.dist < out.c_hat * scale) {
      rec.cls = 1;  // inside the forbidden collar
      ++out.n_forbidden;
    } else {
      rec.cls = 2;
      ++out.n_other;
    }
    if (!rec.near_bad) out.min_dist_off_bad = std::min(out.min_dist_off_bad, rec.dist);
    out.records.push_back(rec);
  }
  out.min_dist_scaled = out.min_dist_off_bad / scale;
  return out;
}

double jensen_integral(const std::function<cplx(cplx)>& f, cplx center, double r, int nodes) {
  double sum = 0.0;
  for (int k = 0; k < nodes; ++k)
    sum += std::log(std::abs(f(center + r * unit_point(2.0 * kPi * k / nodes))));
  return sum / nodes - std::log(std::abs(f(center)));
}

double jensen_count(const std::function<cplx(cplx)>& f, cplx center, double r, double u,
                    int nodes) {
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("jensen_count: u in (0,1)");
  const double fc = std::abs(f(center));
  if (fc < 1e-300) throw std::runtime_error("jensen_count: f vanishes at the center");
  double sum = 0.0;
  for (int k = 0; k < nodes; ++k)
    sum += std::log(std::abs(f(center + r * unit_point(2.0 * kPi * k / nodes))));
  sum /= nodes;
  return (sum - std::log(fc)) / (1.0 - u);
}

}  // namespace toepspec
