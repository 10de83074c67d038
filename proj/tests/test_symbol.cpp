#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "toepspec/symbol.hpp"

using namespace toepspec;

namespace {

LaurentSymbol jordan() { return LaurentSymbol::parse("1*z^1"); }
LaurentSymbol limacon() { return LaurentSymbol::parse("1*z^1 + 1*z^2"); }

LaurentSymbol random_symbol(std::mt19937_64& gen, int n_minus, int n_plus) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::map<int, cplx> c;
  for (int j = -n_minus; j <= n_plus; ++j) c[j] = cplx(u(gen), u(gen));
  // force band endpoints
  c[-n_minus] += cplx(1.5, 0.0);
  c[n_plus] += cplx(0.0, 1.5);
  return LaurentSymbol(c);
}

}  // namespace

TEST_SUITE_BEGIN("symbol");

TEST_CASE("literal parsing round trip and band data") {
  const LaurentSymbol lim = limacon();
  CHECK(lim.n_minus() == 2);
  CHECK(lim.n_plus() == -1);
  CHECK(lim.coeff(-1) == cplx(1.0, 0.0));
  CHECK(lim.coeff(-2) == cplx(1.0, 0.0));
  CHECK(lim.g0() == 1);

  const LaurentSymbol again = LaurentSymbol::parse(lim.to_literal());
  CHECK(again.coeffs() == lim.coeffs());

  const LaurentSymbol mixed = LaurentSymbol::parse("0.5*z^-2 + (0,1)*z^3 - 2");
  CHECK(mixed.coeff(2) == cplx(0.5, 0.0));
  CHECK(mixed.coeff(-3) == cplx(0.0, 1.0));
  CHECK(mixed.coeff(0) == cplx(-2.0, 0.0));

  const LaurentSymbol viaj = LaurentSymbol::from_json(mixed.to_json());
  CHECK(viaj.coeffs() == mixed.coeffs());

  CHECK(LaurentSymbol::parse("1*z^3").g0() == 3);
  CHECK(LaurentSymbol::parse("1*z^2 + 1*z^-4").g0() == 2);
  CHECK_THROWS(LaurentSymbol::parse("3"));  // constant symbol
}

TEST_CASE("evaluation identity on random points") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const LaurentSymbol sym = random_symbol(gen, 2, 3);
  for (int k = 0; k < 20; ++k) {
    const cplx zeta(u(gen) + 1.5, u(gen));
    cplx direct = 0.0;
    for (const auto& [j, a] : sym.coeffs()) direct += a * std::pow(zeta, cplx(-j, 0));
    CHECK(std::abs(sym.eval(zeta) - direct) <= 1e-12 * std::abs(direct));
  }
}

TEST_CASE("roots_at on the linear symbol") {
  const RootProfile p = roots_at(jordan(), cplx(0.5, 0.0));
  REQUIRE(p.roots.size() == 1);
  CHECK(std::abs(p.roots[0] - cplx(0.5, 0.0)) < 1e-12);
  CHECK(p.m_plus == 1);
  CHECK(p.m_minus == 0);
  CHECK(p.winding == 1);
  CHECK(!p.on_curve);
}

TEST_CASE("roots_at flags curve points") {
  const RootProfile p = roots_at(limacon(), cplx(0.0, 0.0));
  REQUIRE(p.roots.size() == 2);
  CHECK(std::abs(p.roots[0]) < 1e-12);           // root at 0
  CHECK(std::abs(p.roots[1] + 1.0) < 1e-12);     // root at -1
  CHECK(p.on_curve);                             // |-1| = 1
}

TEST_CASE("product reconstruction for random symbols") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 25; ++rep) {
    const LaurentSymbol sym = random_symbol(gen, 2, 3);
    const cplx z(u(gen), u(gen));
    const RootProfile p = roots_at(sym, z);
    // expand lead * prod (zeta - root) and compare against the shifted
    // coefficients of zeta^(N+ v 0) (p - z)
    std::vector<cplx> poly{1.0};
    for (const cplx& r : p.roots) {
      std::vector<cplx> next(poly.size() + 1, cplx(0.0));
      for (size_t i = 0; i < poly.size(); ++i) {
        next[i + 1] += poly[i];
        next[i] -= r * poly[i];
      }
      poly = next;
    }
    const int shift = std::max(p.eff_plus, 0);
    double worst = 0.0;
    for (size_t k = 0; k < poly.size(); ++k) {
      const int j = shift - static_cast<int>(k);
      const cplx expect = sym.coeff(j) - (j == 0 ? z : cplx(0.0));
      worst = std::max(worst, std::abs(p.lead * poly[k] - expect));
    }
    CHECK(worst <= 1e-8);
    CHECK(p.m_plus + p.m_minus ==
          std::max(p.eff_plus, 0) + std::max(p.eff_minus, 0));
  }
}

TEST_CASE("winding numbers: linear and limacon loops") {
  CHECK(winding_number(jordan(), cplx(0.0, 0.0)) == 1);
  CHECK(winding_number(jordan(), cplx(2.0, 0.0)) == 0);
  // limacon: d = 2 inside the inner loop, 1 in the larger loop, 0 outside
  CHECK(winding_number(limacon(), cplx(-0.3, 0.0)) == 2);
  CHECK(winding_number(limacon(), cplx(1.0, 0.0)) == 1);
  CHECK(winding_number(limacon(), cplx(3.0, 0.0)) == 0);
  CHECK_THROWS_WITH_AS(winding_number(limacon(), cplx(0.0, 0.0)),
                       "winding undefined on spectral curve", std::runtime_error);
}

TEST_CASE("winding consistency against the contour integral") {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int tested = 0;
  while (tested < 100) {
    const LaurentSymbol sym = random_symbol(gen, 1 + tested % 3, 1 + tested % 2);
    const cplx z(u(gen), u(gen));
    RootProfile p = roots_at(sym, z);
    if (p.on_curve) continue;
    if (dist_to_curve(sym, z, 512) < 1e-3) continue;  // grid contour needs margin
    CHECK(p.winding == winding_number_contour(sym, z));
    ++tested;
  }
}

TEST_CASE("g0 structure: roots come in g0 tuples of equal modulus") {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    std::map<int, cplx> c;
    c[-2] = cplx(u(gen) + 1.2, u(gen));
    c[2] = cplx(u(gen), u(gen) + 1.2);
    c[0] = cplx(u(gen), u(gen));
    const LaurentSymbol sym(c);
    REQUIRE(sym.g0() == 2);
    const cplx z(u(gen) * 2.0, u(gen) * 2.0);
    const RootProfile p = roots_at(sym, z);
    REQUIRE(p.roots.size() % 2 == 0);
    for (size_t i = 0; i + 1 < p.roots.size(); i += 2)
      CHECK(std::abs(std::abs(p.roots[i]) - std::abs(p.roots[i + 1])) <= 1e-8);
  }
}

TEST_CASE("log potential closed form") {
  CHECK(std::abs(log_potential(jordan(), cplx(0.0, 0.0))) < 1e-12);
  CHECK(log_potential(jordan(), cplx(2.0, 0.0)) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  // independent quadrature oracle
  const double closed = log_potential(limacon(), cplx(3.0, 0.0));
  const double quad = log_potential_quadrature(limacon(), cplx(3.0, 0.0));
  CHECK(std::abs(closed - quad) < 1e-8);

  std::mt19937_64 gen(101);
  std::uniform_real_distribution<double> u(-2.5, 2.5);
  int tested = 0;
  while (tested < 20) {
    const LaurentSymbol sym = random_symbol(gen, 2, 2);
    const cplx z(u(gen), u(gen));
    RootProfile p = roots_at(sym, z);
    if (p.on_curve || dist_to_curve(sym, z, 512) < 5e-2) continue;
    CHECK(std::abs(log_potential(sym, z) - log_potential_quadrature(sym, z)) < 1e-8);
    ++tested;
  }
}

TEST_CASE("log potential is harmonic off the curve") {
  const LaurentSymbol sym = limacon();
  const double h = 1e-3;
  for (const cplx z : {cplx(0.9, 0.4), cplx(3.0, 1.0), cplx(-0.25, 0.05)}) {
    const double lap = (log_potential(sym, z + cplx(h, 0)) + log_potential(sym, z - cplx(h, 0)) +
                        log_potential(sym, z + cplx(0, h)) + log_potential(sym, z - cplx(0, h)) -
                        4.0 * log_potential(sym, z)) /
                       (h * h);
    CHECK(std::abs(lap) * h * h <= 1e-4);
  }
}

TEST_CASE("distance to curve") {
  CHECK(dist_to_curve(jordan(), cplx(0.0, 0.0)) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(dist_to_curve(jordan(), cplx(1.5, 0.0)) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(dist_to_curve(limacon(), cplx(0.0, 0.0)) < 1e-9);  // p(-1) = 0 on curve
  // refinement keeps the value stable under grid doubling
  const cplx z(0.7, 0.35);
  const double d1 = dist_to_curve(limacon(), z, 256);
  const double d2 = dist_to_curve(limacon(), z, 512);
  const double d3 = dist_to_curve(limacon(), z, 1024);
  CHECK(d2 <= d1 + 1e-12);
  CHECK(d3 <= d2 + 1e-12);
}

TEST_CASE("bad sets of the simplest symbols") {
  const BadSets lin = bad_sets(jordan(), 0.05);
  CHECK(lin.b1.empty());
  CHECK(lin.b2.empty());

  // limacon: p'( -1/2 ) = 0, critical value p(-1/2) = -1/4
  const BadSets lim = bad_sets(limacon(), 0.1);
  REQUIRE(lim.b2.size() == 1);
  CHECK(std::abs(lim.b2[0] - cplx(-0.25, 0.0)) < 1e-10);
  REQUIRE(lim.b1.size() == 1);
  // the self intersection is cross-checked by brute force below

  // z^3 contracts to a circle: no self intersections after contraction
  const BadSets cube = bad_sets(LaurentSymbol::parse("1*z^3"), 0.05);
  CHECK(cube.b1.empty());
}

TEST_CASE("limacon self intersection against a brute-force grid oracle") {
  const LaurentSymbol sym = limacon();
  auto point = [&](double t) { return sym.eval(cplx(std::cos(t), std::sin(t))); };
  // oracle: scan pairs (t1, t2) on a fine grid for |p(t1) - p(t2)| minima
  const int M = 2000;
  double best = 1e300;
  cplx where;
  for (int i = 0; i < M; ++i) {
    for (int j = i + 40; j < M; ++j) {
      if ((i == 0) && (j > M - 40)) continue;
      const double t1 = 2 * std::numbers::pi * i / M, t2 = 2 * std::numbers::pi * j / M;
      const double v = std::abs(point(t1) - point(t2));
      if (v < best) {
        best = v;
        where = point(t1);
      }
    }
  }
  const BadSets bs = bad_sets(sym, 0.1);
  REQUIRE(bs.b1.size() == 1);
  CHECK(std::abs(bs.b1[0] - where) < 1e-2);
  // refined b1 point has two distinct unit-modulus preimage parameters
  // (residual from the Newton polish is recorded only on failure)
  CHECK(bs.unrefined.empty());
}

TEST_CASE("branch point criterion: nearest roots collide along a ray") {
  const LaurentSymbol sym = limacon();
  const cplx b2(-0.25, 0.0);
  double prev = 1e300;
  for (int k = 1; k <= 5; ++k) {
    const cplx z = b2 + cplx(0.05, 0.03) * (6.0 - k) / 5.0;
    const RootProfile p = roots_at(sym, z);
    CHECK(p.roots.size() == 2);
    const double gap = std::abs(p.roots[0] - p.roots[1]);
    CHECK(gap < prev);
    prev = gap;
  }
}

TEST_SUITE_END();
