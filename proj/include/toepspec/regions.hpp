#pragma once

#include <functional>
#include <vector>

#include "toepspec/symbol.hpp"

namespace toepspec {

/// Forbidden tube T^{d,(s)} parameters; the hatted tubes use
/// eps0_prime = (gamma' - 1) log N / N.
struct TubeSpec {
  int d = 0;
  int branch = 1;  // 1 or 2
  double eps0 = 0.1;
  double eps0_prime = 0.0125;  // default eps0 / 8

  static TubeSpec hatted(int d, int branch, double eps0, double gamma_prime, int N);
};

struct TubeWitness {
  bool member = false;
  int d_actual = 0;       // winding at z (0 on the curve)
  double slow_lo = 0.0;   // modulus bound closest to 1 - eps0_prime
  double slow_hi = 0.0;   // modulus bound closest to 1
  double sep = 0.0;       // max of the away-from-circle moduli tested vs 1 - eps0
};

/// Membership via the sorted root-modulus inequalities of the eta view.
TubeWitness tube_membership(const TubeSpec& spec, const LaurentSymbol& sym, cplx z);

/// Omega(epsilon, C, N): points with curve distance (off bad-set
/// blow-ups) strictly between C^{-1} log N / N and C log N / N and
/// nonzero winding.
struct GoodRegion {
  double epsilon = 0.05;
  double C = 4.0;
  int N = 0;
};

bool good_region_test(const GoodRegion& gr, const LaurentSymbol& sym, const BadSets& bad, cplx z);

/// Distance from z to the part of p(S^1) outside the bad-set blow-ups.
double dist_to_curve_off_bad(const LaurentSymbol& sym, const BadSets& bad, cplx z,
                             int grid = 2048);

struct LocationParams {
  int N = 0;
  double gamma_prime = 1.25;
  double eps0 = 0.1;
  double eps_tilde0 = 0.05;
  GoodRegion good;
};

struct EigenvalueRecord {
  cplx lambda;
  int cls = 0;  // 0 good, 1 forbidden, 2 other
  double dist = 0.0;        // curve distance off bad sets
  double dist_scaled = 0.0;  // dist * N / log N
  int winding = 0;
  bool near_bad = false;
};

struct LocationStats {
  int n_total = 0, n_good = 0, n_forbidden = 0, n_other = 0;
  double min_dist_off_bad = 0.0;     // over eigenvalues away from bad sets
  double min_dist_scaled = 0.0;      // same in units of log N / N
  double c_hat = 0.0;                // empirical (gamma'-1)/sup|d eta/dz|
  std::vector<EigenvalueRecord> records;
};

LocationStats location_stats(const std::vector<cplx>& eigs, const LaurentSymbol& sym,
                             const BadSets& bad, const LocationParams& params);

/// Empirical sup over a curve neighborhood (off B2 blow-ups) of the
/// largest root-derivative modulus, by matched finite differences.
double root_derivative_sup(const LaurentSymbol& sym, const BadSets& bad, double eps_tilde,
                           int grid = 512, double step = 1e-4);

/// Jensen bound on the number of zeros of f in D(center, u*r):
///   n_f(center, u r) <= (1/(2(1-u)pi)) int log|f(center + r e^{it})| dt
///                       - log|f(center)| / (1-u).
double jensen_count(const std::function<cplx(cplx)>& f, cplx center, double r, double u,
                    int nodes = 4096);

/// Exact Jensen identity left/right sides for analytic f with no zeros on
/// the circle (test oracle): returns the quadrature value of
/// (1/2pi) int log|f(center + r e^{it})| dt - log|f(center)|.
double jensen_integral(const std::function<cplx(cplx)>& f, cplx center, double r,
                       int nodes = 4096);

}  // namespace toepspec
