#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace toepspec {

using cplx = std::complex<double>;

/// Finite-band Laurent symbol p(zeta) = sum_{j=-N-}^{N+} a_j zeta^{-j}.
///
/// Band endpoints must be realized (a_{N+} != 0, a_{-N-} != 0) and the
/// symbol must be non-constant. Coefficients a_j with j > 0 populate the
/// subdiagonals of the associated Toeplitz matrix, j < 0 the superdiagonals.
class LaurentSymbol {
 public:
  explicit LaurentSymbol(const std::map<int, cplx>& coeffs);

  /// Parses a term list like "1*z^1 + 1*z^2" or "0.5*z^-2 + (0,1)*z^3".
  /// A term c*z^e contributes a_{-e} = c, so that z acts as the generator
  /// of the superdiagonal shift (z^1 is the Jordan block symbol).
  static LaurentSymbol parse(const std::string& literal);

  /// JSON schema {"coeffs": [{"j": int, "re": float, "im": float}]}.
  static LaurentSymbol from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  std::string to_literal() const;

  int n_plus() const { return n_plus_; }
  int n_minus() const { return n_minus_; }
  int g0() const { return g0_; }
  int bandwidth() const { return (n_plus_ > 0 ? n_plus_ : 0) + (n_minus_ > 0 ? n_minus_ : 0); }

  /// a_j (zero outside the band).
  cplx coeff(int j) const;
  const std::map<int, cplx>& coeffs() const { return coeffs_; }

  cplx eval(cplx zeta) const;
  cplx eval_derivative(cplx zeta) const;

  /// p(1/zeta); transposes the associated Toeplitz matrix.
  LaurentSymbol reflected() const;
  /// q_p with p(zeta) = q_p(zeta^{g0}). Identity when g0 == 1.
  LaurentSymbol contracted() const;
  /// p - z. The band of the result may differ from this symbol's band
  /// (j = 0 enters or leaves).
  LaurentSymbol shifted(cplx z) const;

  /// max pairwise distance over a theta grid of the curve p(S^1).
  double curve_diameter(int grid = 1024) const;

 private:
  std::map<int, cplx> coeffs_;
  int n_plus_ = 0, n_minus_ = 0, g0_ = 1;
};

/// Classification thresholds shared by the root and singular-value modules.
struct RootThresholds {
  double tau_circle = 1e-9;  // relative "on unit circle" tolerance
  double kappa = 0.2;        // |zeta| <= 1 - kappa  =>  fast decay class
};

/// Roots of p(zeta) - z = 0 over the Riemann sphere with the bookkeeping
/// used throughout: counts inside/outside the unit circle, multiplicities
/// at 0 and infinity, winding number, decay split.
struct RootProfile {
  cplx z{};
  /// Finite roots, sorted by non-decreasing modulus, ties broken by
  /// non-decreasing principal argument. Roots at 0 (if any) come first.
  std::vector<cplx> roots;
  int m_inf = 0;    // multiplicity of the root at infinity
  int m_zero = 0;   // multiplicity of the root at zero
  int m_plus = 0;   // roots in the open unit disc (zeros included)
  int m_minus = 0;  // roots outside the closed disc (infinity included)
  int eff_plus = 0, eff_minus = 0;  // effective band of p - z
  bool on_curve = false;
  int winding = 0;  // valid when !on_curve
  int m0_plus = 0, m0_minus = 0;  // slow-decay counts per thresholds
  /// Leading coefficient of zeta^(eff_plus v 0) * (p(zeta)-z).
  cplx lead = 0.0;

  /// Negated finite roots in non-increasing modulus order (the eta view).
  std::vector<cplx> eta() const;
  /// Inside roots ascending / outside roots ascending (finite only).
  std::vector<cplx> inside() const;
  std::vector<cplx> outside() const;
  double min_root_gap() const;
};

RootProfile roots_at(const LaurentSymbol& sym, cplx z, const RootThresholds& th = {});

/// Winding number of p(S^1) about z. Throws if z lies on the curve.
int winding_number(const LaurentSymbol& sym, cplx z, const RootThresholds& th = {});

/// phi_infty(z) = (1/2pi) int log|z - p(e^{i theta})| d theta, by the
/// closed form log|lead| + sum over roots of modulus > 1 of log|root|.
double log_potential(const LaurentSymbol& sym, cplx z, const RootThresholds& th = {});

/// Quadrature version of the log potential (test oracle and cross-check).
double log_potential_quadrature(const LaurentSymbol& sym, cplx z, int nodes = 8192);

/// min_theta |z - p(e^{i theta})|, grid scan plus local refinement.
double dist_to_curve(const LaurentSymbol& sym, cplx z, int grid = 1024);

/// Self-intersection points (b1) of the contracted curve and branch
/// points (b2, critical values of p), with the blow-up radius attached.
struct BadSets {
  std::vector<cplx> b1;
  std::vector<cplx> b2;
  double radius = 0.0;
  /// b1 candidates where Newton refinement failed, with residuals.
  std::vector<std::pair<cplx, double>> unrefined;

  double dist_to(cplx z) const;
  bool in_blowup(cplx z) const { return dist_to(z) < radius; }
};

BadSets bad_sets(const LaurentSymbol& sym, double radius);

/// Roots of c[0] + c[1] x + ... + c[d] x^d via a balanced companion
/// matrix. Trailing (near-)zero leading coefficients are trimmed.
std::vector<cplx> poly_roots(const std::vector<cplx>& coeffs_ascending);

/// Discretized contour integral (1/2pi i) oint dlog(p(eta) - z); test
/// oracle for the root-count winding number.
int winding_number_contour(const LaurentSymbol& sym, cplx z, int grid = 4096);

}  // namespace toepspec
