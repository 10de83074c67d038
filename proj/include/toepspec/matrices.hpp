#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <random>

#include "toepspec/symbol.hpp"

namespace toepspec {

enum class MatrixKind { toeplitz, circulant, shifted, generic };

struct BandedMatrix {
  Eigen::MatrixXcd m;
  int band_lower = 0;  // number of nonzero subdiagonals
  int band_upper = 0;  // number of nonzero superdiagonals
  MatrixKind kind = MatrixKind::generic;

  int n() const { return static_cast<int>(m.rows()); }
};

/// P_N with entries P(i,j) = a_{i-j}.
BandedMatrix build_toeplitz(const LaurentSymbol& sym, int n);

/// Circulant with entries sum_k p_{i-j+kN}; requires n > N+ + N-.
BandedMatrix build_circulant(const LaurentSymbol& sym, int n);

/// Toeplitz matrix of the shifted symbol p - z whose band is translated so
/// that nbar_minus = 0 gives the upper-triangular form with a_{N+} on the
/// main diagonal. Selecting rows [N] and columns [N_hat] \ [N+] of the
/// nbar_minus = 0 matrix of size N + N+ recovers P_N(p - z).
BandedMatrix build_shifted_toeplitz(const LaurentSymbol& sym, cplx z, int n, int nbar_minus);

enum class NoiseKind { complex_gaussian, uniform_disc, custom_density };

struct NoiseModel {
  NoiseKind kind = NoiseKind::complex_gaussian;
  double upeta = 1.0;  // anti-concentration exponent attributed to the model
  /// Support radius of the uniform_disc kind. sqrt(2) gives unit second
  /// moment; the raw radius-1 disc is available for anti-concentration
  /// experiments.
  double radius = 1.4142135623730951;
  /// Sampler for custom_density.
  std::function<cplx(std::mt19937_64&)> sampler;
  bool moment_bound_checked = false;

  static NoiseModel gaussian() { return NoiseModel{}; }
  static NoiseModel disc(double r = 1.4142135623730951) {
    NoiseModel m;
    m.kind = NoiseKind::uniform_disc;
    m.radius = r;
    return m;
  }
  static NoiseModel custom(std::function<cplx(std::mt19937_64&)> f) {
    NoiseModel m;
    m.kind = NoiseKind::custom_density;
    m.sampler = std::move(f);
    return m;
  }
};

/// Deterministic substream seed derived from (master, trial, block).
/// Distinct argument triples give statistically independent streams, so
/// trials can be sampled in parallel in any order.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t trial, std::uint64_t block);

/// n x n noise draw; reproducible given the seed.
Eigen::MatrixXcd sample_noise(const NoiseModel& model, int n, std::uint64_t seed);

struct PerturbedSample {
  int n = 0;
  double gamma = 0.0;
  std::uint64_t seed = 0;
  Eigen::MatrixXcd matrix;  // P_N + N^-gamma Q
};

PerturbedSample perturb(const LaurentSymbol& sym, int n, double gamma, const NoiseModel& model,
                        std::uint64_t seed);

/// Empirical Levy concentration sup_w P(|X - w| <= eps), the sup taken
/// over a grid of step eps/2 covering the sampled support box.
double levy_estimate(const NoiseModel& model, double epsilon, int trials, std::uint64_t seed = 1);

}  // namespace toepspec
