#include "toepspec/matrices.hpp"

#include <cmath>
#include <iostream>
#include <vector>

namespace toepspec {

BandedMatrix build_toeplitz(const LaurentSymbol& sym, int n) {
  if (n <= 0) throw std::invalid_argument("build_toeplitz: n must be positive");
  if (n < sym.bandwidth() + 1)
    std::cerr << "toepspec: warning: Toeplitz dimension " << n << " below bandwidth "
              << sym.bandwidth() << " + 1\n";
  BandedMatrix out;
  out.kind = MatrixKind::toeplitz;
  out.band_lower = std::max(sym.n_plus(), 0);
  out.band_upper = std::max(sym.n_minus(), 0);
  out.m = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& [j, a] : sym.coeffs())
    for (int i = std::max(0, j); i < n + std::min(0, j); ++i) out.m(i, i - j) = a;
  return out;
}

BandedMatrix build_circulant(const LaurentSymbol& sym, int n) {
  if (n <= 0) throw std::invalid_argument("build_circulant: n must be positive");
  if (n <= sym.bandwidth()) throw std::invalid_argument("build_circulant: band wraps ambiguously");
  BandedMatrix out;
  out.kind = MatrixKind::circulant;
  out.band_lower = std::max(sym.n_plus(), 0);
  out.band_upper = std::max(sym.n_minus(), 0);
  out.m = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& [j, a] : sym.coeffs())
    for (int i = 0; i < n; ++i) out.m(i, ((i - j) % n + n) % n) += a;
  return out;
}

BandedMatrix build_shifted_toeplitz(const LaurentSymbol& sym, cplx z, int n, int nbar_minus) {
  const int width = sym.bandwidth();
  if (n <= width) throw std::invalid_argument("build_shifted_toeplitz: n too small for band");
  if (nbar_minus < 0 || nbar_minus > width)
    throw std::invalid_argument("build_shifted_toeplitz: nbar_minus out of range");
  const int npl = std::max(sym.n_plus(), 0);
  BandedMatrix out;
  out.kind = MatrixKind::shifted;
  out.m = Eigen::MatrixXcd::Zero(n, n);
  // Entry (i, k) carries a'_{i-k+N+ - nbar_minus} with a'_j = a_j - z delta_{j0}.
  for (const auto& [j, a0] : sym.coeffs()) {
    const cplx a = (j == 0) ? a0 - z : a0;
    const int d = j - npl + nbar_minus;  // i - k = d
    for (int i = std::max(0, d); i < n + std::min(0, d); ++i) out.m(i, i - d) = a;
  }
  if (sym.coeff(0) == 0.0 && z != 0.0) {
    const int d = -npl + nbar_minus;
    for (int i = std::max(0, d); i < n + std::min(0, d); ++i) out.m(i, i - d) = -z;
  }
  out.band_lower = std::max(nbar_minus, 0);
  out.band_upper = std::max(width - nbar_minus, 0);
  return out;
}

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t trial, std::uint64_t block) {
  // splitmix64 finalizer applied to a mixed counter word.
  auto mix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  return mix(mix(master) ^ mix(trial * 0x9e3779b97f4a7c15ULL + 1) ^ mix(block + 0x2545f4914f6cdd1dULL));
}

namespace {

cplx draw(const NoiseModel& model, std::mt19937_64& gen) {
  switch (model.kind) {
    case NoiseKind::complex_gaussian: {
      // unit second moment: re, im ~ N(0, 1/2)
      std::normal_distribution<double> n01(0.0, std::sqrt(0.5));
      const double re = n01(gen);
      const double im = n01(gen);
      return {re, im};
    }
    case NoiseKind::uniform_disc: {
      std::uniform_real_distribution<double> u01(0.0, 1.0);
      const double r = model.radius * std::sqrt(u01(gen));
      const double t = 2.0 * M_PI * u01(gen);
      return {r * std::cos(t), r * std::sin(t)};
    }
    case NoiseKind::custom_density:
      if (!model.sampler) throw std::invalid_argument("sample_noise: custom model without sampler");
      return model.sampler(gen);
  }
  throw std::invalid_argument("sample_noise: unknown noise kind");
}

constexpr int kBlockRows = 64;

}  // namespace

Eigen::MatrixXcd sample_noise(const NoiseModel& model, int n, std::uint64_t seed) {
  if (n <= 0) throw std::invalid_argument("sample_noise: n must be positive");
  Eigen::MatrixXcd q(n, n);
  // Row blocks draw from derived substreams so that block order (or a
  // future parallel fill) cannot change the result.
  for (int r0 = 0, b = 0; r0 < n; r0 += kBlockRows, ++b) {
    std::mt19937_64 gen(substream_seed(seed, 0, static_cast<std::uint64_t>(b)));
    const int r1 = std::min(n, r0 + kBlockRows);
    for (int i = r0; i < r1; ++i)
      for (int j = 0; j < n; ++j) q(i, j) = draw(model, gen);
  }
  return q;
}

PerturbedSample perturb(const LaurentSymbol& sym, int n, double gamma, const NoiseModel& model,
                        std::uint64_t seed) {
  PerturbedSample out;
  out.n = n;
  out.gamma = gamma;
  out.seed = seed;
  out.matrix = build_toeplitz(sym, n).m + std::pow(n, -gamma) * sample_noise(model, n, seed);
  return out;
}

double levy_estimate(const NoiseModel& model, double epsilon, int trials, std::uint64_t seed) {
  if (epsilon <= 0.0 || epsilon >= 1.0) throw std::invalid_argument("levy_estimate: epsilon in (0,1)");
  if (trials < 10000) throw std::invalid_argument("levy_estimate: trials >= 1e4 required");
  std::mt19937_64 gen(substream_seed(seed, 0, 0));
  std::vector<cplx> pts(static_cast<size_t>(trials));
  double lo_re = 1e300, hi_re = -1e300, lo_im = 1e300, hi_im = -1e300;
  for (auto& p : pts) {
    p = draw(model, gen);
    lo_re = std::min(lo_re, p.real());
    hi_re = std::max(hi_re, p.real());
    lo_im = std::min(lo_im, p.imag());
    hi_im = std::max(hi_im, p.imag());
  }
  const double step = epsilon / 2.0;
  const int nx = static_cast<int>((hi_re - lo_re) / step) + 1;
  const int ny = static_cast<int>((hi_im - lo_im) / step) + 1;

  // Bin the samples once, then count exactly around each candidate center.
  std::vector<std::vector<int>> bins(static_cast<size_t>(nx) * ny);
  auto bin_of = [&](cplx p) {
    int bx = std::min(nx - 1, std::max(0, static_cast<int>((p.real() - lo_re) / step)));
    int by = std::min(ny - 1, std::max(0, static_cast<int>((p.imag() - lo_im) / step)));
    return static_cast<size_t>(bx) * ny + by;
  };
  for (int i = 0; i < trials; ++i) bins[bin_of(pts[i])].push_back(i);

  const int reach = 3;  // cells within eps + cell diagonal
  int best = 0;
  for (int bx = 0; bx < nx; ++bx) {
    for (int by = 0; by < ny; ++by) {
      const cplx w(lo_re + (bx + 0.5) * step, lo_im + (by + 0.5) * step);
      int count = 0;
      for (int dx = -reach; dx <= reach; ++dx) {
        for (int dy = -reach; dy <= reach; ++dy) {
          const int cx = bx + dx, cy = by + dy;
          if (cx < 0 || cy < 0 || cx >= nx || cy >= ny) continue;
          for (int idx : bins[static_cast<size_t>(cx) * ny + cy])
            if (std::abs(pts[static_cast<size_t>(idx)] - w) <= epsilon) ++count;
        }
      }
      best = std::max(best, count);
    }
  }
  return static_cast<double>(best) / trials;
}

}  // namespace toepspec
