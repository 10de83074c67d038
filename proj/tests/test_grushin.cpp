#include <doctest.h>

#include <cmath>
#include <random>

#include "toepspec/grushin.hpp"
#include "toepspec/matrices.hpp"

using namespace toepspec;

namespace {

Eigen::MatrixXcd random_matrix(int n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n01;
  Eigen::MatrixXcd m(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) m(i, j) = cplx(n01(gen), n01(gen));
  return m;
}

}  // namespace

TEST_SUITE_BEGIN("grushin");

TEST_CASE("Jordan kernel block") {
  const LaurentSymbol jor = LaurentSymbol::parse("1*z^1");
  Eigen::MatrixXcd p = build_toeplitz(jor, 3).m;
  SingularTriplets st = singular_triplets(p, cplx(0, 0), 3);
  GrushinBlocks g = build_grushin(st, 1);
  CHECK(std::abs(g.E_minus_plus(0, 0)) < 1e-14);  // t_1 = 0 exactly
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(g.E);
  int rank = 0;
  for (int i = 0; i < 3; ++i)
    if (svd.singularValues()(i) > 1e-12) ++rank;
  CHECK(rank == 2);
  CHECK(g.inverse_residual(p) < 1e-12);
}

TEST_CASE("exact inverse and norm bounds on random matrices") {
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 6 + rep;
    const int M = 1 + rep % 3;
    const Eigen::MatrixXcd p = random_matrix(n, 100 + rep);
    SingularTriplets st = singular_triplets(p, cplx(0, 0), n);
    GrushinBlocks g = build_grushin(st, M);
    CHECK(g.inverse_residual(p) <= 1e-10);
    CHECK(g.E.operatorNorm() <= 1.0 / g.alpha + 1e-9);
    CHECK(g.E_plus.operatorNorm() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(g.E_minus.operatorNorm() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(g.E_minus_plus.operatorNorm() <= g.alpha + 1e-12);
  }
}

TEST_CASE("perturbed blocks against direct augmented inversion") {
  const int n = 24, M = 2;
  const Eigen::MatrixXcd p = random_matrix(n, 7);
  SingularTriplets st = singular_triplets(p, cplx(0, 0), n);
  GrushinBlocks g = build_grushin(st, M);

  // delta = 0 reduces to the unperturbed blocks
  const Eigen::MatrixXcd q = random_matrix(n, 8);
  PerturbedGrushinBlocks p0 = perturbed_blocks(g, q, 0.0);
  CHECK((p0.E - g.E).cwiseAbs().maxCoeff() == 0.0);
  CHECK((p0.E_minus_plus - g.E_minus_plus).cwiseAbs().maxCoeff() == 0.0);

  const double delta = 1e-3;
  PerturbedGrushinBlocks pg = perturbed_blocks(g, q, delta);
  CHECK(pg.invertibility_margin > 1e-6);

  // direct inversion of the augmented perturbed system
  Eigen::MatrixXcd big(n + M, n + M);
  big.topLeftCorner(n, n) = p + delta * q;
  big.topRightCorner(n, M) = g.R_minus;
  big.bottomLeftCorner(M, n) = g.R_plus;
  big.bottomRightCorner(M, M).setZero();
  Eigen::MatrixXcd inv = big.inverse();
  CHECK((inv.topLeftCorner(n, n) - pg.E).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((inv.topRightCorner(n, M) - pg.E_plus).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((inv.bottomLeftCorner(M, n) - pg.E_minus).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((inv.bottomRightCorner(M, M) - pg.E_minus_plus).cwiseAbs().maxCoeff() < 1e-8);

  // algebraic identity E^d P^d + E_+^d R_+ = I
  Eigen::MatrixXcd lhs = pg.E * (p + delta * q) + pg.E_plus * g.R_plus;
  lhs.diagonal().array() -= 1.0;
  CHECK(lhs.cwiseAbs().maxCoeff() < 1e-8);
  // and E_-^d P^d + E_-+^d R_+ = 0
  Eigen::MatrixXcd lhs2 = pg.E_minus * (p + delta * q) + pg.E_minus_plus * g.R_plus;
  CHECK(lhs2.cwiseAbs().maxCoeff() < 1e-8);

  // gpp6-style chain: || E_-+^d - E_-+ || <= 2 ||delta Q||
  CHECK((pg.E_minus_plus - g.E_minus_plus).operatorNorm() <=
        2.0 * delta * q.operatorNorm() + 1e-12);
}

TEST_CASE("Grushin perturbation at Toeplitz scale") {
  const LaurentSymbol lim = LaurentSymbol::parse("1*z^1 + 1*z^2");
  const int n = 64;
  const double gamma = 2.0, delta = std::pow(n, -gamma);
  const cplx z(0.8, 0.3);
  Eigen::MatrixXcd p = build_toeplitz(lim, n).m;
  p.diagonal().array() -= z;
  SingularTriplets st = singular_triplets(p, z, n);
  GrushinBlocks g = build_grushin(st, 1);
  const Eigen::MatrixXcd q = sample_noise(NoiseModel::gaussian(), n, 55);
  PerturbedGrushinBlocks pg = perturbed_blocks(g, q, delta);
  CHECK((pg.E_minus_plus - g.E_minus_plus).operatorNorm() <= 2.0 * delta * q.operatorNorm());
}

TEST_CASE("kernel recovery through the effective Hamiltonian") {
  // build a perturbed matrix, take one exact eigenvalue, and verify the
  // Grushin route reproduces its eigenvector
  const int n = 8;
  const Eigen::MatrixXcd base = random_matrix(n, 21);
  const Eigen::MatrixXcd q = random_matrix(n, 22);
  const double delta = 1e-2;
  const Eigen::MatrixXcd pert = base + delta * q;
  auto pairs = eigenpairs(pert);
  const cplx lam = pairs[3].value;
  const Eigen::VectorXcd v = pairs[3].vector;

  Eigen::MatrixXcd pz = base;
  pz.diagonal().array() -= lam;
  SingularTriplets st = singular_triplets(pz, lam, n);
  GrushinBlocks g = build_grushin(st, 2);
  PerturbedGrushinBlocks pg = perturbed_blocks(g, q, delta);
  auto kernel = kernel_via_grushin(pg, g, 1e-8);
  REQUIRE(kernel.size() == 1);
  const Eigen::VectorXcd w = kernel[0].second;
  Eigen::MatrixXcd pd = pert;
  pd.diagonal().array() -= lam;
  CHECK((pd * w).norm() <= 1e-6 * pd.operatorNorm());
  const double overlap = std::abs((w.adjoint() * v)(0));
  CHECK(overlap == doctest::Approx(1.0).epsilon(1e-6));

  // far from the spectrum the null map is empty
  Eigen::MatrixXcd far = base;
  far.diagonal().array() -= cplx(40.0, 0.0);
  SingularTriplets stf = singular_triplets(far, cplx(40, 0), n);
  GrushinBlocks gf = build_grushin(stf, 2);
  PerturbedGrushinBlocks pgf = perturbed_blocks(gf, q, delta);
  CHECK(kernel_via_grushin(pgf, gf, 1e-8).empty());

  // adjoint statement through the adjoint Grushin problem
  auto kernel_adj = kernel_via_grushin(pg, g, 1e-8);
  REQUIRE(!kernel_adj.empty());
  // E_-^* maps null(E_-+^d^*) into null(P^d^*)
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(pg.E_minus_plus.adjoint(), Eigen::ComputeFullV);
  Eigen::VectorXcd u = svd.matrixV().col(g.M - 1);
  Eigen::VectorXcd w2 = pg.E_minus.adjoint() * u;
  w2.normalize();
  CHECK((pd.adjoint() * w2).norm() <= 1e-6 * pd.operatorNorm());
}

TEST_CASE("bijection property on a synthetic singular matrix") {
  // E_+ restricted to null(E_-+) inverts R_+ restricted to null(P)
  const int n = 10;
  Eigen::MatrixXcd m = random_matrix(n, 31);
  // surgically create a 2-dimensional kernel
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::VectorXd s = svd.singularValues();
  s(n - 1) = s(n - 2) = 0.0;
  m = svd.matrixU() * s.asDiagonal() * svd.matrixV().adjoint();
  SingularTriplets st = singular_triplets(m, cplx(0, 0), n);
  GrushinBlocks g = build_grushin(st, 3);
  // null(E_-+) corresponds to the two zero entries of -diag(t)
  for (int c = 0; c < 2; ++c) {
    Eigen::VectorXcd u = Eigen::VectorXcd::Zero(3);
    u(c) = 1.0;
    Eigen::VectorXcd v = g.E_plus * u;
    CHECK((m * v).norm() <= 1e-8);
    Eigen::VectorXcd back = g.R_plus * v;
    CHECK((back - u).norm() <= 1e-8);
  }
}

TEST_CASE("resolvent expansion diagnostics") {
  const int n = 32;
  const Eigen::MatrixXcd p = random_matrix(n, 77);
  SingularTriplets st = singular_triplets(p, cplx(0, 0), n);
  GrushinBlocks g = build_grushin(st, 2);
  const Eigen::MatrixXcd q = random_matrix(n, 78);

  // delta = 0: truncation error 0 for all L >= 1
  for (int L : {1, 2, 4}) {
    ResolventExpansionReport rep = resolvent_expansion_check(g, q, 0.0, L);
    CHECK(rep.truncation_error <= 1e-13);
  }

  const double delta = std::pow(n, -2.0);
  ResolventExpansionReport r3 = resolvent_expansion_check(g, q, delta, 3, 2.0);
  CHECK(r3.dqe_norm < 1.0);
  CHECK(r3.truncation_error <= r3.neumann_bound + 1e-12);
  CHECK(r3.diagnostics.size() == 3);

  // monotone in L below the convergence radius
  double prev = 1e300;
  for (int L : {1, 2, 3, 4, 5}) {
    ResolventExpansionReport rep = resolvent_expansion_check(g, q, delta, L);
    CHECK(rep.truncation_error <= prev + 1e-15);
    prev = rep.truncation_error;
  }
}

TEST_SUITE_END();
