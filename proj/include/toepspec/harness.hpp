#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "toepspec/regions.hpp"
#include "toepspec/spectral.hpp"

namespace toepspec {

/// ||v||^2 restricted to the 1-based window [l, lp]. v must be unit norm.
double window_mass(const Eigen::VectorXcd& v, int l, int lp);

/// Minimal cardinality of an index set carrying more than 1 - mu1 of the
/// l2 norm; greedy on sorted |v|^2 (optimal for this objective).
int supp_mu(const Eigen::VectorXcd& v, double mu1);

struct LocalizationReport {
  cplx eigenvalue{};
  int winding = 0;
  /// mass of dyadic windows [l, l'] covering [1, N]
  std::map<std::pair<int, int>, double> window_masses;
  std::map<double, int> supp;        // mu1 -> supp_mu
  std::map<double, double> lp_norms;  // p -> ||v||_p (p = inf keyed as 0)
  std::vector<double> tail_right;    // ||v||^2 on [l, N] for sampled l
  std::vector<double> tail_left;     // ||v||^2 on [1, l]
  std::vector<int> tail_indices;
  double projection_deficit = 0.0;  // ||v - Pi_{bottom |d|} v||
};

/// Full per-eigenvector report; the projection deficit uses the bottom
/// |d| singular subspace of P_N - lambda (inverse-iteration path).
LocalizationReport localization_report(const LaurentSymbol& sym, cplx lambda,
                                       const Eigen::VectorXcd& v);

struct ExperimentConfig {
  std::string symbol_literal = "1*z^1 + 1*z^2";
  int N = 1024;
  double gamma = 1.2;
  std::string noise = "gaussian";  // gaussian | disc
  int trials = 1;
  std::uint64_t master_seed = 1;
  double eps0 = 0.1;
  double eps_tilde0 = 0.0;  // 0 = default 0.05 * curve diameter
  double gamma_prime = 1.25;
  double good_C = 4.0;
  double good_epsilon = 0.0;  // 0 = eps_tilde0
  std::string output_dir = "out";
  bool write_eigenvectors = false;
  std::optional<cplx> z0;  // extra report point (5 nearest eigenvalues)
  int threads = 0;         // 0 = TOEPSPEC_THREADS or hardware
  bool large_ok = false;   // allow N > 2048

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct ExperimentResult {
  int exit_code = 0;  // 0 ok, 2 partial trial failures
  std::vector<std::string> trial_files;
  std::string summary_file;
};

/// Runs trials (in parallel, order-independent aggregation), writing one
/// JSON sample per trial plus an aggregate summary.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Deterministic string form of a double (shortest round-trip).
std::string fmt_double(double x);

}  // namespace toepspec
