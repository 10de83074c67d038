#include "toepspec/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include "toepspec/matrices.hpp"

namespace toepspec {

double window_mass(const Eigen::VectorXcd& v, int l, int lp) {
  const int n = static_cast<int>(v.size());
  if (!(1 <= l && l <= lp && lp <= n)) throw std::invalid_argument("window_mass: bad window");
  if (std::abs(v.norm() - 1.0) > 1e-8) throw std::invalid_argument("window_mass: v not unit norm");
  double s = 0.0;
  for (int i = l; i <= lp; ++i) s += std::norm(v(i - 1));
  return s;
}

int supp_mu(const Eigen::VectorXcd& v, double mu1) {
  if (!(mu1 > 0.0 && mu1 < 1.0)) throw std::invalid_argument("supp_mu: mu1 in (0,1)");
  std::vector<double> mass(static_cast<size_t>(v.size()));
  for (int i = 0; i < v.size(); ++i) mass[static_cast<size_t>(i)] = std::norm(v(i));
  std::sort(mass.begin(), mass.end(), std::greater<>());
  const double target = (1.0 - mu1) * (1.0 - mu1);  // ||v||_{l2(I)} > 1 - mu1
  double acc = 0.0;
  int k = 0;
  for (double m : mass) {
    acc += m;
    ++k;
    if (acc > target) return k;
  }
  return static_cast<int>(v.size());
}

LocalizationReport localization_report(const LaurentSymbol& sym, cplx lambda,
                                       const Eigen::VectorXcd& v) {
  const int n = static_cast<int>(v.size());
  LocalizationReport rep;
  rep.eigenvalue = lambda;
  try {
    rep.winding = winding_number(sym, lambda);
  } catch (const std::exception&) {
    rep.winding = 0;
  }

  // Dyadic windows partitioning [1, N].
  for (int w = 1; w <= n; w *= 2) {
    for (int l = 1; l <= n; l += w) {
      const int lp = std::min(n, l + w - 1);
      rep.window_masses[{l, lp}] = window_mass(v, l, lp);
      if (lp == n) break;
    }
    if (w > n / 2) break;
  }
  for (double mu : {0.05, 0.1, 0.2, 0.5}) rep.supp[mu] = supp_mu(v, mu);
  for (double p : {1.0, 2.0, 4.0}) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::pow(std::abs(v(i)), p);
    rep.lp_norms[p] = std::pow(s, 1.0 / p);
  }
  rep.lp_norms[0.0] = v.cwiseAbs().maxCoeff();  // sup norm keyed by 0

  const int samples = 32;
  for (int s = 0; s <= samples; ++s) {
    const int l = 1 + (n - 1) * s / samples;
    rep.tail_indices.push_back(l);
    rep.tail_right.push_back(window_mass(v, l, n));
    rep.tail_left.push_back(window_mass(v, 1, l));
  }

  // Projection onto the bottom-|d| singular subspace of P_N - lambda.
  const int ad = std::abs(rep.winding);
  if (ad > 0 && ad < n) {
    Eigen::MatrixXcd a = build_toeplitz(sym, n).m;
    a.diagonal().array() -= lambda;
    SingularTriplets st = smallest_triplets_iterative(a, ad);
    Eigen::VectorXcd proj = Eigen::VectorXcd::Zero(n);
    for (int j = 0; j < ad; ++j) proj += st.e.col(j) * (st.e.col(j).adjoint() * v)(0);
    rep.projection_deficit = (v - proj).norm();
  } else {
    rep.projection_deficit = 1.0;
  }
  return rep;
}

std::string fmt_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.symbol_literal = j.value("symbol", c.symbol_literal);
  c.N = j.value("N", c.N);
  c.gamma = j.value("gamma", c.gamma);
  c.noise = j.value("noise", c.noise);
  c.trials = j.value("trials", c.trials);
  c.master_seed = j.value("seed", c.master_seed);
  c.eps0 = j.value("eps0", c.eps0);
  c.eps_tilde0 = j.value("eps_tilde0", c.eps_tilde0);
  c.gamma_prime = j.value("gamma_prime", c.gamma_prime);
  c.good_C = j.value("good_C", c.good_C);
  c.good_epsilon = j.value("good_epsilon", c.good_epsilon);
  c.output_dir = j.value("output_dir", c.output_dir);
  c.write_eigenvectors = j.value("write_eigenvectors", c.write_eigenvectors);
  c.threads = j.value("threads", c.threads);
  c.large_ok = j.value("large", c.large_ok);
  if (j.contains("z0")) c.z0 = cplx(j["z0"].value("re", 0.0), j["z0"].value("im", 0.0));
  if (c.N <= 0 || c.trials <= 0) throw std::invalid_argument("ExperimentConfig: bad N or trials");
  return c;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j{{"schema_version", 1},
                   {"symbol", symbol_literal},
                   {"N", N},
                   {"gamma", gamma},
                   {"noise", noise},
                   {"trials", trials},
                   {"seed", master_seed},
                   {"eps0", eps0},
                   {"eps_tilde0", eps_tilde0},
                   {"gamma_prime", gamma_prime},
                   {"good_C", good_C},
                   {"good_epsilon", good_epsilon},
                   {"output_dir", output_dir},
                   {"write_eigenvectors", write_eigenvectors},
                   {"threads", threads},
                   {"large", large_ok}};
  if (z0) j["z0"] = {{"re", z0->real()}, {"im", z0->imag()}};
  return j;
}

namespace {

int resolve_threads(int cfg_threads) {
  if (cfg_threads > 0) return cfg_threads;
  if (const char* env = std::getenv("TOEPSPEC_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

struct TrialOutput {
  int trial = 0;
  bool failed = false;
  std::string error;
  nlohmann::json sample;
};

TrialOutput run_trial(const ExperimentConfig& cfg, const LaurentSymbol& sym, const BadSets& bad,
                      int trial) {
  TrialOutput out;
  out.trial = trial;
  try {
    const std::uint64_t seed = substream_seed(cfg.master_seed, static_cast<std::uint64_t>(trial), 0);
    NoiseModel model = cfg.noise == "disc" ? NoiseModel::disc() : NoiseModel::gaussian();
    PerturbedSample ps = perturb(sym, cfg.N, cfg.gamma, model, seed);
    std::vector<EigenPair> pairs = eigenpairs(ps.matrix);

    std::vector<cplx> eigs;
    eigs.reserve(pairs.size());
    for (const auto& p : pairs) eigs.push_back(p.value);

    LocationParams lp;
    lp.N = cfg.N;
    lp.gamma_prime = cfg.gamma_prime;
    lp.eps0 = cfg.eps0;
    lp.eps_tilde0 = bad.radius;
    lp.good.N = cfg.N;
    lp.good.C = cfg.good_C;
    lp.good.epsilon = cfg.good_epsilon > 0 ? cfg.good_epsilon : bad.radius;
    LocationStats stats = location_stats(eigs, sym, bad, lp);

    nlohmann::json j;
    j["schema_version"] = 1;
    j["trial"] = trial;
    j["seed"] = seed;
    nlohmann::json earr = nlohmann::json::array();
    for (size_t i = 0; i < eigs.size(); ++i) {
      const auto& rec = stats.records[i];
      earr.push_back({{"re", eigs[i].real()},
                      {"im", eigs[i].imag()},
                      {"class", rec.cls},
                      {"dist_scaled", rec.dist_scaled},
                      {"winding", rec.winding}});
    }
    j["eigenvalues"] = earr;
    j["n_good"] = stats.n_good;
    j["n_forbidden"] = stats.n_forbidden;
    j["n_other"] = stats.n_other;
    j["min_dist_scaled"] = stats.min_dist_scaled;
    j["c_hat"] = stats.c_hat;

    // Localization summaries for the good-region eigenvectors (a
    // deterministic evenly spaced subsample keeps the cost bounded)
    // plus the 5 nearest to z0 when given.
    std::vector<int> selected;
    for (size_t i = 0; i < eigs.size(); ++i)
      if (stats.records[i].cls == 0) selected.push_back(static_cast<int>(i));
    const int max_reports = 16;
    if (static_cast<int>(selected.size()) > max_reports) {
      std::vector<int> thin;
      for (int k = 0; k < max_reports; ++k)
        thin.push_back(selected[static_cast<size_t>(k) * selected.size() / max_reports]);
      selected = thin;
    }
    if (cfg.z0) {
      std::vector<int> order(eigs.size());
      for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(eigs[static_cast<size_t>(a)] - *cfg.z0) <
               std::abs(eigs[static_cast<size_t>(b)] - *cfg.z0);
      });
      for (int k = 0; k < 5 && k < static_cast<int>(order.size()); ++k)
        if (std::find(selected.begin(), selected.end(), order[static_cast<size_t>(k)]) ==
            selected.end())
          selected.push_back(order[static_cast<size_t>(k)]);
    }
    nlohmann::json larr = nlohmann::json::array();
    for (int idx : selected) {
      const auto& pr = pairs[static_cast<size_t>(idx)];
      LocalizationReport rep = localization_report(sym, pr.value, pr.vector);
      nlohmann::json lj;
      lj["re"] = pr.value.real();
      lj["im"] = pr.value.imag();
      lj["winding"] = rep.winding;
      lj["supp_010"] = rep.supp.at(0.1);
      lj["sup_norm"] = rep.lp_norms.at(0.0);
      lj["projection_deficit"] = rep.projection_deficit;
      lj["tail_right_half"] = window_mass(pr.vector, cfg.N / 2, cfg.N);
      lj["tail_left_half"] = window_mass(pr.vector, 1, cfg.N / 2);
      if (cfg.write_eigenvectors) {
        nlohmann::json prof = nlohmann::json::array();
        for (int v = 0; v < cfg.N; ++v) prof.push_back(std::abs(pr.vector(v)));
        lj["profile_abs"] = prof;
      }
      larr.push_back(lj);
    }
    j["localization"] = larr;
    out.sample = std::move(j);
  } catch (const std::exception& e) {
    out.failed = true;
    out.error = e.what();
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.N > 2048 && !cfg.large_ok)
    throw std::invalid_argument("run_experiment: N > 2048 requires the large flag");
  if (cfg.N > 2048)
    std::fprintf(stderr, "toepspec: warning: N = %d, dense eigensolves will be slow\n", cfg.N);

  const LaurentSymbol sym = LaurentSymbol::parse(cfg.symbol_literal);
  const double radius = cfg.eps_tilde0 > 0 ? cfg.eps_tilde0 : 0.05 * sym.curve_diameter();
  const BadSets bad = bad_sets(sym, radius);

  std::filesystem::create_directories(cfg.output_dir);
  const int nthreads = resolve_threads(cfg.threads);

  std::vector<TrialOutput> outputs(static_cast<size_t>(cfg.trials));
  std::atomic<int> next{0};
  auto worker = [&]() {
    while (true) {
      const int t = next.fetch_add(1);
      if (t >= cfg.trials) return;
      outputs[static_cast<size_t>(t)] = run_trial(cfg, sym, bad, t);
    }
  };
  std::vector<std::thread> pool;
  for (int i = 0; i < std::min(nthreads, cfg.trials); ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  ExperimentResult result;
  nlohmann::json summary;
  summary["schema_version"] = 1;
  summary["config"] = cfg.to_json();
  summary["bad_sets"] = {{"radius", radius},
                         {"b1_count", bad.b1.size()},
                         {"b2_count", bad.b2.size()}};
  nlohmann::json trials = nlohmann::json::array();
  int failures = 0;
  for (const auto& out : outputs) {
    if (out.failed) {
      ++failures;
      trials.push_back({{"trial", out.trial}, {"error", out.error}});
      continue;
    }
    const std::string fname =
        cfg.output_dir + "/trial_" + std::to_string(out.trial) + ".json";
    std::ofstream f(fname);
    f << out.sample.dump(2) << "\n";
    result.trial_files.push_back(fname);
    trials.push_back({{"trial", out.trial},
                      {"file", fname},
                      {"n_good", out.sample["n_good"]},
                      {"n_forbidden", out.sample["n_forbidden"]},
                      {"min_dist_scaled", out.sample["min_dist_scaled"]}});
  }
  summary["trials"] = trials;
  summary["failures"] = failures;
  result.summary_file = cfg.output_dir + "/summary.json";
  std::ofstream sf(result.summary_file);
  sf << summary.dump(2) << "\n";
  result.exit_code = failures == 0 ? 0 : 2;
  return result;
}

}  // namespace toepspec
