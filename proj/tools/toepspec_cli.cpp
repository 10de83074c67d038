#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "toepspec/grushin.hpp"
#include "toepspec/harness.hpp"
#include "toepspec/quasimodes.hpp"
#include "toepspec/symfunc.hpp"

using namespace toepspec;

namespace {

std::ostream& open_or_stdout(std::ofstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot open output file " + path);
  return file;
}

NoiseModel noise_from_name(const std::string& name) {
  if (name == "gaussian") return NoiseModel::gaussian();
  if (name == "disc") return NoiseModel::disc();
  throw std::runtime_error("unknown noise kind " + name);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"banded Toeplitz spectra under small random perturbations"};
  app.require_subcommand(1);

  std::string symbol_lit = "1*z^1 + 1*z^2";
  std::string out_path;
  double z_re = 0.0, z_im = 0.0;
  int n = 256;
  double gamma = 1.2;
  std::string noise = "gaussian";
  std::uint64_t seed = 1;

  auto add_symbol = [&](CLI::App* cmd) {
    cmd->add_option("--symbol", symbol_lit, "symbol literal, e.g. \"1*z^1 + 1*z^2\"");
  };
  auto add_z = [&](CLI::App* cmd) {
    cmd->add_option("--zre", z_re, "Re z");
    cmd->add_option("--zim", z_im, "Im z");
  };
  auto add_out = [&](CLI::App* cmd) { cmd->add_option("-o,--output", out_path, "output file ('-' = stdout)"); };

  auto* info = app.add_subcommand("symbol-info", "band, winding regions, bad sets");
  add_symbol(info);
  add_out(info);
  double info_radius = 0.0;
  info->add_option("--radius", info_radius, "bad-set blow-up radius (default 0.05 * diameter)");

  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of the perturbed matrix (CSV)");
  add_symbol(spectrum);
  add_out(spectrum);
  spectrum->add_option("-N,--dim", n, "matrix dimension");
  spectrum->add_option("--gamma", gamma, "perturbation exponent");
  spectrum->add_option("--noise", noise, "gaussian|disc");
  spectrum->add_option("--seed", seed, "seed");
  bool with_vectors = false;
  spectrum->add_flag("--vectors", with_vectors, "append |v(nu)| columns");

  auto* gaps = app.add_subcommand("gaps", "singular value splitting report (JSON)");
  add_symbol(gaps);
  add_z(gaps);
  add_out(gaps);
  gaps->add_option("-N,--dim", n, "matrix dimension");

  auto* qm = app.add_subcommand("quasimodes", "per-mode profile CSV (nu, |psi_j(nu)|)");
  add_symbol(qm);
  add_z(qm);
  add_out(qm);
  qm->add_option("-N,--dim", n, "matrix dimension");

  auto* detexp = app.add_subcommand("detexp", "noise expansion det_k (JSON)");
  add_symbol(detexp);
  add_z(detexp);
  add_out(detexp);
  detexp->add_option("-N,--dim", n, "matrix dimension");
  detexp->add_option("--gamma", gamma, "perturbation exponent");
  detexp->add_option("--noise", noise, "gaussian|disc");
  detexp->add_option("--seed", seed, "seed");

  auto* tubes = app.add_subcommand("tubes", "per-eigenvalue location classification (CSV + JSON)");
  add_symbol(tubes);
  add_out(tubes);
  tubes->add_option("-N,--dim", n, "matrix dimension");
  tubes->add_option("--gamma", gamma, "perturbation exponent");
  tubes->add_option("--noise", noise, "gaussian|disc");
  tubes->add_option("--seed", seed, "seed");
  std::string tubes_summary;
  tubes->add_option("--summary", tubes_summary, "summary JSON path");

  auto* localize = app.add_subcommand("localize", "localization report for eigenvalues near z0 (JSON)");
  add_symbol(localize);
  add_z(localize);
  add_out(localize);
  localize->add_option("-N,--dim", n, "matrix dimension");
  localize->add_option("--gamma", gamma, "perturbation exponent");
  localize->add_option("--noise", noise, "gaussian|disc");
  localize->add_option("--seed", seed, "seed");

  auto* experiment = app.add_subcommand("experiment", "Monte Carlo experiment from a JSON config");
  std::string config_path;
  experiment->add_option("config", config_path, "config JSON file")->required();
  int exp_trials = -1;
  std::uint64_t exp_seed = 0;
  std::string exp_out;
  bool exp_large = false;
  experiment->add_option("--trials", exp_trials, "override trials");
  experiment->add_option("--seed", exp_seed, "override master seed");
  experiment->add_option("--output-dir", exp_out, "override output directory");
  experiment->add_flag("--large", exp_large, "allow N > 2048");

  CLI11_PARSE(app, argc, argv);

  try {
    std::ofstream file;
    if (info->parsed()) {
      const LaurentSymbol sym = LaurentSymbol::parse(symbol_lit);
      const double radius = info_radius > 0 ? info_radius : 0.05 * sym.curve_diameter();
      const BadSets bad = bad_sets(sym, radius);
      nlohmann::json j;
      j["symbol"] = sym.to_json();
      j["literal"] = sym.to_literal();
      j["n_plus"] = sym.n_plus();
      j["n_minus"] = sym.n_minus();
      j["g0"] = sym.g0();
      j["curve_diameter"] = sym.curve_diameter();
      j["bad_radius"] = radius;
      auto pts = nlohmann::json::array();
      for (const auto& w : bad.b1) pts.push_back({{"re", w.real()}, {"im", w.imag()}});
      j["b1"] = pts;
      pts = nlohmann::json::array();
      for (const auto& w : bad.b2) pts.push_back({{"re", w.real()}, {"im", w.imag()}});
      j["b2"] = pts;
      open_or_stdout(file, out_path) << j.dump(2) << "\n";
    } else if (spectrum->parsed()) {
      const LaurentSymbol sym = LaurentSymbol::parse(symbol_lit);
      PerturbedSample ps = perturb(sym, n, gamma, noise_from_name(noise), seed);
      auto pairs = eigenpairs(ps.matrix);
      auto& os = open_or_stdout(file, out_path);
      for (const auto& p : pairs) {
        os << fmt_double(p.value.real()) << ',' << fmt_double(p.value.imag());
        if (with_vectors)
          for (int i = 0; i < n; ++i) os << ',' << fmt_double(std::abs(p.vector(i)));
        os << '\n';
      }
    } else if (gaps->parsed()) {
      const LaurentSymbol sym = LaurentSymbol::parse(symbol_lit);
      GapReport rep = gap_report(sym, cplx(z_re, z_im), n);
      nlohmann::json j{{"re", rep.z.real()},   {"im", rep.z.imag()},     {"d", rep.d},
                       {"m0", rep.m0},         {"t_low", rep.t_low},     {"t_mid_lo", rep.t_mid_lo},
                       {"t_d", rep.t_d},       {"t_next", rep.t_next},   {"ratio_next", rep.ratio_next},
                       {"ratio_mid", rep.ratio_mid}};
      open_or_stdout(file, out_path) << j.dump(2) << "\n";
    } else if (qm->parsed()) {
      const LaurentSymbol sym = LaurentSymbol::parse(symbol_lit);
      QuasimodeBasis basis = quasimode_basis(sym, cplx(z_re, z_im), n);
      auto& os = open_or_stdout(file, out_path);
      os << "nu";
      for (int j = 0; j < basis.psi.cols(); ++j) os << ",abs_psi_" << j;
      os << '\n';
      for (int v = 0; v < n; ++v) {
        os << v;
        for (int j = 0; j < basis.psi.cols(); ++j) os << ',' << fmt_double(std::abs(basis.psi(v, j)));
        os << '\n';
      }
    } else if (detexp->parsed()) {
      const LaurentSymbol sym = LaurentSymbol::parse(symbol_lit);
      Eigen::MatrixXcd q = sample_noise(noise_from_name(noise), n, seed);
      DetExpansion exp = det_expansion(sym, cplx(z_re, z_im), gamma, q);
      nlohmann::json arr = nlohmann::json::array();
      for (size_t k = 0; k < exp.detk.size(); ++k)
        arr.push_back({{"k", k},
                       {"re", exp.detk[k].real()},
                       {"im", exp.detk[k].imag()},
                       {"normalized_abs", exp.normalized_abs[k]}});
      nlohmann::json j{{"k0", exp.k0}, {"sum_rel_residual", exp.sum_rel_residual}, {"detk", arr}};
      open_or_stdout(file, out_path) << j.dump(2) << "\n";
    } else if (tubes->parsed()) {
      const LaurentSymbol sym = LaurentSymbol::parse(symbol_lit);
      const double radius = 0.05 * sym.curve_diameter();
      const BadSets bad = bad_sets(sym, radius);
      PerturbedSample ps = perturb(sym, n, gamma, noise_from_name(noise), seed);
      auto pairs = eigenpairs(ps.matrix);
      std::vector<cplx> eigs;
      for (const auto& p : pairs) eigs.push_back(p.value);
      LocationParams lp;
      lp.N = n;
      lp.eps_tilde0 = radius;
      lp.good.N = n;
      lp.good.epsilon = radius;
      LocationStats stats = location_stats(eigs, sym, bad, lp);
      auto& os = open_or_stdout(file, out_path);
      os << "re,im,class,dist_scaled\n";
      for (const auto& r : stats.records)
        os << fmt_double(r.lambda.real()) << ',' << fmt_double(r.lambda.imag()) << ',' << r.cls
           << ',' << fmt_double(r.dist_scaled) << '\n';
      if (!tubes_summary.empty()) {
        nlohmann::json j{{"n_total", stats.n_total},
                         {"n_good", stats.n_good},
                         {"n_forbidden", stats.n_forbidden},
                         {"n_other", stats.n_other},
                         {"min_dist_scaled", stats.min_dist_scaled},
                         {"c_hat", stats.c_hat}};
        std::ofstream sf(tubes_summary);
        sf << j.dump(2) << "\n";
      }
    } else if (localize->parsed()) {
      const LaurentSymbol sym = LaurentSymbol::parse(symbol_lit);
      PerturbedSample ps = perturb(sym, n, gamma, noise_from_name(noise), seed);
      auto pairs = eigenpairs(ps.matrix);
      const cplx z0(z_re, z_im);
      std::sort(pairs.begin(), pairs.end(), [&](const EigenPair& a, const EigenPair& b) {
        return std::abs(a.value - z0) < std::abs(b.value - z0);
      });
      nlohmann::json arr = nlohmann::json::array();
      for (int k = 0; k < 5 && k < static_cast<int>(pairs.size()); ++k) {
        LocalizationReport rep = localization_report(sym, pairs[static_cast<size_t>(k)].value,
                                                     pairs[static_cast<size_t>(k)].vector);
        nlohmann::json lj{{"re", rep.eigenvalue.real()},
                          {"im", rep.eigenvalue.imag()},
                          {"winding", rep.winding},
                          {"supp_010", rep.supp.at(0.1)},
                          {"sup_norm", rep.lp_norms.at(0.0)},
                          {"projection_deficit", rep.projection_deficit}};
        arr.push_back(lj);
      }
      open_or_stdout(file, out_path) << arr.dump(2) << "\n";
    } else if (experiment->parsed()) {
      std::ifstream cf(config_path);
      if (!cf) throw std::runtime_error("cannot open config " + config_path);
      nlohmann::json j;
      cf >> j;
      ExperimentConfig cfg = ExperimentConfig::from_json(j);
      if (exp_trials > 0) cfg.trials = exp_trials;
      if (exp_seed != 0) cfg.master_seed = exp_seed;
      if (!exp_out.empty()) cfg.output_dir = exp_out;
      if (exp_large) cfg.large_ok = true;
      ExperimentResult res = run_experiment(cfg);
      std::cout << "summary: " << res.summary_file << "\n";
      return res.exit_code;
    }
  } catch (const std::exception& e) {
    std::cerr << "toepspec: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
