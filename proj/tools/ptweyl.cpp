#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ptweyl.hpp"

namespace {

using namespace ptweyl;

enum Exit { kOk = 0, kValidation = 1, kNumerical = 2 };

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::string out;
  std::optional<double> coupling;
  std::vector<int> grid;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool need_config = true) {
  auto* c = cmd->add_option("--config", f.config, "experiment config (JSON)");
  if (need_config) c->required();
  cmd->add_option("--seed", f.seed, "base seed override");
  cmd->add_option("--trials", f.trials, "trial count override");
  cmd->add_option("--out", f.out, "output file or directory");
  cmd->add_option("--coupling", f.coupling, "perturbation coupling override");
  cmd->add_option("--grid", f.grid, "quadrature grid nx,nxi")->delimiter(',')->expected(2);
}

ExperimentConfig load_config(const CommonFlags& f) {
  json j;
  try {
    j = json::parse(read_text_file(f.config));
  } catch (const json::parse_error& e) {
    throw ValidationError("config " + f.config + ": malformed JSON (" + e.what() + ")");
  }
  ExperimentConfig cfg = config_from_json(j);
  if (f.seed) cfg.base_seed = *f.seed;
  if (f.trials) {
    if (*f.trials < 1) throw ValidationError("--trials: must be >= 1");
    cfg.trials = *f.trials;
  }
  if (f.coupling) {
    if (cfg.mode == WeylMode::semiclassical) cfg.plan.overrides.coupling = *f.coupling;
    else cfg.large_coupling = *f.coupling;
  }
  if (!f.grid.empty()) {
    if (f.grid[0] < 16 || f.grid[1] < 16) throw ValidationError("--grid: nx and nxi must be >= 16");
    cfg.grid_nx = f.grid[0];
    cfg.grid_nxi = f.grid[1];
  }
  cfg.validate();
  return cfg;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) std::cout << text;
  else write_text_file(out, text);
}

std::string spectrum_csv(const std::vector<cplx>& ev, const std::vector<Region>& regions) {
  std::string out = "re,im,trial,flag_boundary\n";
  for (cplx z : ev) {
    bool flag = false;
    for (const auto& r : regions) flag = flag || r.boundary_distance(z) <= 1e-9;
    out += format_double(z.real()) + "," + format_double(z.imag()) + ",0," + (flag ? "1" : "0") + "\n";
  }
  return out;
}

json brief(const CampaignSummary& s) {
  json j = s.to_json();
  j.erase("records");
  j["output_files"] = s.files;
  return j;
}

int cmd_plan(const CommonFlags& f) {
  const ExperimentConfig cfg = load_config(f);
  json out;
  if (cfg.mode == WeylMode::semiclassical) {
    PlanOverrides ov = cfg.plan.overrides;
    ov.cutoff = cfg.K;
    out = to_json(derive_plan(cfg.op.h, cfg.op.order(), cfg.plan.s, cfg.plan.eps, cfg.plan.tau0, ov));
  } else {
    const TrialFactory factory(cfg);
    out = {{"schedule",
            {{"rho", cfg.schedule.rho}, {"beta", cfg.schedule.beta}, {"s", cfg.schedule.s},
             {"eps", cfg.schedule.eps}, {"exponent_scale", cfg.schedule.c}, {"M", cfg.schedule.M()}}},
           {"coupling", cfg.large_coupling},
           {"D", factory.elements().size()},
           {"trust_radius", std::pow(cfg.trust_eta * cfg.K, cfg.op.order()) * cfg.op.min_principal_modulus()}};
  }
  emit(out.dump(2) + "\n", f.out);
  return kOk;
}

int cmd_spectrum(const CommonFlags& f, const std::string& matrix_out) {
  const ExperimentConfig cfg = load_config(f);
  const TrialFactory factory(cfg);
  const ComplexMatrix A = factory.matrix(trial_seed(cfg.base_seed, 0));
  if (!matrix_out.empty()) {
    std::ostringstream os;
    write_matrix_csv(os, A);
    write_text_file(matrix_out, os.str());
  }
  const SpectralResult eigs = eigenvalues(A);
  emit(spectrum_csv(eigs.eigenvalues, cfg.regions), f.out);
  return kOk;
}

int cmd_weyl(const CommonFlags& f) {
  const ExperimentConfig cfg = load_config(f);
  WeylOptions opt;
  opt.mode = cfg.mode;
  opt.h = cfg.op.h;
  opt.r_list = cfg.r_list;
  opt.eps_tilde_list = cfg.eps_tilde_list;
  opt.C = cfg.bound_C;
  const bool principal = cfg.mode == WeylMode::large;
  std::vector<Region> regions;
  if (principal) {
    for (const auto& r : cfg.regions)
      for (double lam : cfg.lambdas) regions.push_back(r.with_lambda(lam));
  } else {
    regions = cfg.regions;
  }
  double r_max = 0.0;
  for (double r : cfg.r_list) r_max = std::max(r_max, r);
  json rows = json::array();
  for (const auto& r : regions) {
    const QuadratureGrid grid{cfg.grid_nx, cfg.grid_nxi,
                              cfg.grid_xi_max.value_or(xi_bound(cfg.op, r.outer_radius() + r_max, principal))};
    const WeylPrediction w = weyl_predict(cfg.op, r, grid, opt);
    json tube = json::array();
    for (const auto& [rr, v] : w.tube) tube.push_back({{"r", rr}, {"volume", v}});
    const double rel = w.volume_fine > 0.0 ? std::abs(w.volume - w.volume_fine) / w.volume_fine : 0.0;
    rows.push_back({{"region", to_json(r)},
                    {"volume", w.volume},
                    {"volume_fine", w.volume_fine},
                    {"relative_change", rel},
                    {"prediction", w.prediction},
                    {"prefactor", w.prefactor},
                    {"xi_max", grid.xi_max},
                    {"tube", tube}});
  }
  emit(json{{"mode", to_string(cfg.mode)}, {"regions", rows}}.dump(2) + "\n", f.out);
  return kOk;
}

int cmd_campaign(const CommonFlags& f, WeylMode mode) {
  ExperimentConfig cfg = load_config(f);
  if (cfg.mode != mode)
    throw ValidationError("config /mode: expected \"" + to_string(mode) + "\" for this subcommand");
  if (!f.out.empty()) cfg.output_dir = f.out;
  const CampaignSummary s = mode == WeylMode::semiclassical ? run_semiclassical(cfg) : run_large(cfg);
  std::cout << brief(s).dump(2) << "\n";
  if (s.failed == s.trials) {
    for (const auto& r : s.records)
      if (r.failed) std::cerr << "trial " << r.index << ": " << r.error << "\n";
    return kNumerical;
  }
  return kOk;
}

int cmd_check(const CommonFlags& f) {
  const ExperimentConfig cfg = load_config(f);
  const TrialFactory factory(cfg);
  const PtSymbolReport sym = check_pt_symbol(cfg.op);
  json trials = json::array();
  bool all_ok = true;
  for (int t = 0; t < cfg.trials; ++t) {
    const std::uint64_t seed = trial_seed(cfg.base_seed, static_cast<std::uint64_t>(t));
    const ComplexMatrix A = factory.matrix(seed);
    const SpectralResult eigs = eigenvalues(A);
    const bool pt = pt_matrix_check(A);
    const bool sy = symmetry_check(A);
    const bool cj = spectrum_conjugation_check(eigs, 1e-8);
    all_ok = all_ok && pt && sy && cj;
    trials.push_back({{"trial", t},
                      {"seed", seed},
                      {"pt", pt},
                      {"symmetric", sy},
                      {"conjugation", cj},
                      {"residual_bound", eigs.residual_bound}});
  }
  const json out = {{"operator_pt", sym.pt}, {"trials", trials}, {"all_pass", all_ok}};
  emit(out.dump(2) + "\n", f.out);
  // A PT operator that fails its structural checks is a numerical failure.
  return (sym.pt && !all_ok) ? kNumerical : kOk;
}

int cmd_kyfan(const CommonFlags& f, int N, double h) {
  if (N < 2 || N > 512) throw ValidationError("--N: must be in [2, 512]");
  if (!(h > 0.0)) throw ValidationError("--h-scale: must be positive");
  const int trials = f.trials.value_or(1000);
  if (trials < 1) throw ValidationError("--trials: must be >= 1");
  const std::uint64_t base = f.seed.value_or(0);
  const FourierBasis basis(2 * N + 2);
  const auto elems = enumerate_perturb_basis(basis, std::sqrt(4.0 * (N + 1) * (N + 1) + 1.0));
  int violations = 0, bad_trials = 0;
  double profile = 0.0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(trial_seed(base, static_cast<std::uint64_t>(t)));
    std::vector<cplx> coeffs(elems.size());
    for (auto& c : coeffs) {
      const double re = rng.normal();
      c = cplx(re, rng.normal());
    }
    const KyFanReport rep = kyfan_split_check(coeffs, elems, N, h);
    violations += static_cast<int>(rep.violations.size());
    bad_trials += !rep.violations.empty();
    profile += rep.lower_bound_profile;
  }
  const json out = {{"trials", trials},
                    {"N", N},
                    {"h", h},
                    {"violations", violations},
                    {"trials_with_violations", bad_trials},
                    {"mean_lower_bound_profile", profile / trials}};
  emit(out.dump(2) + "\n", f.out);
  return violations ? kNumerical : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ptweyl: Weyl asymptotics for randomly perturbed PT-symmetric operators"};
  app.set_version_flag("--version", std::string(PTWEYL_VERSION));
  app.require_subcommand(1);

  CommonFlags f;
  std::string matrix_out;
  int kyfan_N = 40;
  double kyfan_h = 0.1;

  auto* plan = app.add_subcommand("plan", "print the perturbation plan");
  add_common(plan, f);
  auto* spectrum = app.add_subcommand("spectrum", "one draw, eigenvalue CSV");
  add_common(spectrum, f);
  spectrum->add_option("--matrix", matrix_out, "also write the matrix as CSV");
  auto* weyl = app.add_subcommand("weyl", "phase-space volumes and Weyl predictions");
  add_common(weyl, f);
  auto* mc = app.add_subcommand("mc", "semiclassical Monte Carlo campaign");
  add_common(mc, f);
  auto* large = app.add_subcommand("large", "large-eigenvalue campaign");
  add_common(large, f);
  auto* check = app.add_subcommand("check", "structural checks over draws");
  add_common(check, f);
  auto* kyfan = app.add_subcommand("kyfan", "Ky Fan splitting campaign");
  add_common(kyfan, f, false);
  kyfan->add_option("--N", kyfan_N, "family size");
  kyfan->add_option("--h-scale", kyfan_h, "scale for the lower-bound profile threshold h/2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*plan) return cmd_plan(f);
    if (*spectrum) return cmd_spectrum(f, matrix_out);
    if (*weyl) return cmd_weyl(f);
    if (*mc) return cmd_campaign(f, WeylMode::semiclassical);
    if (*large) return cmd_campaign(f, WeylMode::large);
    if (*check) return cmd_check(f);
    if (*kyfan) return cmd_kyfan(f, kyfan_N, kyfan_h);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kNumerical;
  }
  return kValidation;
}
