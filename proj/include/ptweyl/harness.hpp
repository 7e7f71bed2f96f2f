#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "discretize.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "json_io.hpp"
#include "linalg.hpp"
#include "operator_spec.hpp"
#include "phase_space.hpp"
#include "randomize.hpp"
#include "region.hpp"
#include "symbols.hpp"
#include "verify.hpp"
#include "weylgeom.hpp"

#ifndef PTWEYL_VERSION
#define PTWEYL_VERSION "0.1.0"
#endif

namespace ptweyl {

inline constexpr int kConfigVersion = 1;

struct PlanInputs {
  double s = 1.0;
  double eps = 0.25;
  std::optional<double> tau0;
  PlanOverrides overrides;
};

struct ExperimentConfig {
  WeylMode mode = WeylMode::semiclassical;
  OperatorSpec op;
  PlanInputs plan;             // semiclassical mode
  GaussianSchedule schedule;   // large mode
  double large_coupling = 1.0;  // large mode: P0 + coupling q0
  std::vector<Region> regions;
  int trials = 1;
  std::uint64_t base_seed = 0;
  int K = 64;
  int grid_nx = 512;
  int grid_nxi = 512;
  std::optional<double> grid_xi_max;
  std::vector<double> lambdas;
  double trust_eta = 0.5;
  bool validate_trust = false;
  std::vector<double> r_list{0.02, 0.05, 0.1};
  std::vector<double> eps_tilde_list{0.01, 0.1};
  double bound_C = 1.0;
  // A trial succeeds for a region when |count - prediction| <= rel_tol * prediction.
  double rel_tol = 0.15;
  // Eigenvalues within range_tol of the sampled symbol range count as "in range".
  double range_tol = 0.05;
  int n0_max = 4;
  std::string output_dir;

  void validate() const {
    if (trials < 1) throw ValidationError("config /trials: must be >= 1");
    if (K < 8) throw ValidationError("config /K: must be >= 8");
    if (regions.empty()) throw ValidationError("config /regions: must be nonempty");
    if (mode == WeylMode::large) {
      if (op.h != 1.0) throw ValidationError("config /operator/h: large mode uses the unscaled operator, h = 1");
      if (lambdas.empty()) throw ValidationError("config /lambdas: required in large mode");
      for (const auto& r : regions)
        if (r.kind() != "sector") throw ValidationError("config /regions: large mode takes sector regions only");
      if (!(trust_eta > 0.0 && trust_eta <= 1.0)) throw ValidationError("config /trust_eta: must be in (0, 1]");
    }
  }
};

namespace detail {

inline std::vector<double> number_list(const JsonCursor& cur) {
  std::vector<double> out;
  for (std::size_t i = 0; i < cur.size(); ++i) out.push_back(cur.at(i).number());
  return out;
}

}  // namespace detail

inline ExperimentConfig config_from_json(const json& j) {
  const JsonCursor root(j);
  if (!j.is_object()) root.fail("expected a JSON object");
  const long long version = root["version"].integer();
  if (version != kConfigVersion)
    root["version"].fail("unsupported version " + std::to_string(version) + " (expected 1)");

  ExperimentConfig c;
  const std::string mode = root["mode"].string();
  if (mode == "semiclassical") c.mode = WeylMode::semiclassical;
  else if (mode == "large") c.mode = WeylMode::large;
  else root["mode"].fail("expected \"semiclassical\" or \"large\"");

  c.op = operator_spec_from_json(root["operator"]);
  const JsonCursor regions = root["regions"];
  for (std::size_t i = 0; i < regions.size(); ++i) c.regions.push_back(region_from_json(regions.at(i)));
  if (root.has("trials")) {
    const long long t = root["trials"].integer();
    if (t < 1) root["trials"].fail("must be >= 1");
    c.trials = static_cast<int>(t);
  }
  if (root.has("base_seed")) c.base_seed = root["base_seed"].unsigned_integer();
  if (root.has("K")) {
    const long long k = root["K"].integer();
    if (k < 8 || k > 5000) root["K"].fail("must be in [8, 5000]");
    c.K = static_cast<int>(k);
  }
  if (root.has("grid")) {
    const JsonCursor g = root["grid"];
    if (g.has("nx")) c.grid_nx = static_cast<int>(g["nx"].integer());
    if (g.has("nxi")) c.grid_nxi = static_cast<int>(g["nxi"].integer());
    c.grid_xi_max = g.optional_number("xi_max");
    if (c.grid_nx < 16 || c.grid_nxi < 16) g.fail("nx and nxi must be >= 16");
  }
  if (root.has("plan")) {
    const JsonCursor p = root["plan"];
    c.plan.s = p.number_or("s", c.plan.s);
    c.plan.eps = p.number_or("eps", c.plan.eps);
    c.plan.tau0 = p.optional_number("tau0");
    auto& ov = c.plan.overrides;
    ov.kappa = p.optional_number("kappa");
    ov.M = p.optional_number("M");
    ov.Mtilde = p.optional_number("Mtilde");
    ov.L = p.optional_number("L");
    ov.R = p.optional_number("R");
    ov.coupling = p.optional_number("coupling");
    ov.C = p.number_or("C", 1.0);
  }
  if (root.has("schedule")) {
    const JsonCursor s = root["schedule"];
    c.schedule.rho = s.number_or("rho", c.schedule.rho);
    c.schedule.beta = s.number_or("beta", c.schedule.beta);
    c.schedule.s = s.number_or("s", c.schedule.s);
    c.schedule.eps = s.number_or("eps", c.schedule.eps);
    if (s.has("exponent_scale")) c.schedule.c = static_cast<int>(s["exponent_scale"].integer());
    c.large_coupling = s.number_or("coupling", 1.0);
    try {
      c.schedule.validate();
    } catch (const ValidationError& e) {
      s.fail(e.what());
    }
  }
  if (root.has("lambdas")) c.lambdas = detail::number_list(root["lambdas"]);
  c.trust_eta = root.number_or("trust_eta", c.trust_eta);
  if (root.has("validate_trust")) c.validate_trust = root["validate_trust"].boolean();
  if (root.has("r_list")) c.r_list = detail::number_list(root["r_list"]);
  if (root.has("eps_tilde_list")) c.eps_tilde_list = detail::number_list(root["eps_tilde_list"]);
  c.bound_C = root.number_or("bound_C", c.bound_C);
  c.rel_tol = root.number_or("rel_tol", c.rel_tol);
  c.range_tol = root.number_or("range_tol", c.range_tol);
  if (root.has("n0_max")) c.n0_max = static_cast<int>(root["n0_max"].integer());
  if (root.has("output")) c.output_dir = root["output"].string();
  c.validate();
  return c;
}

// Canonical form of everything that influences results; the output
// directory is deliberately absent so that relocating a run does not change
// its hash.
inline json config_to_json(const ExperimentConfig& c) {
  json regions = json::array();
  for (const auto& r : c.regions) regions.push_back(to_json(r));
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  const auto& ov = c.plan.overrides;
  return {{"version", kConfigVersion},
          {"mode", to_string(c.mode)},
          {"operator", to_json(c.op)},
          {"plan",
           {{"s", c.plan.s}, {"eps", c.plan.eps}, {"tau0", opt(c.plan.tau0)}, {"kappa", opt(ov.kappa)},
            {"M", opt(ov.M)}, {"Mtilde", opt(ov.Mtilde)}, {"L", opt(ov.L)}, {"R", opt(ov.R)},
            {"coupling", opt(ov.coupling)}, {"C", ov.C}}},
          {"schedule",
           {{"rho", c.schedule.rho}, {"beta", c.schedule.beta}, {"s", c.schedule.s},
            {"eps", c.schedule.eps}, {"exponent_scale", c.schedule.c}, {"coupling", c.large_coupling}}},
          {"regions", regions},
          {"trials", c.trials},
          {"base_seed", c.base_seed},
          {"K", c.K},
          {"grid", {{"nx", c.grid_nx}, {"nxi", c.grid_nxi}, {"xi_max", opt(c.grid_xi_max)}}},
          {"lambdas", c.lambdas},
          {"trust_eta", c.trust_eta},
          {"validate_trust", c.validate_trust},
          {"r_list", c.r_list},
          {"eps_tilde_list", c.eps_tilde_list},
          {"bound_C", c.bound_C},
          {"rel_tol", c.rel_tol},
          {"range_tol", c.range_tol},
          {"n0_max", c.n0_max}};
}

inline std::string config_hash(const ExperimentConfig& c) { return hex64(fnv1a64(config_to_json(c).dump())); }

struct TrialRecord {
  int index = 0;
  std::uint64_t seed = 0;
  double coeff_norm = 0.0;
  std::string eigen_file;
  // Semiclassical: one per region. Large: one per (sector, lambda), sector-major.
  std::vector<WeylReport> reports;
  bool pt = false;
  bool symmetric = false;
  bool conjugation = false;
  double residual_bound = 0.0;
  int nonreal = 0;
  int trusted = 0;
  bool failed = false;
  std::string error;
  double seconds = 0.0;
  std::vector<cplx> eigenvalues;
  std::vector<bool> boundary_flags;
};

struct RegionSummary {
  json region;
  double prediction = 0.0;
  double volume = 0.0;
  double volume_fine = 0.0;
  double mean_count = 0.0;
  double mean_deviation = 0.0;
  double min_deviation = 0.0;
  double max_deviation = 0.0;
  double median_relative_deviation = 0.0;
  // Trials with |count - prediction| <= rel_tol * prediction.
  int within_rel_tol = 0;
  // success[r_index][eps_tilde_index]: fraction of trials under the bound.
  std::vector<std::vector<double>> success;
};

struct LambdaSummary {
  double lambda = 0.0;
  bool trusted = true;
  double prediction = 0.0;
  double mean_count = 0.0;
  double mean_abs_deviation = 0.0;
  std::vector<int> counts;  // per trial
};

struct SectorSummary {
  json region;
  std::optional<int> n0_theta1;
  std::optional<int> n0_theta2;
  std::vector<LambdaSummary> lambdas;
  std::optional<double> growth_exponent;  // fit of mean counts vs lambda
  std::vector<std::optional<double>> trial_exponents;
  std::optional<double> deviation_exponent;
  double expected_exponent = 0.5;  // n/m
  std::optional<double> largest_trusted_lambda;
  // Trials with relative deviation <= rel_tol at the largest trusted lambda.
  int within_rel_tol = 0;
};

struct TrustValidation {
  bool performed = false;
  double radius = 0.0;
  int count_K = 0;
  int count_2K = 0;
  double hausdorff = 0.0;
};

struct CampaignSummary {
  WeylMode mode = WeylMode::semiclassical;
  std::string config_hash;
  std::string code_version = PTWEYL_VERSION;
  int trials = 0;
  int failed = 0;
  int pt_pass = 0;
  int symmetric_pass = 0;
  int conjugation_pass = 0;
  double max_residual = 0.0;
  json plan;
  std::vector<std::string> warnings;
  // Semiclassical.
  std::vector<RegionSummary> regions;
  double range_fraction = 1.0;
  // Large.
  std::vector<SectorSummary> sectors;
  double trust_radius = 0.0;
  TrustValidation trust;

  std::vector<TrialRecord> records;
  std::vector<std::string> files;  // relative paths written, in order
  double seconds = 0.0;

  json to_json() const;
};

namespace detail {

inline int worker_count(int jobs) {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("PTWEYL_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return std::max(1, std::min(n, jobs));
}

// Runs body(i) for i in [0, jobs); results must be written by index.
template <class F>
void parallel_for(int jobs, F&& body) {
  const int workers = worker_count(jobs);
  if (workers == 1) {
    for (int i = 0; i < jobs; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < jobs; i = next++) body(i);
    });
  for (auto& t : pool) t.join();
}

inline std::optional<double> fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < xs.size(); ++i) pts.emplace_back(xs[i], ys[i]);
  return loglog_slope(pts);
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline std::string eigen_csv(const TrialRecord& rec) {
  std::string out = "re,im,trial,flag_boundary\n";
  for (std::size_t i = 0; i < rec.eigenvalues.size(); ++i) {
    out += format_double(rec.eigenvalues[i].real());
    out += ',';
    out += format_double(rec.eigenvalues[i].imag());
    out += ',';
    out += std::to_string(rec.index);
    out += ',';
    out += (i < rec.boundary_flags.size() && rec.boundary_flags[i]) ? '1' : '0';
    out += '\n';
  }
  return out;
}

inline std::string trial_file_name(int index) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "eigenvalues/trial_%04d.csv", index);
  return buf;
}

inline void persist(CampaignSummary& summary, const std::string& dir) {
  if (dir.empty()) return;
  namespace fs = std::filesystem;
  const fs::path root(dir);
  json manifest_files = json::array();
  for (auto& rec : summary.records) {
    if (rec.failed) continue;
    rec.eigen_file = trial_file_name(rec.index);
    const std::string csv = eigen_csv(rec);
    write_text_file(root / rec.eigen_file, csv);
    summary.files.push_back(rec.eigen_file);
    manifest_files.push_back({{"path", rec.eigen_file}, {"fnv1a64", hex64(fnv1a64(csv))}});
  }
  const std::string sj = summary.to_json().dump(2) + "\n";
  write_text_file(root / "summary.json", sj);
  summary.files.push_back("summary.json");
  manifest_files.push_back({{"path", "summary.json"}, {"fnv1a64", hex64(fnv1a64(sj))}});

  json timing = {{"campaign_seconds", summary.seconds}, {"trials", json::array()}};
  for (const auto& rec : summary.records) timing["trials"].push_back({{"trial", rec.index}, {"seconds", rec.seconds}});
  write_text_file(root / "timing.json", timing.dump(2) + "\n");

  const json manifest = {{"config_hash", summary.config_hash},
                         {"code_version", summary.code_version},
                         {"files", manifest_files}};
  write_text_file(root / "manifest.json", manifest.dump(2) + "\n");
  summary.files.push_back("manifest.json");
}

}  // namespace detail

inline json CampaignSummary::to_json() const {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  auto opti = [](const std::optional<int>& v) { return v ? json(*v) : json(nullptr); };
  json recs = json::array();
  for (const auto& r : records) {
    json reps = json::array();
    for (const auto& w : r.reports) reps.push_back(ptweyl::to_json(w));
    recs.push_back({{"trial", r.index},
                    {"seed", r.seed},
                    {"coeff_norm", r.coeff_norm},
                    {"eigenvalues_file", r.eigen_file},
                    {"reports", reps},
                    {"pt", r.pt},
                    {"symmetric", r.symmetric},
                    {"conjugation", r.conjugation},
                    {"residual_bound", r.residual_bound},
                    {"nonreal", r.nonreal},
                    {"trusted", r.trusted},
                    {"failed", r.failed},
                    {"error", r.error}});
  }
  json out = {{"mode", ptweyl::to_string(mode)},
              {"config_hash", config_hash},
              {"code_version", code_version},
              {"trials", trials},
              {"failed", failed},
              {"pt_pass", pt_pass},
              {"symmetric_pass", symmetric_pass},
              {"conjugation_pass", conjugation_pass},
              {"max_residual", max_residual},
              {"plan", plan},
              {"warnings", warnings},
              {"records", recs}};
  if (mode == WeylMode::semiclassical) {
    json regs = json::array();
    for (const auto& r : regions)
      regs.push_back({{"region", r.region},
                      {"prediction", r.prediction},
                      {"volume", r.volume},
                      {"volume_fine", r.volume_fine},
                      {"mean_count", r.mean_count},
                      {"mean_deviation", r.mean_deviation},
                      {"min_deviation", r.min_deviation},
                      {"max_deviation", r.max_deviation},
                      {"median_relative_deviation", r.median_relative_deviation},
                      {"within_rel_tol", r.within_rel_tol},
                      {"success_fraction", r.success}});
    out["regions"] = regs;
    out["range_fraction"] = range_fraction;
  } else {
    json secs = json::array();
    for (const auto& s : sectors) {
      json lams = json::array();
      for (const auto& l : s.lambdas)
        lams.push_back({{"lambda", l.lambda},
                        {"trusted", l.trusted},
                        {"prediction", l.prediction},
                        {"mean_count", l.mean_count},
                        {"mean_abs_deviation", l.mean_abs_deviation},
                        {"counts", l.counts}});
      json te = json::array();
      for (const auto& e : s.trial_exponents) te.push_back(opt(e));
      secs.push_back({{"region", s.region},
                      {"n0_theta1", opti(s.n0_theta1)},
                      {"n0_theta2", opti(s.n0_theta2)},
                      {"lambdas", lams},
                      {"growth_exponent", opt(s.growth_exponent)},
                      {"expected_exponent", s.expected_exponent},
                      {"trial_exponents", te},
                      {"deviation_exponent", opt(s.deviation_exponent)},
                      {"largest_trusted_lambda", opt(s.largest_trusted_lambda)},
                      {"within_rel_tol", s.within_rel_tol}});
    }
    out["sectors"] = secs;
    out["trust_radius"] = trust_radius;
    out["trust_validation"] = {{"performed", trust.performed},
                               {"radius", trust.radius},
                               {"count_K", trust.count_K},
                               {"count_2K", trust.count_2K},
                               {"hausdorff", trust.hausdorff}};
  }
  return out;
}

namespace detail {

inline void tally_verdicts(CampaignSummary& s) {
  for (const auto& r : s.records) {
    if (r.failed) {
      ++s.failed;
      continue;
    }
    s.pt_pass += r.pt;
    s.symmetric_pass += r.symmetric;
    s.conjugation_pass += r.conjugation;
    s.max_residual = std::max(s.max_residual, r.residual_bound);
  }
}

inline int count_nonreal(const std::vector<cplx>& ev, double scale) {
  int n = 0;
  for (cplx z : ev)
    if (std::abs(z.imag()) > 1e-10 * std::max(1.0, scale)) ++n;
  return n;
}

inline double spectral_radius(const std::vector<cplx>& ev) {
  double r = 0.0;
  for (cplx z : ev) r = std::max(r, std::abs(z));
  return r;
}

}  // namespace detail

// Everything a trial needs besides its seed: the unperturbed matrix, the
// perturbation basis and the coupling. Shared read-only across workers.
class TrialFactory {
public:
  explicit TrialFactory(const ExperimentConfig& cfg) : cfg_(cfg), basis_(cfg.K) {
    cfg.validate();
    P_ = assemble_operator(cfg.op, basis_, &diag_);
    if (cfg.mode == WeylMode::semiclassical) {
      PlanOverrides ov = cfg.plan.overrides;
      ov.cutoff = cfg.K;
      plan_ = derive_plan(cfg.op.h, cfg.op.order(), cfg.plan.s, cfg.plan.eps, cfg.plan.tau0, ov);
      elems_ = enumerate_perturb_basis(basis_, plan_.L / cfg.op.h);
      if (elems_.empty()) throw ValidationError("perturbation basis is empty (L too small)");
      coupling_ = plan_.coupling_effective;
    } else {
      cfg.schedule.validate();
      elems_ = enumerate_perturb_basis(basis_, std::sqrt(static_cast<double>(cfg.K) * cfg.K + 1.0));
      coupling_ = cfg.large_coupling;
    }
  }

  const FourierBasis& basis() const { return basis_; }
  const ComplexMatrix& unperturbed() const { return P_; }
  const PerturbationPlan& plan() const { return plan_; }
  const std::vector<PerturbBasisElement>& elements() const { return elems_; }
  const Diagnostics& diagnostics() const { return diag_; }
  double coupling() const { return coupling_; }

  CoeffVector coefficients(std::uint64_t seed) const {
    if (cfg_.mode == WeylMode::semiclassical)
      return sample_ball(static_cast<int>(elems_.size()), plan_.R, seed);
    std::vector<double> mus;
    mus.reserve(elems_.size());
    for (const auto& e : elems_) mus.push_back(e.mu0);
    return sample_gaussian(cfg_.schedule, mus, seed);
  }

  TrigPoly potential(std::uint64_t seed, double* norm = nullptr) const {
    const CoeffVector c = coefficients(seed);
    if (norm) *norm = c.norm();
    return build_q(c, elems_);
  }

  ComplexMatrix matrix(std::uint64_t seed, double* norm = nullptr) const {
    return perturbed_matrix(P_, potential(seed, norm), coupling_, basis_);
  }

private:
  const ExperimentConfig& cfg_;
  FourierBasis basis_;
  Diagnostics diag_;
  ComplexMatrix P_;
  PerturbationPlan plan_;
  std::vector<PerturbBasisElement> elems_;
  double coupling_ = 0.0;
};

// Monte Carlo over uniform-ball PT perturbations of a semiclassical operator.
inline CampaignSummary run_semiclassical(const ExperimentConfig& cfg) {
  if (cfg.mode != WeylMode::semiclassical) throw ValidationError("run_semiclassical: mode must be semiclassical");
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const OperatorSpec& op = cfg.op;
  const TrialFactory factory(cfg);
  const PerturbationPlan& plan = factory.plan();
  const Diagnostics& diag = factory.diagnostics();

  CampaignSummary summary;
  summary.mode = cfg.mode;
  summary.config_hash = config_hash(cfg);
  summary.trials = cfg.trials;
  summary.plan = to_json(plan);
  summary.plan["D_used"] = factory.elements().size();
  summary.warnings = diag.warnings;
  if (plan.L_capped) summary.warnings.push_back("L capped at h K = " + format_double(plan.L));
  if (!check_pt_symbol(op).pt) summary.warnings.push_back("operator is not PT-symmetric");

  WeylOptions wopt;
  wopt.mode = WeylMode::semiclassical;
  wopt.h = op.h;
  wopt.r_list = cfg.r_list;
  wopt.eps_tilde_list = cfg.eps_tilde_list;
  wopt.C = cfg.bound_C;
  double reach = 0.0;
  for (const auto& r : cfg.regions) reach = std::max(reach, r.outer_radius());
  double r_max = 0.0;
  for (double r : cfg.r_list) r_max = std::max(r_max, r);
  const QuadratureGrid grid{cfg.grid_nx, cfg.grid_nxi,
                            cfg.grid_xi_max.value_or(xi_bound(op, reach + r_max))};
  std::vector<WeylPrediction> preds;
  for (const auto& r : cfg.regions) preds.push_back(weyl_predict(op, r, grid, wopt));

  summary.records.resize(static_cast<std::size_t>(cfg.trials));
  detail::parallel_for(cfg.trials, [&](int t) {
    TrialRecord& rec = summary.records[static_cast<std::size_t>(t)];
    const auto t0 = std::chrono::steady_clock::now();
    rec.index = t;
    rec.seed = trial_seed(cfg.base_seed, static_cast<std::uint64_t>(t));
    try {
      const ComplexMatrix A = factory.matrix(rec.seed, &rec.coeff_norm);
      const SpectralResult eigs = eigenvalues(A);
      rec.eigenvalues = eigs.eigenvalues;
      rec.residual_bound = eigs.residual_bound;
      rec.pt = pt_matrix_check(A);
      rec.symmetric = symmetry_check(A);
      rec.conjugation = spectrum_conjugation_check(eigs, 1e-8);
      rec.nonreal = detail::count_nonreal(eigs.eigenvalues, detail::spectral_radius(eigs.eigenvalues));
      rec.trusted = static_cast<int>(eigs.eigenvalues.size());
      rec.boundary_flags.assign(eigs.eigenvalues.size(), false);
      for (std::size_t r = 0; r < cfg.regions.size(); ++r) {
        rec.reports.push_back(weyl_report(preds[r], eigs.eigenvalues, cfg.regions[r], wopt));
        const RegionCount rc = count_in_region(eigs.eigenvalues, cfg.regions[r]);
        for (std::size_t i = 0; i < rc.flags.size(); ++i)
          if (rc.flags[i]) rec.boundary_flags[i] = true;
      }
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.error = e.what();
      rec.reports.clear();
      rec.eigenvalues.clear();
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  });
  detail::tally_verdicts(summary);

  // Fraction of eigenvalues near the closure of the symbol range.
  double zmax = 0.0;
  for (const auto& rec : summary.records) zmax = std::max(zmax, detail::spectral_radius(rec.eigenvalues));
  std::size_t total = 0, in_range = 0;
  if (zmax > 0.0) {
    const QuadratureGrid range_grid{1024, 8192, xi_bound(op, zmax + cfg.range_tol)};
    const SymbolRangeIndex index(op, range_grid, cfg.range_tol);
    for (const auto& rec : summary.records)
      for (cplx z : rec.eigenvalues) {
        ++total;
        in_range += index.near(z);
      }
  }
  summary.range_fraction = total ? static_cast<double>(in_range) / total : 1.0;

  for (std::size_t r = 0; r < cfg.regions.size(); ++r) {
    RegionSummary rs;
    rs.region = to_json(cfg.regions[r]);
    rs.prediction = preds[r].prediction;
    rs.volume = preds[r].volume;
    rs.volume_fine = preds[r].volume_fine;
    rs.success.assign(cfg.r_list.size(), std::vector<double>(cfg.eps_tilde_list.size(), 0.0));
    std::vector<double> devs, rel;
    double count_sum = 0.0;
    for (const auto& rec : summary.records) {
      if (rec.failed) continue;
      const WeylReport& w = rec.reports[r];
      devs.push_back(w.deviation);
      rel.push_back(w.prediction > 0.0 ? w.deviation / w.prediction : INFINITY);
      count_sum += w.count;
      if (w.deviation <= cfg.rel_tol * w.prediction) ++rs.within_rel_tol;
      for (std::size_t a = 0; a < w.tube.size(); ++a)
        for (std::size_t b = 0; b < cfg.eps_tilde_list.size(); ++b)
          if (w.deviation <= deviation_bound(op.h, cfg.bound_C, w.tube[a].first, cfg.eps_tilde_list[b], w.tube[a].second))
            rs.success[a][b] += 1.0;
    }
    const double ok = static_cast<double>(devs.size());
    if (ok > 0) {
      rs.mean_count = count_sum / ok;
      double sum = 0.0;
      for (double d : devs) sum += d;
      rs.mean_deviation = sum / ok;
      rs.min_deviation = *std::min_element(devs.begin(), devs.end());
      rs.max_deviation = *std::max_element(devs.begin(), devs.end());
      rs.median_relative_deviation = detail::median(rel);
      for (auto& row : rs.success)
        for (double& v : row) v /= ok;
    }
    summary.regions.push_back(std::move(rs));
  }
  summary.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  detail::persist(summary, cfg.output_dir);
  return summary;
}


namespace detail {

// Symmetric Hausdorff distance between two finite point sets.
inline double hausdorff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return INFINITY;
  auto directed = [](const std::vector<cplx>& x, const std::vector<cplx>& y) {
    double worst = 0.0;
    for (cplx p : x) {
      double best = INFINITY;
      for (cplx q : y) best = std::min(best, std::abs(p - q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

}  // namespace detail

// Large-eigenvalue campaign: Gaussian PT perturbations of an unscaled
// operator, sector counts inside the trust disc against the principal-symbol
// Weyl term.
inline CampaignSummary run_large(const ExperimentConfig& cfg) {
  if (cfg.mode != WeylMode::large) throw ValidationError("run_large: mode must be large");
  cfg.validate();
  cfg.schedule.validate();
  const auto start = std::chrono::steady_clock::now();
  const OperatorSpec& op = cfg.op;
  const TrialFactory factory(cfg);
  const Diagnostics& diag = factory.diagnostics();
  const auto& elems = factory.elements();
  const int m = op.order();

  CampaignSummary summary;
  summary.mode = cfg.mode;
  summary.config_hash = config_hash(cfg);
  summary.trials = cfg.trials;
  summary.warnings = diag.warnings;
  summary.plan = {{"schedule",
                   {{"rho", cfg.schedule.rho}, {"beta", cfg.schedule.beta}, {"s", cfg.schedule.s},
                    {"eps", cfg.schedule.eps}, {"exponent_scale", cfg.schedule.c}, {"M", cfg.schedule.M()}}},
                  {"coupling", cfg.large_coupling},
                  {"D", elems.size()}};
  if (!check_pt_symbol(op).pt) summary.warnings.push_back("operator is not PT-symmetric");
  summary.trust_radius = std::pow(cfg.trust_eta * cfg.K, m) * op.min_principal_modulus();

  WeylOptions wopt;
  wopt.mode = WeylMode::large;
  wopt.h = 1.0;
  wopt.r_list = cfg.r_list;
  wopt.eps_tilde_list = cfg.eps_tilde_list;
  wopt.C = cfg.bound_C;
  double r_max = 0.0;
  for (double r : cfg.r_list) r_max = std::max(r_max, r);

  struct Cell {
    Region region;
    bool trusted;
    WeylPrediction pred;
  };
  std::vector<std::vector<Cell>> cells;  // [sector][lambda]
  for (std::size_t s = 0; s < cfg.regions.size(); ++s) {
    SectorSummary ss;
    const auto& sec = std::get<Sector>(cfg.regions[s].shape());
    ss.region = to_json(cfg.regions[s]);
    ss.region.erase("lambda");
    ss.expected_exponent = 1.0 / m;
    ss.n0_theta1 = nondegeneracy_order(op, sec.theta1, cfg.n0_max);
    ss.n0_theta2 = nondegeneracy_order(op, sec.theta2, cfg.n0_max);
    if (!sec.full_turn() && (!ss.n0_theta1 || !ss.n0_theta2))
      summary.warnings.push_back("sector " + std::to_string(s) +
                                 ": nondegeneracy fails at a boundary direction; the sector law need not apply");
    std::vector<Cell> row;
    for (double lam : cfg.lambdas) {
      Region reg = cfg.regions[s].with_lambda(lam);
      const bool trusted = reg.outer_radius() <= summary.trust_radius;
      const QuadratureGrid grid{cfg.grid_nx, cfg.grid_nxi,
                                cfg.grid_xi_max.value_or(xi_bound(op, reg.outer_radius() + r_max, true))};
      row.push_back({reg, trusted, weyl_predict(op, reg, grid, wopt)});
      if (!trusted)
        summary.warnings.push_back("lambda " + format_double(lam) + " exceeds the trust radius; excluded");
    }
    cells.push_back(std::move(row));
    summary.sectors.push_back(std::move(ss));
  }

  summary.records.resize(static_cast<std::size_t>(cfg.trials));
  detail::parallel_for(cfg.trials, [&](int t) {
    TrialRecord& rec = summary.records[static_cast<std::size_t>(t)];
    const auto t0 = std::chrono::steady_clock::now();
    rec.index = t;
    rec.seed = trial_seed(cfg.base_seed, static_cast<std::uint64_t>(t));
    try {
      const ComplexMatrix A = factory.matrix(rec.seed, &rec.coeff_norm);
      const SpectralResult eigs = eigenvalues(A);
      rec.residual_bound = eigs.residual_bound;
      rec.pt = pt_matrix_check(A);
      rec.symmetric = symmetry_check(A);
      rec.conjugation = spectrum_conjugation_check(eigs, 1e-8);
      rec.eigenvalues = eigs.eigenvalues;
      rec.nonreal = detail::count_nonreal(eigs.eigenvalues, detail::spectral_radius(eigs.eigenvalues));
      std::vector<cplx> inside;
      for (cplx z : eigs.eigenvalues)
        if (std::abs(z) <= summary.trust_radius) inside.push_back(z);
      rec.trusted = static_cast<int>(inside.size());
      rec.boundary_flags.assign(eigs.eigenvalues.size(), false);
      for (const auto& row : cells)
        for (const auto& c : row) {
          if (!c.trusted) {
            rec.reports.push_back(WeylReport{});
            continue;
          }
          rec.reports.push_back(weyl_report(c.pred, inside, c.region, wopt));
          const RegionCount rc = count_in_region(eigs.eigenvalues, c.region);
          for (std::size_t i = 0; i < rc.flags.size(); ++i)
            if (rc.flags[i]) rec.boundary_flags[i] = true;
        }
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.error = e.what();
      rec.reports.clear();
      rec.eigenvalues.clear();
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  });
  detail::tally_verdicts(summary);

  const std::size_t nl = cfg.lambdas.size();
  for (std::size_t s = 0; s < cells.size(); ++s) {
    SectorSummary& ss = summary.sectors[s];
    std::vector<double> lam_fit, count_fit, dev_fit;
    for (std::size_t l = 0; l < nl; ++l) {
      LambdaSummary ls;
      ls.lambda = cfg.lambdas[l];
      ls.trusted = cells[s][l].trusted;
      ls.prediction = cells[s][l].pred.prediction;
      int ok = 0;
      for (const auto& rec : summary.records) {
        if (rec.failed) continue;
        const WeylReport& w = rec.reports[s * nl + l];
        ls.counts.push_back(w.count);
        ls.mean_count += w.count;
        ls.mean_abs_deviation += w.deviation;
        ++ok;
      }
      if (ok) {
        ls.mean_count /= ok;
        ls.mean_abs_deviation /= ok;
      }
      if (ls.trusted) {
        lam_fit.push_back(ls.lambda);
        count_fit.push_back(ls.mean_count);
        dev_fit.push_back(ls.mean_abs_deviation);
        if (!ss.largest_trusted_lambda || ls.lambda > *ss.largest_trusted_lambda) ss.largest_trusted_lambda = ls.lambda;
      }
      ss.lambdas.push_back(std::move(ls));
    }
    ss.growth_exponent = detail::fit_loglog(lam_fit, count_fit);
    ss.deviation_exponent = detail::fit_loglog(lam_fit, dev_fit);
    for (const auto& rec : summary.records) {
      if (rec.failed) continue;
      std::vector<double> xs, ys;
      std::optional<std::size_t> top;
      for (std::size_t l = 0; l < nl; ++l) {
        if (!cells[s][l].trusted) continue;
        xs.push_back(cfg.lambdas[l]);
        ys.push_back(rec.reports[s * nl + l].count);
        if (!top || cfg.lambdas[l] > cfg.lambdas[*top]) top = l;
      }
      ss.trial_exponents.push_back(detail::fit_loglog(xs, ys));
      if (top) {
        const WeylReport& w = rec.reports[s * nl + *top];
        if (w.prediction > 0.0 && w.deviation <= cfg.rel_tol * w.prediction) ++ss.within_rel_tol;
      }
    }
  }

  if (cfg.validate_trust) {
    // Same random potential at cutoffs K and 2K; compare spectra in the disc.
    const FourierBasis wide(2 * cfg.K);
    const TrigPoly q = factory.potential(trial_seed(cfg.base_seed, 0));
    const ComplexMatrix A1 = perturbed_matrix(factory.unperturbed(), q, cfg.large_coupling, factory.basis());
    const ComplexMatrix A2 = perturbed_matrix(assemble_operator(op, wide), q, cfg.large_coupling, wide);
    std::vector<cplx> e1, e2;
    for (cplx z : eigenvalues(A1).eigenvalues)
      if (std::abs(z) <= summary.trust_radius) e1.push_back(z);
    for (cplx z : eigenvalues(A2).eigenvalues)
      if (std::abs(z) <= summary.trust_radius) e2.push_back(z);
    summary.trust = {true, summary.trust_radius, static_cast<int>(e1.size()), static_cast<int>(e2.size()),
                     detail::hausdorff(e1, e2)};
  }
  summary.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  detail::persist(summary, cfg.output_dir);
  return summary;
}

}  // namespace ptweyl
