#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "discretize.hpp"
#include "errors.hpp"
#include "rng.hpp"
#include "trig_poly.hpp"

namespace ptweyl {

// One inequality of the parameter ledger, evaluated as lhs <relation> rhs.
struct LedgerCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
};

struct PlanOverrides {
  std::optional<double> kappa;
  std::optional<double> M;
  std::optional<double> Mtilde;
  std::optional<double> L;
  std::optional<double> R;
  std::optional<double> coupling;
  // Available Fourier cutoff K; caps L at h K so every basis element fits.
  std::optional<int> cutoff;
  // The unquantified constant C of the L and R bands.
  double C = 1.0;
};

struct PerturbationPlan {
  int n = 1;
  int m = 2;
  double h = 0.0;
  double kappa = 0.25;
  double s = 1.0;
  double eps = 0.25;
  double M = 0.0;
  double Mtilde = 0.0;
  double N1 = 0.0;
  double tau0 = 0.0;
  double delta = 0.0;
  double L = 0.0;
  double L_band_lo = 0.0;
  double L_band_hi = 0.0;
  bool L_capped = false;
  double R = 1.0;
  double R_band_lo = 0.0;
  double R_band_hi = 0.0;
  long long D = 0;
  double eps0 = 0.0;
  double C = 1.0;
  // delta h^{N1} = tau0 h^{2 N1 + n}; usually far below double resolution.
  double coupling_faithful = 0.0;
  // What perturbed_matrix actually applies.
  double coupling_effective = 0.0;
  bool coupling_overridden = false;
  std::vector<LedgerCheck> checks;

  bool all_checks_hold() const {
    for (const auto& c : checks)
      if (!c.holds) return false;
    return true;
  }
};

inline double eps0_of(double h, double kappa, double tau0, int n = 1) {
  const double lh = std::log(1.0 / h);
  return (std::pow(h, kappa) + std::pow(h, n) * lh) * (std::log(1.0 / tau0) + lh * lh);
}

// Parameter ledger for the semiclassical perturbation. Domain violations
// throw ValidationError naming the failed inequality; band and exponent
// inequalities are evaluated and reported in plan.checks.
inline PerturbationPlan derive_plan(double h, int m, double s, double eps,
                                   std::optional<double> tau0 = std::nullopt,
                                   const PlanOverrides& ov = {}) {
  constexpr int n = 1;
  if (!(h > 0.0 && h <= 1.0)) throw ValidationError("plan: 0 < h <= 1 violated");
  if (m < 2) throw ValidationError("plan: m >= 2 violated");
  if (!(s > 0.5 * n)) throw ValidationError("plan: s > n/2 violated");
  if (!(eps > 0.0 && eps < s - 0.5 * n)) throw ValidationError("plan: 0 < eps < s - n/2 violated");
  const double t0 = tau0.value_or(std::sqrt(h));
  if (!(t0 > 0.0)) throw ValidationError("plan: tau0 > 0 violated");
  if (!(t0 <= std::sqrt(h))) throw ValidationError("plan: tau0 <= sqrt(h) violated");
  if (!(ov.C > 0.0)) throw ValidationError("plan: C > 0 violated");

  PerturbationPlan p;
  p.n = n;
  p.m = m;
  p.h = h;
  p.s = s;
  p.eps = eps;
  p.tau0 = t0;
  p.C = ov.C;
  p.kappa = ov.kappa.value_or(1.0 / (2.0 * m));
  if (!(p.kappa > 0.0 && p.kappa <= 1.0)) throw ValidationError("plan: 0 < kappa <= 1 violated");

  const double gap = s - 0.5 * n - eps;
  const double M_lo = (3.0 * n - p.kappa) / gap;
  p.M = ov.M.value_or(M_lo);
  const double Mt_lo = 1.5 * n - p.kappa + (0.5 * n + eps) * p.M;
  p.Mtilde = ov.Mtilde.value_or(Mt_lo);
  p.N1 = p.Mtilde + s * p.M + 0.5 * n;
  p.delta = t0 * std::pow(h, p.N1 + n);
  p.coupling_faithful = p.delta * std::pow(h, p.N1);
  p.eps0 = eps0_of(h, p.kappa, t0, n);

  p.L_band_lo = std::pow(h, (p.kappa - 3.0 * n) / gap);
  p.L_band_hi = p.C * std::pow(h, -p.M);
  p.L = ov.L.value_or(p.L_band_hi);
  if (ov.cutoff) {
    const double cap = h * *ov.cutoff;
    if (p.L > cap) {
      p.L = cap;
      p.L_capped = true;
    }
  }
  p.R_band_lo = std::pow(h, -(0.5 * n + eps) * p.M + p.kappa - 1.5 * n) / p.C;
  p.R_band_hi = p.C * std::pow(h, -p.Mtilde);
  p.R = ov.R.value_or(1.0);

  // D = #{k >= 0 modes : h sqrt(k^2 + 1) <= L}, counting cos and sin.
  const double mu0_max = p.L / h;
  if (mu0_max >= 1.0) {
    double kmax = std::floor(std::sqrt(mu0_max * mu0_max - 1.0));
    if (ov.cutoff) kmax = std::min(kmax, static_cast<double>(*ov.cutoff));
    p.D = kmax > 4e18 ? std::numeric_limits<long long>::max()
                      : 2 * static_cast<long long>(kmax) + 1;
  }

  p.coupling_overridden = ov.coupling.has_value();
  p.coupling_effective = ov.coupling.value_or(std::pow(h, 4) * t0);

  auto ge = [&](std::string name, double lhs, double rhs) {
    p.checks.push_back({std::move(name), lhs, rhs, lhs >= rhs});
  };
  ge("M >= (3n - kappa)/(s - n/2 - eps)", p.M, M_lo);
  ge("Mtilde >= 3n/2 - kappa + (n/2 + eps) M", p.Mtilde, Mt_lo);
  ge("L > h^((kappa - 3n)/(s - n/2 - eps))", p.L, p.L_band_lo);
  ge("C h^-M >= L", p.L_band_hi, p.L);
  ge("R >= h^(-(n/2 + eps) M + kappa - 3n/2) / C", p.R, p.R_band_lo);
  ge("C h^-Mtilde >= R", p.R_band_hi, p.R);
  ge("1 > eps0(h)", 1.0, p.eps0);
  ge("D >= 1", static_cast<double>(p.D), 1.0);
  return p;
}

// Real coefficient vector of a random potential.
struct CoeffVector {
  std::vector<double> alpha;
  std::uint64_t seed = 0;

  double norm() const {
    double s = 0.0;
    for (double a : alpha) s += a * a;
    return std::sqrt(s);
  }
};

// Uniform law on the open ball B(0, R) in R^D: Gaussian direction, radius
// R U^{1/D}.
inline CoeffVector sample_ball(int D, double R, std::uint64_t seed) {
  if (D < 1) throw ValidationError("sample_ball: D >= 1 required");
  if (!(R > 0.0)) throw ValidationError("sample_ball: R > 0 required");
  Rng rng(seed);
  CoeffVector out;
  out.seed = seed;
  out.alpha.resize(static_cast<std::size_t>(D));
  double nrm = 0.0;
  do {
    nrm = 0.0;
    for (double& a : out.alpha) {
      a = rng.normal();
      nrm += a * a;
    }
  } while (nrm == 0.0);
  nrm = std::sqrt(nrm);
  const double radius = R * std::pow(rng.uniform(), 1.0 / D);
  for (double& a : out.alpha) a *= radius / nrm;
  return out;
}

// sigma_j = mu^{-rho} exp(-c mu^{beta/(M+1)}), c in {0, 1}.
struct GaussianSchedule {
  double rho = 2.0;
  double beta = 0.0;
  double s = 1.0;
  double eps = 0.25;
  int c = 0;

  // M = (3n - 1/2)/(s - n/2 - eps) with n = 1.
  double M() const { return 2.5 / (s - 0.5 - eps); }

  void validate() const {
    if (!(rho > 1.0)) throw ValidationError("schedule: rho > n violated");
    if (!(beta >= 0.0 && beta < 0.5)) throw ValidationError("schedule: 0 <= beta < 1/2 violated");
    if (!(s > 0.5 && s < rho - 0.5)) throw ValidationError("schedule: n/2 < s < rho - n/2 violated");
    if (!(eps > 0.0 && eps < s - 0.5)) throw ValidationError("schedule: 0 < eps < s - n/2 violated");
    if (c != 0 && c != 1) throw ValidationError("schedule: exponent_scale must be 0 or 1");
  }

  double sigma(double mu0) const {
    return std::pow(mu0, -rho) * std::exp(-c * std::pow(mu0, beta / (M() + 1.0)));
  }
};

inline CoeffVector sample_gaussian(const GaussianSchedule& schedule, std::span<const double> mus,
                                   std::uint64_t seed) {
  schedule.validate();
  Rng rng(seed);
  CoeffVector out;
  out.seed = seed;
  out.alpha.reserve(mus.size());
  for (double mu : mus) {
    if (!(mu > 0.0)) throw ValidationError("sample_gaussian: mu values must be positive");
    out.alpha.push_back(schedule.sigma(mu) * rng.normal());
  }
  return out;
}

// q = sum_j alpha_j eps_j. Real alpha gives a PT potential.
template <class Scalar>
TrigPoly build_q(std::span<const Scalar> alpha, const std::vector<PerturbBasisElement>& elems) {
  if (alpha.size() != elems.size())
    throw ValidationError("build_q: coefficient count " + std::to_string(alpha.size()) +
                          " does not match basis size " + std::to_string(elems.size()));
  TrigPoly q;
  for (std::size_t j = 0; j < elems.size(); ++j) {
    const cplx a(alpha[j]);
    if (a == cplx{}) continue;
    for (const auto& [k, c] : elems[j].function.terms()) q.add(k, a * c);
  }
  return q;
}

inline TrigPoly build_q(const CoeffVector& coeffs, const std::vector<PerturbBasisElement>& elems) {
  return build_q<double>(std::span<const double>(coeffs.alpha), elems);
}

inline ComplexMatrix perturbed_matrix(const ComplexMatrix& P, const TrigPoly& q, double coupling,
                                      const FourierBasis& basis) {
  if (P.rows() != basis.dim() || P.cols() != basis.dim())
    throw ValidationError("perturbed_matrix: dimension mismatch");
  if (coupling == 0.0) return P;
  return P + coupling * assemble_multiplication(q, basis);
}

inline ComplexMatrix perturbed_matrix(const ComplexMatrix& P, const TrigPoly& q,
                                      const PerturbationPlan& plan, const FourierBasis& basis) {
  return perturbed_matrix(P, q, plan.coupling_effective, basis);
}

}  // namespace ptweyl
