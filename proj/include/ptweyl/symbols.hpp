#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "operator_spec.hpp"
#include "phase_space.hpp"

namespace ptweyl {

struct PtSymbolReport {
  bool pt = false;
  // Always true: divergence-form specs are symmetric by construction.
  bool symmetric = true;
};

inline PtSymbolReport check_pt_symbol(const OperatorSpec& spec, double tol = 0.0) {
  bool pt = spec.potential.is_pt(tol);
  for (const auto& t : spec.div_terms) pt = pt && t.coeff.is_pt(tol);
  return {pt, true};
}

// Samples of V_z(t) = vol{(x, xi) : |p(x, xi) - z|^2 <= t}.
struct SymbolAnalysis {
  cplx z;
  std::vector<std::pair<double, double>> vz_samples;
  // Admissible exponent: fitted slope clamped to [1/(2m), 1], or 1/(2m) when
  // the samples do not support a fit.
  double kappa = 1.0;
  int order = 2;
};

namespace detail {

inline std::optional<double> loglog_slope(const std::vector<std::pair<double, double>>& pts) {
  std::vector<std::pair<double, double>> lp;
  for (const auto& [t, v] : pts)
    if (t > 0.0 && v > 0.0) lp.emplace_back(std::log(t), std::log(v));
  if (lp.size() < 2) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (const auto& [a, b] : lp) { mx += a; my += b; }
  mx /= lp.size();
  my /= lp.size();
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [a, b] : lp) {
    sxx += (a - mx) * (a - mx);
    sxy += (a - mx) * (b - my);
  }
  if (sxx <= 0.0) return std::nullopt;
  return sxy / sxx;
}

}  // namespace detail

// Least-squares slope of log V_z(t) against log t.
// All-zero samples give 1 (the bound holds vacuously).
inline double kappa_fit(const SymbolAnalysis& analysis) {
  std::size_t positive = 0;
  for (const auto& s : analysis.vz_samples)
    if (s.second > 0.0) ++positive;
  if (positive == 0 && !analysis.vz_samples.empty()) return 1.0;
  if (positive < 4)
    throw ValidationError("kappa_fit: insufficient data (need at least 4 positive samples)");
  return *detail::loglog_slope(analysis.vz_samples);
}

inline SymbolAnalysis vz_curve(const OperatorSpec& spec, cplx z, const std::vector<double>& t_grid,
                               const QuadratureGrid& quad) {
  quad.validate();
  if (t_grid.empty()) throw ValidationError("vz_curve: empty t grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0)) throw ValidationError("vz_curve: t values must be positive");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1]))
      throw ValidationError("vz_curve: t grid must be strictly increasing");
  }
  // hits[b] counts nodes whose |p - z|^2 first drops below t_grid[b].
  std::vector<long long> hits(t_grid.size(), 0);
  for_each_symbol_value(spec, quad, false, [&](int, int, cplx p) {
    const double d2 = std::norm(p - z);
    auto it = std::lower_bound(t_grid.begin(), t_grid.end(), d2);
    if (it != t_grid.end()) ++hits[static_cast<std::size_t>(it - t_grid.begin())];
  });
  SymbolAnalysis out;
  out.z = z;
  out.order = spec.order();
  long long cum = 0;
  for (std::size_t b = 0; b < t_grid.size(); ++b) {
    cum += hits[b];
    out.vz_samples.emplace_back(t_grid[b], static_cast<double>(cum) * quad.cell_area());
  }
  const double floor_kappa = 1.0 / (2.0 * out.order);
  out.kappa = floor_kappa;
  std::size_t positive = 0;
  for (const auto& s : out.vz_samples)
    if (s.second > 0.0) ++positive;
  if (positive == 0) {
    out.kappa = 1.0;
  } else if (positive >= 4) {
    out.kappa = std::clamp(kappa_fit(out), floor_kappa, 1.0);
  }
  return out;
}

// Smallest N0 <= n0_max such that at every point of {F = theta0} on the
// cosphere bundle some derivative of F = arg p_m of order <= N0 is nonzero.
// Empty level set gives 1; a degenerate level set gives nullopt.
//
// For n = 1 the cosphere bundle is the two circles xi = +-1. Derivatives are
// central differences with spacing tied to the grid, tested against a noise
// threshold of 1e-6 times the scale of F.
inline std::optional<int> nondegeneracy_order(const OperatorSpec& spec, double theta0,
                                              int n0_max, int grid = 1024) {
  if (n0_max < 1) throw ValidationError("nondegeneracy_order: n0_max must be >= 1");
  if (grid < 16) throw ValidationError("nondegeneracy_order: grid too coarse");
  const TrigPoly a = spec.principal_coefficient();
  const int m = spec.order();
  const double two_pi = 2.0 * std::numbers::pi;
  auto wrap = [&](double v) { return std::remainder(v, two_pi); };

  std::vector<std::optional<int>> per_circle;
  for (double sign : {1.0, -1.0}) {
    const cplx sm = std::pow(sign, m);
    auto F = [&](double x) { return std::arg(a(x) * sm); };
    const double dx = two_pi / grid;
    std::vector<double> g(static_cast<std::size_t>(grid));
    double scale = 1.0;
    for (int i = 0; i < grid; ++i) {
      g[static_cast<std::size_t>(i)] = wrap(F(i * dx) - theta0);
      scale = std::max(scale, std::abs(F(i * dx)));
    }
    const double fd = dx;
    const double threshold = 1e-6 * scale;
    constexpr double kOnLevel = 1e-13;

    // Level-set points: exact hits and sign changes away from the branch cut.
    std::vector<double> roots;
    for (int i = 0; i < grid; ++i) {
      const double g0 = g[static_cast<std::size_t>(i)];
      const double g1 = g[static_cast<std::size_t>((i + 1) % grid)];
      const double x0 = i * dx;
      if (std::abs(g0) <= kOnLevel) {
        roots.push_back(x0);
      } else if (std::abs(g1) > kOnLevel && g0 * g1 < 0.0 && std::abs(g0 - g1) < 1.0) {
        double lo = x0, hi = x0 + dx, glo = g0;
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double gm = wrap(F(mid) - theta0);
          if ((gm < 0.0) == (glo < 0.0)) {
            lo = mid;
            glo = gm;
          } else {
            hi = mid;
          }
        }
        roots.push_back(0.5 * (lo + hi));
      }
    }
    if (roots.empty()) {
      per_circle.emplace_back(1);
      continue;
    }

    std::optional<int> worst = 0;
    for (double x0 : roots) {
      const double f0 = F(x0);
      std::optional<int> order_here;
      for (int k = 1; k <= n0_max && !order_here; ++k) {
        // k-th central difference of F around x0; values relative to F(x0)
        // keep the stencil continuous across the branch cut.
        double acc = 0.0;
        double binom = 1.0;
        for (int j = 0; j <= k; ++j) {
          const double xj = x0 + (0.5 * k - j) * fd;
          acc += ((j % 2) ? -binom : binom) * wrap(F(xj) - f0);
          binom = binom * (k - j) / (j + 1);
        }
        const double deriv = acc / std::pow(fd, k);
        if (std::abs(deriv) > threshold) order_here = k;
      }
      if (!order_here) {
        worst.reset();
        break;
      }
      worst = std::max(*worst, *order_here);
    }
    per_circle.push_back(worst);
  }
  int result = 1;
  for (const auto& c : per_circle) {
    if (!c) return std::nullopt;
    result = std::max(result, *c);
  }
  return result;
}

}  // namespace ptweyl
