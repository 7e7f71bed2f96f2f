#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "operator_spec.hpp"

namespace ptweyl {

// Uniform midpoint grid on [-pi, pi) x [-xi_max, xi_max].
//
// Nodes are placed symmetrically about zero in both variables, so the
// reflection x -> -x maps grid nodes onto grid nodes exactly.
struct QuadratureGrid {
  int nx = 256;
  int nxi = 256;
  double xi_max = 1.0;

  void validate() const {
    if (nx < 16 || nxi < 16)
      throw ValidationError("grid: nx and nxi must be at least 16");
    if (!(xi_max > 0.0)) throw ValidationError("grid: xi_max must be positive");
  }

  double dx() const { return 2.0 * std::numbers::pi / nx; }
  double dxi() const { return 2.0 * xi_max / nxi; }
  double cell_area() const { return dx() * dxi(); }

  double x(int i) const { return (i + 0.5 - 0.5 * nx) * dx(); }
  double xi(int j) const { return (j + 0.5 - 0.5 * nxi) * dxi(); }

  QuadratureGrid refined() const { return {2 * nx, 2 * nxi, xi_max}; }
};

// Coefficient values tabulated on the x-nodes of a grid; evaluating the
// symbol then costs a short polynomial in xi^2 per node.
class SymbolTable {
public:
  SymbolTable(const OperatorSpec& spec, const QuadratureGrid& grid, bool principal_only)
      : nx_(grid.nx) {
    const int mb = spec.max_beta();
    betas_ = mb + 1;
    values_.assign(static_cast<std::size_t>(nx_ * (betas_ + 1)), cplx{});
    std::vector<TrigPoly> by_beta(static_cast<std::size_t>(betas_));
    for (const auto& t : spec.div_terms)
      if (!principal_only || t.beta == mb) by_beta[static_cast<std::size_t>(t.beta)] += t.coeff;
    for (int i = 0; i < nx_; ++i) {
      const double x = grid.x(i);
      cplx* row = &values_[static_cast<std::size_t>(i * (betas_ + 1))];
      row[0] = principal_only ? cplx{} : spec.potential(x);
      for (int b = 0; b < betas_; ++b) row[b + 1] = by_beta[static_cast<std::size_t>(b)](x);
    }
  }

  cplx operator()(int i, double xi) const {
    const cplx* row = &values_[static_cast<std::size_t>(i * (betas_ + 1))];
    const double xi2 = xi * xi;
    cplx p = row[0];
    double pw = 1.0;
    for (int b = 0; b < betas_; ++b) {
      p += row[b + 1] * pw;
      pw *= xi2;
    }
    return p;
  }

private:
  int nx_;
  int betas_ = 0;
  std::vector<cplx> values_;
};

// Calls f(i, j, p) for every grid node, p = symbol at (x_i, xi_j).
template <class F>
void for_each_symbol_value(const OperatorSpec& spec, const QuadratureGrid& grid,
                           bool principal_only, F&& f) {
  const SymbolTable table(spec, grid, principal_only);
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.nxi; ++j) f(i, j, table(i, grid.xi(j)));
}

// Returns Xi such that |p(x, xi)| > z_max for every x and every |xi| >= Xi,
// with a 1.5 safety factor on top of the located threshold.
inline double xi_bound(const OperatorSpec& spec, double z_max, bool principal_only = false) {
  if (!spec.is_elliptic())
    throw ValidationError("xi_bound: operator is not elliptic");
  constexpr int kSamplesX = 256;
  constexpr int kSamplesXi = 4000;
  constexpr double kCap = 1e8;
  const QuadratureGrid xs{kSamplesX, 16, 1.0};
  const SymbolTable table(spec, xs, principal_only);
  auto min_modulus = [&](double xi) {
    double lo = INFINITY;
    for (int i = 0; i < kSamplesX; ++i)
      lo = std::min({lo, std::abs(table(i, xi)), std::abs(table(i, -xi))});
    return lo;
  };
  double hi = 1.0;
  while (min_modulus(hi) <= z_max) {
    hi *= 2.0;
    if (hi > kCap) throw ValidationError("xi_bound: no bound found below the search cap");
  }
  const double step = hi / kSamplesXi;
  double last_bad = 0.0;
  for (int s = 0; s <= kSamplesXi; ++s) {
    const double xi = s * step;
    if (min_modulus(xi) <= z_max) last_bad = xi;
  }
  return 1.5 * (last_bad + step);
}

}  // namespace ptweyl
