#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "operator_spec.hpp"
#include "phase_space.hpp"
#include "region.hpp"

namespace ptweyl {

enum class WeylMode { semiclassical, large };

inline std::string to_string(WeylMode m) { return m == WeylMode::semiclassical ? "semiclassical" : "large"; }

// Midpoint-rule measure of {(x, xi) : p(x, xi) in region}. With
// principal_only the principal symbol p_m replaces p.
inline double preimage_volume(const OperatorSpec& spec, const Region& region,
                              const QuadratureGrid& grid, bool principal_only = false) {
  grid.validate();
  long long hits = 0;
  for_each_symbol_value(spec, grid, principal_only, [&](int, int, cplx p) {
    if (region.contains(p)) ++hits;
  });
  return static_cast<double>(hits) * grid.cell_area();
}

struct VolumeCheck {
  double coarse = 0.0;
  double fine = 0.0;

  // |fine - coarse| / fine, zero when both vanish.
  double relative_change() const {
    if (fine == 0.0) return coarse == 0.0 ? 0.0 : INFINITY;
    return std::abs(fine - coarse) / std::abs(fine);
  }
};

// Volume at the given grid and at the grid refined by two in each variable.
inline VolumeCheck preimage_volume_checked(const OperatorSpec& spec, const Region& region,
                                           const QuadratureGrid& grid, bool principal_only = false) {
  return {preimage_volume(spec, region, grid, principal_only),
          preimage_volume(spec, region, grid.refined(), principal_only)};
}

// Measures of {dist(p(x, xi), boundary) <= r} for every r in r_list, from a
// single pass over the grid.
inline std::vector<double> boundary_tube_profile(const OperatorSpec& spec, const Region& region,
                                                 const std::vector<double>& r_list,
                                                 const QuadratureGrid& grid,
                                                 bool principal_only = false) {
  grid.validate();
  if (r_list.empty()) return {};
  for (double r : r_list)
    if (!(r > 0.0)) throw ValidationError("boundary_tube_volume: r must be positive");
  std::vector<double> sorted = r_list;
  std::sort(sorted.begin(), sorted.end());
  const double r_max = sorted.back();
  const double outer = region.outer_radius();
  std::vector<long long> hits(sorted.size(), 0);
  for_each_symbol_value(spec, grid, principal_only, [&](int, int, cplx p) {
    if (std::abs(p) - outer > r_max) return;
    const double d = region.boundary_distance(p);
    auto it = std::lower_bound(sorted.begin(), sorted.end(), d);
    if (it != sorted.end()) ++hits[static_cast<std::size_t>(it - sorted.begin())];
  });
  std::vector<double> cum(sorted.size());
  long long acc = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    acc += hits[i];
    cum[i] = static_cast<double>(acc) * grid.cell_area();
  }
  std::vector<double> out;
  out.reserve(r_list.size());
  for (double r : r_list)
    out.push_back(cum[static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), r) - sorted.begin())]);
  return out;
}

inline double boundary_tube_volume(const OperatorSpec& spec, const Region& region, double r,
                                   const QuadratureGrid& grid, bool principal_only = false) {
  return boundary_tube_profile(spec, region, {r}, grid, principal_only).front();
}

struct RegionCount {
  int count = 0;
  // Members within 1e-9 of the boundary (counted, but flagged).
  int near_boundary = 0;
  std::vector<bool> flags;
};

inline RegionCount count_in_region(const std::vector<cplx>& eigs, const Region& region,
                                   double boundary_tol = 1e-9) {
  RegionCount out;
  out.flags.assign(eigs.size(), false);
  for (std::size_t i = 0; i < eigs.size(); ++i) {
    if (!region.contains(eigs[i])) continue;
    ++out.count;
    if (region.boundary_distance(eigs[i]) <= boundary_tol) {
      out.flags[i] = true;
      ++out.near_boundary;
    }
  }
  return out;
}

inline RegionCount count_in_region(const SpectralResult& eigs, const Region& region) {
  return count_in_region(eigs.eigenvalues, region);
}

struct WeylOptions {
  WeylMode mode = WeylMode::semiclassical;
  // Semiclassical parameter; ignored (taken as 1) in large mode.
  double h = 1.0;
  std::vector<double> r_list{0.02, 0.05, 0.1};
  std::vector<double> eps_tilde_list{0.01, 0.1};
  // The constant C of the deviation bound.
  double C = 1.0;
};

// Trial-independent part of a Weyl comparison.
struct WeylPrediction {
  double volume = 0.0;
  double volume_fine = 0.0;
  double prediction = 0.0;
  std::vector<std::pair<double, double>> tube;  // (r, tube volume)
  double prefactor = 1.0;
  int n = 1;
};

struct WeylReport {
  int count = 0;
  int near_boundary = 0;
  double prediction = 0.0;
  double deviation = 0.0;
  double volume = 0.0;
  double volume_fine = 0.0;
  std::vector<std::pair<double, double>> tube;
  // (r, eps_tilde) minimizing the deviation bound, and that bound.
  double r_used = 0.0;
  double eps_tilde_used = 0.0;
  double bound_used = 0.0;
};

inline double weyl_prefactor(WeylMode mode, double h, int n = 1) {
  return mode == WeylMode::semiclassical ? std::pow(2.0 * std::numbers::pi * h, -n)
                                         : std::pow(2.0 * std::numbers::pi, -n);
}

inline WeylPrediction weyl_predict(const OperatorSpec& spec, const Region& region,
                                   const QuadratureGrid& grid, const WeylOptions& opt) {
  const bool principal = opt.mode == WeylMode::large;
  const double h = principal ? 1.0 : opt.h;
  if (!(h > 0.0)) throw ValidationError("weyl_report: h must be positive");
  WeylPrediction w;
  const VolumeCheck vc = preimage_volume_checked(spec, region, grid, principal);
  w.volume = vc.coarse;
  w.volume_fine = vc.fine;
  w.prefactor = weyl_prefactor(opt.mode, h);
  w.prediction = w.prefactor * vc.fine;
  const auto tube = boundary_tube_profile(spec, region, opt.r_list, grid, principal);
  for (std::size_t i = 0; i < tube.size(); ++i) w.tube.emplace_back(opt.r_list[i], tube[i]);
  return w;
}

// (C/h^n) (eps_tilde/r + C (r + ln(1/r) tube(r))).
inline double deviation_bound(double h_eff, double C, double r, double eps_tilde, double tube) {
  return C / h_eff * (eps_tilde / r + C * (r + std::log(1.0 / r) * tube));
}

inline WeylReport weyl_report(const WeylPrediction& pred, const std::vector<cplx>& eigs,
                              const Region& region, const WeylOptions& opt) {
  WeylReport rep;
  const RegionCount rc = count_in_region(eigs, region);
  rep.count = rc.count;
  rep.near_boundary = rc.near_boundary;
  rep.prediction = pred.prediction;
  rep.deviation = std::abs(rep.count - rep.prediction);
  rep.volume = pred.volume;
  rep.volume_fine = pred.volume_fine;
  rep.tube = pred.tube;
  const double h_eff = opt.mode == WeylMode::semiclassical ? opt.h : 1.0;
  rep.bound_used = INFINITY;
  for (const auto& [r, tube] : pred.tube)
    for (double et : opt.eps_tilde_list) {
      const double b = deviation_bound(h_eff, opt.C, r, et, tube);
      if (b < rep.bound_used) {
        rep.bound_used = b;
        rep.r_used = r;
        rep.eps_tilde_used = et;
      }
    }
  return rep;
}

inline WeylReport weyl_report(const OperatorSpec& spec, const SpectralResult& eigs,
                              const Region& region, const QuadratureGrid& grid,
                              const WeylOptions& opt) {
  return weyl_report(weyl_predict(spec, region, grid, opt), eigs.eigenvalues, region, opt);
}

// Answers "is z within tol of a sampled symbol value". One representative
// sample is kept per lattice cell of side tol/4, so a positive answer is
// always witnessed by a true symbol value.
class SymbolRangeIndex {
public:
  SymbolRangeIndex(const OperatorSpec& spec, const QuadratureGrid& grid, double tol,
                   bool principal_only = false)
      : tol_(tol), cell_(tol / 4.0) {
    if (!(tol > 0.0)) throw ValidationError("SymbolRangeIndex: tol must be positive");
    for_each_symbol_value(spec, grid, principal_only, [&](int, int, cplx p) {
      reps_.try_emplace(key(p), p);
    });
  }

  bool near(cplx z) const {
    const auto [cx, cy] = key(z);
    for (long long dx = -5; dx <= 5; ++dx)
      for (long long dy = -5; dy <= 5; ++dy) {
        auto it = reps_.find({cx + dx, cy + dy});
        if (it != reps_.end() && std::abs(it->second - z) <= tol_) return true;
      }
    return false;
  }

  std::size_t size() const { return reps_.size(); }

private:
  using Key = std::pair<long long, long long>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return std::hash<long long>()(k.first * 1000003LL) ^ std::hash<long long>()(k.second);
    }
  };
  Key key(cplx p) const {
    return {static_cast<long long>(std::floor(p.real() / cell_)),
            static_cast<long long>(std::floor(p.imag() / cell_))};
  }

  double tol_;
  double cell_;
  std::unordered_map<Key, cplx, KeyHash> reps_;
};

}  // namespace ptweyl
