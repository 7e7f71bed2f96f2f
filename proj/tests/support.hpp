#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ptweyl.hpp"

namespace testsupport {

using ptweyl::cplx;
using ptweyl::ComplexMatrix;
using ptweyl::OperatorSpec;
using ptweyl::TrigPoly;

constexpr double kPi = std::numbers::pi;

// Small generator wrapper for property tests.
class Gen {
public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  bool coin() { return integer(0, 1) == 1; }
  cplx complex(double scale = 1.0) { return {uniform(-scale, scale), uniform(-scale, scale)}; }

  TrigPoly trig(int bw, bool real_coeffs, double scale = 1.0) {
    TrigPoly f;
    for (int k = -bw; k <= bw; ++k) f.set(k, real_coeffs ? cplx(uniform(-scale, scale)) : complex(scale));
    return f;
  }

  // Elliptic divergence-form spec. With pt = true every coefficient is real.
  OperatorSpec spec(bool pt, double h) {
    OperatorSpec s;
    s.h = h;
    const int top = integer(1, 2);
    for (int beta = 0; beta <= top; ++beta) {
      if (beta < top && coin()) continue;
      TrigPoly a = trig(integer(0, 2), pt, beta == top ? 0.2 : 1.0);
      if (beta == top) a.add(0, 1.0);  // keeps |a| >= 1 - 5 * 0.2 * sqrt(2) > 0
      s.div_terms.push_back({beta, a});
    }
    s.potential = trig(integer(0, 3), pt);
    return s;
  }

  ComplexMatrix complex_matrix(int n, double scale = 1.0) {
    ComplexMatrix m(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) m(r, c) = complex(scale);
    return m;
  }

  ComplexMatrix real_matrix(int n, double scale = 1.0) {
    ComplexMatrix m(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) m(r, c) = uniform(-scale, scale);
    return m;
  }

  std::mt19937_64& engine() { return eng_; }

private:
  std::mt19937_64 eng_;
};

// p = (hD)^2 + e^{ix} with coefficients independent of h.
inline OperatorSpec triangular_model(double h) {
  OperatorSpec s;
  s.h = h;
  s.div_terms.push_back({1, TrigPoly::constant(1.0)});
  s.potential = TrigPoly{{1, 1.0}};
  return s;
}

inline OperatorSpec free_model(double h = 1.0) {
  OperatorSpec s;
  s.h = h;
  s.div_terms.push_back({1, TrigPoly::constant(1.0)});
  return s;
}

// a(x) = 1 + 0.5 i sin x, i.e. coefficients {0: 1, 1: 0.25, -1: -0.25}.
inline OperatorSpec large_model() {
  OperatorSpec s;
  s.h = 1.0;
  s.div_terms.push_back({1, TrigPoly{{0, 1.0}, {1, 0.25}, {-1, -0.25}}});
  return s;
}

// (1/2pi) int f(x) e^{-i n x} dx by an equispaced rule, exact for |n| and
// the bandwidth of f below samples / 2.
template <class F>
cplx fourier_coefficient(F&& f, int n, int samples = 512) {
  cplx acc{};
  for (int i = 0; i < samples; ++i) {
    const double x = 2.0 * kPi * i / samples;
    acc += f(x) * std::polar(1.0, -n * x);
  }
  return acc / static_cast<double>(samples);
}

// Independent phase-space measure of {(x, xi) : pred(x, xi)} on
// [0, 2pi) x [-xi_max, xi_max], plain midpoint rule.
template <class Pred>
double brute_volume(Pred&& pred, double xi_max, int nx, int nxi) {
  const double dx = 2.0 * kPi / nx, dxi = 2.0 * xi_max / nxi;
  long long hits = 0;
  for (int i = 0; i < nx; ++i) {
    const double x = (i + 0.5) * dx;
    for (int j = 0; j < nxi; ++j) {
      const double xi = -xi_max + (j + 0.5) * dxi;
      hits += pred(x, xi) ? 1 : 0;
    }
  }
  return static_cast<double>(hits) * dx * dxi;
}

inline double max_abs(const ComplexMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace testsupport
