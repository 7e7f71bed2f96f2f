#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "operator_spec.hpp"
#include "trig_poly.hpp"

namespace ptweyl {

using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

// Modes k = -K..K of the exponential basis e^{ikx}/sqrt(2pi); row/column i
// of every assembled matrix holds mode k = i - K.
struct FourierBasis {
  int K = 0;

  explicit FourierBasis(int cutoff) : K(cutoff) {
    if (cutoff < 0) throw ValidationError("FourierBasis: cutoff must be non-negative");
  }

  int dim() const { return 2 * K + 1; }
  int index(int k) const { return k + K; }
  int mode(int i) const { return i - K; }
};

// Collects non-fatal assembly messages. When none is supplied the messages go
// to std::clog.
struct Diagnostics {
  std::vector<std::string> warnings;
};

namespace detail {

inline void warn(Diagnostics* diag, std::string msg) {
  if (diag)
    diag->warnings.push_back(std::move(msg));
  else
    std::clog << "[ptweyl] warning: " << msg << '\n';
}

inline void check_bandwidth(const TrigPoly& f, const FourierBasis& basis, const char* what,
                            Diagnostics* diag) {
  if (f.effective_bandwidth() > 2 * basis.K)
    warn(diag, std::string(what) + ": frequencies above 2K = " + std::to_string(2 * basis.K) +
                   " are dropped by the truncation");
}

}  // namespace detail

// Toeplitz matrix of multiplication by q: entry (j, k) = q_hat(j - k).
inline ComplexMatrix assemble_multiplication(const TrigPoly& q, const FourierBasis& basis,
                                             Diagnostics* diag = nullptr) {
  detail::check_bandwidth(q, basis, "multiplication", diag);
  const int n = basis.dim();
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out(r, c) = q.coeff(basis.mode(r) - basis.mode(c));
  return out;
}

// Matrix of P in the exponential basis. A term (hD)^b a (hD)^b contributes
// a_hat(j - k) (hj)^b (hk)^b and the potential contributes V_hat(j - k).
inline ComplexMatrix assemble_operator(const OperatorSpec& spec, const FourierBasis& basis,
                                       Diagnostics* diag = nullptr) {
  spec.validate();
  ComplexMatrix out = assemble_multiplication(spec.potential, basis, diag);
  const int n = basis.dim();
  for (const auto& term : spec.div_terms) {
    detail::check_bandwidth(term.coeff, basis, "div term", diag);
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = std::pow(spec.h * basis.mode(i), term.beta);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        const cplx a = term.coeff.coeff(basis.mode(r) - basis.mode(c));
        if (a != cplx{}) out(r, c) += a * (w[static_cast<std::size_t>(r)] * w[static_cast<std::size_t>(c)]);
      }
  }
  return out;
}

// One-sided term a(x) (hD)^alpha: entry a_hat(j - k) (hk)^alpha. Not part of
// OperatorSpec; kept for demonstrating how such orderings break the
// transpose identity after truncation.
inline ComplexMatrix assemble_one_sided_term(const TrigPoly& a, int alpha, double h,
                                             const FourierBasis& basis) {
  const int n = basis.dim();
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      out(r, c) = a.coeff(basis.mode(r) - basis.mode(c)) * std::pow(h * basis.mode(c), alpha);
  return out;
}

enum class Parity { even, odd };

// Eigenfunction of the reference operator 1 - Delta, phased so that real
// linear combinations are PT-symmetric: 1/sqrt(2pi), cos(kx)/sqrt(pi),
// i sin(kx)/sqrt(pi).
struct PerturbBasisElement {
  int index = 0;
  Parity parity = Parity::even;
  int k = 0;
  double mu0 = 1.0;
  TrigPoly function;
};

inline PerturbBasisElement make_perturb_element(int k, Parity parity) {
  PerturbBasisElement e;
  e.k = k;
  e.parity = parity;
  e.mu0 = std::sqrt(static_cast<double>(k) * k + 1.0);
  if (k == 0) {
    e.function.set(0, 1.0 / std::sqrt(2.0 * std::numbers::pi));
  } else {
    const double c = 0.5 / std::sqrt(std::numbers::pi);
    e.function.set(k, c);
    e.function.set(-k, parity == Parity::even ? c : -c);
  }
  return e;
}

// All elements with mu0 = sqrt(k^2 + 1) <= mu_max and k <= K, ordered by mu0
// then parity (even first).
inline std::vector<PerturbBasisElement> enumerate_perturb_basis(const FourierBasis& basis,
                                                                double mu_max) {
  if (!(mu_max > 0.0)) throw ValidationError("enumerate_perturb_basis: mu_max must be positive");
  std::vector<PerturbBasisElement> out;
  for (int k = 0; k <= basis.K; ++k) {
    const double mu0 = std::sqrt(static_cast<double>(k) * k + 1.0);
    if (mu0 > mu_max) break;
    out.push_back(make_perturb_element(k, Parity::even));
    if (k > 0) out.push_back(make_perturb_element(k, Parity::odd));
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].index = static_cast<int>(i);
  return out;
}

// Gram matrix int f_j conj(f_l) dx, by coefficient contraction.
inline ComplexMatrix gram_matrix(const std::vector<PerturbBasisElement>& elems) {
  const auto n = static_cast<Eigen::Index>(elems.size());
  ComplexMatrix g(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      const auto& fa = elems[static_cast<std::size_t>(a)].function;
      const auto& fb = elems[static_cast<std::size_t>(b)].function;
      const int bw = std::max(fa.bandwidth(), fb.bandwidth());
      cplx s{};
      for (int k = -bw; k <= bw; ++k) s += fa.coeff(k) * std::conj(fb.coeff(k));
      g(a, b) = 2.0 * std::numbers::pi * s;
    }
  return g;
}

// Text dump: one line per row, "re,im" pairs separated by commas.
inline void write_matrix_csv(std::ostream& os, const ComplexMatrix& m) {
  const auto old = os.precision(17);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) os << ',';
      os << m(r, c).real() << ',' << m(r, c).imag();
    }
    os << '\n';
  }
  os.precision(old);
}

}  // namespace ptweyl
