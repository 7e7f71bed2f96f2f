#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <initializer_list>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

namespace ptweyl {

using cplx = std::complex<double>;

// Finite Fourier series x -> sum_k c_k e^{ikx} on R/2piZ.
//
// Coefficients are stored densely for |k| <= bandwidth(). Reading a
// frequency outside that range yields zero.
class TrigPoly {
public:
  TrigPoly() : coeffs_(1, cplx{0.0, 0.0}) {}

  TrigPoly(std::initializer_list<std::pair<const int, cplx>> terms)
      : TrigPoly(std::map<int, cplx>(terms)) {}

  explicit TrigPoly(const std::map<int, cplx>& terms) : TrigPoly() {
    for (const auto& [k, c] : terms) set(k, c);
  }

  static TrigPoly constant(cplx c) { return TrigPoly{{0, c}}; }

  int bandwidth() const { return static_cast<int>(coeffs_.size() / 2); }

  cplx coeff(int k) const {
    const int bw = bandwidth();
    if (k < -bw || k > bw) return {0.0, 0.0};
    return coeffs_[static_cast<std::size_t>(k + bw)];
  }

  void set(int k, cplx c) {
    grow(std::abs(k));
    coeffs_[static_cast<std::size_t>(k + bandwidth())] = c;
  }

  void add(int k, cplx c) { set(k, coeff(k) + c); }

  // Nonzero terms in increasing frequency order.
  std::map<int, cplx> terms() const {
    std::map<int, cplx> out;
    const int bw = bandwidth();
    for (int k = -bw; k <= bw; ++k)
      if (coeff(k) != cplx{0.0, 0.0}) out.emplace(k, coeff(k));
    return out;
  }

  // Largest |k| with a nonzero coefficient.
  int effective_bandwidth() const {
    for (int k = bandwidth(); k > 0; --k)
      if (coeff(k) != cplx{} || coeff(-k) != cplx{}) return k;
    return 0;
  }

  // Powers of e^{ix} are built by repeated multiplication and negative
  // frequencies use the conjugate powers, so f(-x) is the exact conjugate of
  // f(x) whenever all coefficients are real.
  cplx operator()(double x) const {
    const int bw = bandwidth();
    cplx sum = coeff(0);
    const cplx w = std::polar(1.0, x);
    cplx wk{1.0, 0.0};
    for (int k = 1; k <= bw; ++k) {
      wk *= w;
      sum += coeffs_[static_cast<std::size_t>(bw + k)] * wk;
      sum += coeffs_[static_cast<std::size_t>(bw - k)] * std::conj(wk);
    }
    return sum;
  }

  // Real-valued function: c_{-k} = conj(c_k).
  bool is_real(double tol = 0.0) const {
    for (int k = 0; k <= bandwidth(); ++k)
      if (std::abs(coeff(-k) - std::conj(coeff(k))) > tol) return false;
    return true;
  }

  // f(-x) = conj(f(x)) for all x, equivalently every c_k is real.
  bool is_pt(double tol = 0.0) const {
    return std::all_of(coeffs_.begin(), coeffs_.end(),
                       [tol](cplx c) { return std::abs(c.imag()) <= tol; });
  }

  // L^2 norm with respect to Lebesgue measure dx on [0, 2pi).
  double l2_norm() const {
    double s = 0.0;
    for (cplx c : coeffs_) s += std::norm(c);
    return std::sqrt(2.0 * std::numbers::pi * s);
  }

  // Semiclassical Sobolev norm, weights (1 + (hk)^2)^s. Diagnostic only.
  double sobolev_norm(double s, double h) const {
    double acc = 0.0;
    const int bw = bandwidth();
    for (int k = -bw; k <= bw; ++k) {
      const double hk = h * k;
      acc += std::pow(1.0 + hk * hk, s) * std::norm(coeff(k));
    }
    return std::sqrt(2.0 * std::numbers::pi * acc);
  }

  double sup_bound() const {
    double s = 0.0;
    for (cplx c : coeffs_) s += std::abs(c);
    return s;
  }

  TrigPoly& operator+=(const TrigPoly& o) {
    grow(o.bandwidth());
    for (int k = -o.bandwidth(); k <= o.bandwidth(); ++k) add(k, o.coeff(k));
    return *this;
  }

  TrigPoly& operator*=(cplx s) {
    for (cplx& c : coeffs_) c *= s;
    return *this;
  }

  friend TrigPoly operator+(TrigPoly a, const TrigPoly& b) { return a += b; }
  friend TrigPoly operator*(TrigPoly a, cplx s) { return a *= s; }
  friend TrigPoly operator*(cplx s, TrigPoly a) { return a *= s; }

  // Real and imaginary parts of the Fourier coefficients, as separate
  // series. For a PT basis expansion these are the PT parts q1, q2.
  TrigPoly coeff_real_part() const {
    TrigPoly out;
    out.grow(bandwidth());
    for (int k = -bandwidth(); k <= bandwidth(); ++k) out.set(k, coeff(k).real());
    return out;
  }
  TrigPoly coeff_imag_part() const {
    TrigPoly out;
    out.grow(bandwidth());
    for (int k = -bandwidth(); k <= bandwidth(); ++k) out.set(k, coeff(k).imag());
    return out;
  }

  friend bool operator==(const TrigPoly& a, const TrigPoly& b) {
    const int bw = std::max(a.bandwidth(), b.bandwidth());
    for (int k = -bw; k <= bw; ++k)
      if (a.coeff(k) != b.coeff(k)) return false;
    return true;
  }

private:
  void grow(int bw) {
    const int old = bandwidth();
    if (bw <= old) return;
    std::vector<cplx> next(static_cast<std::size_t>(2 * bw + 1), cplx{0.0, 0.0});
    for (int k = -old; k <= old; ++k)
      next[static_cast<std::size_t>(k + bw)] = coeffs_[static_cast<std::size_t>(k + old)];
    coeffs_ = std::move(next);
  }

  std::vector<cplx> coeffs_;
};

}  // namespace ptweyl
