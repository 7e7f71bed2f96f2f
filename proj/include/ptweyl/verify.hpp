#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <tuple>
#include <vector>

#include "discretize.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "randomize.hpp"

namespace ptweyl {

// In the exponential basis, commuting with U Gamma is entrywise realness.
inline bool pt_matrix_check(const ComplexMatrix& a, double rel_tol = 1e-12) {
  if (a.rows() != a.cols()) throw ValidationError("pt_matrix_check: matrix must be square");
  if (a.size() == 0) return true;
  const double scale = a.cwiseAbs().maxCoeff();
  return a.imag().cwiseAbs().maxCoeff() <= rel_tol * scale;
}

// Transpose identity P = Gamma P^* Gamma in mode indices: A_{j,k} = A_{-k,-j}.
inline bool symmetry_check(const ComplexMatrix& a, double rel_tol = 1e-12) {
  if (a.rows() != a.cols()) throw ValidationError("symmetry_check: matrix must be square");
  const Eigen::Index n = a.rows();
  if (n == 0) return true;
  if (n % 2 == 0) throw ValidationError("symmetry_check: expected canonical 2K+1 mode ordering");
  const double tol = rel_tol * a.cwiseAbs().maxCoeff();
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c)
      if (std::abs(a(r, c) - a(n - 1 - c, n - 1 - r)) > tol) return false;
  return true;
}

// Largest distance in a greedy conjugate matching: every eigenvalue is paired
// with a partner (itself allowed) by ascending |l_i - conj(l_j)|, ties in
// index order.
inline double conjugation_mismatch(const std::vector<cplx>& ev) {
  const std::size_t n = ev.size();
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  pairs.reserve(n * (n + 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) pairs.emplace_back(std::abs(ev[i] - std::conj(ev[j])), i, j);
  std::sort(pairs.begin(), pairs.end());
  std::vector<bool> used(n, false);
  double worst = 0.0;
  std::size_t matched = 0;
  for (const auto& [d, i, j] : pairs) {
    if (used[i] || used[j]) continue;
    used[i] = used[j] = true;
    matched += (i == j) ? 1 : 2;
    worst = std::max(worst, d);
    if (matched == n) break;
  }
  return worst;
}

inline bool spectrum_conjugation_check(const std::vector<cplx>& ev, double tol) {
  double radius = 0.0;
  for (cplx z : ev) radius = std::max(radius, std::abs(z));
  if (radius == 0.0) return true;
  return conjugation_mismatch(ev) <= tol * radius;
}

inline bool spectrum_conjugation_check(const SpectralResult& eigs, double tol) {
  return spectrum_conjugation_check(eigs.eigenvalues, tol);
}

struct KyFanReport {
  int N = 0;
  SingularSpectrum s_q, s_q1, s_q2;
  // k (1-based) with s_{2k-1}(M_q) > s_k(M_q1) + s_k(M_q2) + tol s_1(M_q).
  std::vector<int> violations;
  double threshold = 0.0;
  // Fractions of k <= N/4 with s_k(M_{q_j}) >= threshold.
  double profile_q1 = 0.0;
  double profile_q2 = 0.0;
  // Fraction of k <= N/4 where either part clears the threshold.
  double lower_bound_profile = 0.0;
};

// M_q = (int q e_j e_k dx), j, k = 1..N, for e_j = e^{ijx}/sqrt(2pi). The
// pairing is bilinear, so entries are q_hat(-(j + k)).
inline ComplexMatrix bilinear_moment_matrix(const TrigPoly& q, int N) {
  ComplexMatrix m(N, N);
  for (int j = 1; j <= N; ++j)
    for (int k = 1; k <= N; ++k) m(j - 1, k - 1) = q.coeff(-(j + k));
  return m;
}

namespace detail {

inline KyFanReport kyfan_compare(SingularSpectrum sq, SingularSpectrum s1, SingularSpectrum s2,
                                 int N, double threshold, double rel_tol) {
  KyFanReport rep;
  rep.N = N;
  rep.threshold = threshold;
  const double tol = rel_tol * (sq.size() ? sq[0] : 0.0);
  for (int k = 1; 2 * k - 1 <= N; ++k) {
    const auto kk = static_cast<std::size_t>(k - 1);
    if (sq[static_cast<std::size_t>(2 * k - 2)] > s1[kk] + s2[kk] + tol) rep.violations.push_back(k);
  }
  const int quarter = N / 4;
  if (quarter > 0) {
    int c1 = 0, c2 = 0, either = 0;
    for (int k = 0; k < quarter; ++k) {
      const bool a = s1[static_cast<std::size_t>(k)] >= threshold;
      const bool b = s2[static_cast<std::size_t>(k)] >= threshold;
      c1 += a;
      c2 += b;
      either += (a || b);
    }
    rep.profile_q1 = static_cast<double>(c1) / quarter;
    rep.profile_q2 = static_cast<double>(c2) / quarter;
    rep.lower_bound_profile = static_cast<double>(either) / quarter;
  }
  rep.s_q = std::move(sq);
  rep.s_q1 = std::move(s1);
  rep.s_q2 = std::move(s2);
  return rep;
}

}  // namespace detail

// Ky Fan splitting for q = q1 + i q2, with q1, q2 the PT potentials built
// from the real and imaginary parts of the basis coefficients.
inline KyFanReport kyfan_split_check(std::span<const cplx> q_coeffs,
                                     const std::vector<PerturbBasisElement>& basis_elems, int N,
                                     double h, double rel_tol = 1e-10) {
  if (N < 2) throw ValidationError("kyfan_split_check: N >= 2 required");
  if (q_coeffs.size() != basis_elems.size())
    throw ValidationError("kyfan_split_check: coefficient and basis lengths differ");
  std::vector<double> re(q_coeffs.size()), im(q_coeffs.size());
  for (std::size_t j = 0; j < q_coeffs.size(); ++j) {
    re[j] = q_coeffs[j].real();
    im[j] = q_coeffs[j].imag();
  }
  const TrigPoly q = build_q<cplx>(q_coeffs, basis_elems);
  const TrigPoly q1 = build_q<double>(re, basis_elems);
  const TrigPoly q2 = build_q<double>(im, basis_elems);
  return detail::kyfan_compare(singular_values(bilinear_moment_matrix(q, N)),
                               singular_values(bilinear_moment_matrix(q1, N)),
                               singular_values(bilinear_moment_matrix(q2, N)), N, 0.5 * h, rel_tol);
}

// Same comparison for an explicit matrix split M = Re M + i Im M.
inline KyFanReport kyfan_matrix_check(const ComplexMatrix& m, double threshold = 0.0,
                                      double rel_tol = 1e-10) {
  if (m.rows() != m.cols()) throw ValidationError("kyfan_matrix_check: matrix must be square");
  const ComplexMatrix m1 = m.real().cast<cplx>();
  const ComplexMatrix m2 = m.imag().cast<cplx>();
  return detail::kyfan_compare(singular_values(m), singular_values(m1), singular_values(m2),
                               static_cast<int>(m.rows()), threshold, rel_tol);
}

}  // namespace ptweyl
