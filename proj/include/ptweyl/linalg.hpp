#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "discretize.hpp"
#include "errors.hpp"

namespace ptweyl {

struct SpectralResult {
  // Sorted by real part, then imaginary part.
  std::vector<cplx> eigenvalues;
  // ||B - U T U^*||_F / ||A||_F for the Schur factorization of the
  // non-isolated block B; zero when balancing isolates every eigenvalue.
  double residual_bound = 0.0;
  // Eigenvalues read off directly after permutation balancing.
  int isolated = 0;
};

struct SingularSpectrum {
  std::vector<double> values;  // descending

  double operator[](std::size_t k) const { return values[k]; }
  std::size_t size() const { return values.size(); }
};

namespace detail {

// Permutation part of LAPACK-style balancing: moves rows whose off-diagonal
// part vanishes to the bottom and columns whose off-diagonal part vanishes
// to the top. On return A(perm, perm) is block upper triangular with the
// active block [lo, hi] in the middle and triangular blocks around it.
template <class Mat>
void permute_isolate(Mat& a, int& lo, int& hi) {
  const int n = static_cast<int>(a.rows());
  lo = 0;
  hi = n - 1;
  auto swap_rc = [&](int i, int j) {
    if (i == j) return;
    a.row(i).swap(a.row(j));
    a.col(i).swap(a.col(j));
  };
  bool found = true;
  while (found && hi > lo) {
    found = false;
    for (int j = hi; j >= lo; --j) {
      bool zero = true;
      for (int c = lo; c <= hi && zero; ++c)
        if (c != j && a(j, c) != typename Mat::Scalar(0)) zero = false;
      if (zero) {
        swap_rc(j, hi);
        --hi;
        found = true;
        break;
      }
    }
  }
  found = true;
  while (found && hi > lo) {
    found = false;
    for (int j = lo; j <= hi; ++j) {
      bool zero = true;
      for (int r = lo; r <= hi && zero; ++r)
        if (r != j && a(r, j) != typename Mat::Scalar(0)) zero = false;
      if (zero) {
        swap_rc(j, lo);
        ++lo;
        found = true;
        break;
      }
    }
  }
}

inline void sort_spectrum(std::vector<cplx>& ev) {
  std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
}

// Eigenvalues of the real quasi-triangular Schur factor; conjugate pairs
// are produced as exact conjugates.
inline void real_schur_eigenvalues(const RealMatrix& t, std::vector<cplx>& out) {
  const Eigen::Index n = t.rows();
  Eigen::Index i = 0;
  while (i < n) {
    if (i == n - 1 || t(i + 1, i) == 0.0) {
      out.emplace_back(t(i, i), 0.0);
      ++i;
      continue;
    }
    const double p = 0.5 * (t(i, i) - t(i + 1, i + 1));
    double t0 = t(i + 1, i);
    double t1 = t(i, i + 1);
    const double maxval = std::max({std::abs(p), std::abs(t0), std::abs(t1)});
    t0 /= maxval;
    t1 /= maxval;
    const double p0 = p / maxval;
    const double disc = p0 * p0 + t0 * t1;
    const double z = maxval * std::sqrt(std::abs(disc));
    const double base = t(i + 1, i + 1) + p;
    if (disc >= 0.0) {
      out.emplace_back(base + z, 0.0);
      out.emplace_back(base - z, 0.0);
    } else {
      out.emplace_back(base, z);
      out.emplace_back(base, -z);
    }
    i += 2;
  }
}

}  // namespace detail

inline bool is_entrywise_real(const ComplexMatrix& a) {
  return (a.imag().array() == 0.0).all();
}

// All eigenvalues of a dense square matrix, with a computed backward error.
//
// Exactly real input goes through the real Schur form, so its spectrum is
// closed under conjugation to the last bit. Throws NumericalError when the
// QR iteration does not converge; no partial spectrum is returned.
inline SpectralResult eigenvalues(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw ValidationError("eigenvalues: matrix must be square");
  if (!a.allFinite()) throw ValidationError("eigenvalues: non-finite entries");
  SpectralResult res;
  const int n = static_cast<int>(a.rows());
  if (n == 0) return res;
  const double anorm = a.norm();

  auto finish_block = [&](auto& m, int lo, int hi, auto&& block_eigs) {
    for (int i = 0; i < lo; ++i) res.eigenvalues.emplace_back(m(i, i));
    for (int i = hi + 1; i < n; ++i) res.eigenvalues.emplace_back(m(i, i));
    res.isolated = n - (hi - lo + 1);
    if (hi >= lo) block_eigs(m.block(lo, lo, hi - lo + 1, hi - lo + 1));
  };

  if (is_entrywise_real(a)) {
    RealMatrix m = a.real();
    int lo = 0, hi = n - 1;
    detail::permute_isolate(m, lo, hi);
    finish_block(m, lo, hi, [&](const RealMatrix& b) {
      if (b.rows() == 1) {
        res.eigenvalues.emplace_back(b(0, 0), 0.0);
        return;
      }
      Eigen::RealSchur<RealMatrix> schur(b, true);
      if (schur.info() != Eigen::Success)
        throw NumericalError("eigenvalues: real Schur iteration did not converge");
      const RealMatrix& t = schur.matrixT();
      const RealMatrix& u = schur.matrixU();
      res.residual_bound = (b - u * t * u.transpose()).norm() / anorm;
      detail::real_schur_eigenvalues(t, res.eigenvalues);
    });
  } else {
    ComplexMatrix m = a;
    int lo = 0, hi = n - 1;
    detail::permute_isolate(m, lo, hi);
    finish_block(m, lo, hi, [&](const ComplexMatrix& b) {
      if (b.rows() == 1) {
        res.eigenvalues.emplace_back(b(0, 0));
        return;
      }
      Eigen::ComplexSchur<ComplexMatrix> schur(b, true);
      if (schur.info() != Eigen::Success)
        throw NumericalError("eigenvalues: complex Schur iteration did not converge");
      const ComplexMatrix& t = schur.matrixT();
      const ComplexMatrix& u = schur.matrixU();
      res.residual_bound = (b - u * t * u.adjoint()).norm() / anorm;
      for (Eigen::Index i = 0; i < t.rows(); ++i) res.eigenvalues.push_back(t(i, i));
    });
  }
  if (!std::isfinite(res.residual_bound))
    throw NumericalError("eigenvalues: non-finite backward error");
  detail::sort_spectrum(res.eigenvalues);
  return res;
}

// Full singular spectrum, descending.
inline SingularSpectrum singular_values(const ComplexMatrix& a) {
  if (!a.allFinite()) throw ValidationError("singular_values: non-finite entries");
  SingularSpectrum s;
  if (a.size() == 0) return s;
  Eigen::VectorXd sv;
  if (std::min(a.rows(), a.cols()) <= 200) {
    Eigen::JacobiSVD<ComplexMatrix> svd(a);
    sv = svd.singularValues();
  } else {
    Eigen::BDCSVD<ComplexMatrix> svd(a);
    sv = svd.singularValues();
  }
  if (!sv.allFinite()) throw NumericalError("singular_values: SVD did not converge");
  s.values.assign(sv.data(), sv.data() + sv.size());
  std::sort(s.values.begin(), s.values.end(), std::greater<>());
  return s;
}

}  // namespace ptweyl
