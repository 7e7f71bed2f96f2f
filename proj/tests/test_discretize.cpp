#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace ptweyl;
using namespace testsupport;

TEST(FourierBasis, OrderingAndDimension) {
  const FourierBasis b(5);
  EXPECT_EQ(b.dim(), 11);
  EXPECT_EQ(b.index(-5), 0);
  EXPECT_EQ(b.mode(10), 5);
  EXPECT_THROW(FourierBasis(-1), ValidationError);
}

TEST(Assemble, FreeOperatorIsDiagonal) {
  const ComplexMatrix m = assemble_operator(free_model(0.1), FourierBasis(1));
  ComplexMatrix want = ComplexMatrix::Zero(3, 3);
  want(0, 0) = 0.01;
  want(2, 2) = 0.01;
  EXPECT_LT(max_abs(m - want), 1e-17);
}

TEST(Assemble, TriangularModelMatchesQuadratureOracle) {
  const double h = 0.3;
  const FourierBasis b(4);
  const ComplexMatrix m = assemble_operator(triangular_model(h), b);
  for (int j = -4; j <= 4; ++j)
    for (int k = -4; k <= 4; ++k) {
      // <P e_k, e_j> with P e_k = (hk)^2 e_k + e^{ix} e_k.
      const cplx pot = fourier_coefficient([&](double x) { return std::polar(1.0, x) * std::polar(1.0, k * x); }, j);
      const cplx want = (j == k ? cplx((h * k) * (h * k)) : cplx{}) + pot;
      EXPECT_LT(std::abs(m(b.index(j), b.index(k)) - want), 1e-13) << j << "," << k;
    }
  // Strictly lower triangular off-diagonal part: ones at (k+1, k).
  for (int k = -4; k < 4; ++k) EXPECT_EQ(m(b.index(k + 1), b.index(k)), cplx(1.0));
  EXPECT_EQ(m(b.index(-1), b.index(0)), cplx{});
}

TEST(Assemble, DivergenceEntriesMatchQuadratureOracle) {
  Gen g(21);
  for (int trial = 0; trial < 10; ++trial) {
    const OperatorSpec s = g.spec(g.coin(), g.uniform(0.1, 1.0));
    const FourierBasis b(6);
    const ComplexMatrix m = assemble_operator(s, b);
    for (int j = -6; j <= 6; ++j)
      for (int k = -6; k <= 6; ++k) {
        cplx want = fourier_coefficient([&](double x) { return s.potential(x) * std::polar(1.0, k * x); }, j);
        for (const auto& t : s.div_terms) {
          // (hD)^b e_k = (hk)^b e_k, then multiply by a, then (hD)^b again.
          const cplx ak = fourier_coefficient([&](double x) { return t.coeff(x) * std::polar(1.0, k * x); }, j);
          want += ak * std::pow(s.h * k, t.beta) * std::pow(s.h * j, t.beta);
        }
        EXPECT_LT(std::abs(m(b.index(j), b.index(k)) - want), 1e-12);
      }
  }
}

TEST(Assemble, PtSpecsGiveRealMatrices) {
  Gen g(22);
  for (int trial = 0; trial < 50; ++trial) {
    const ComplexMatrix m = assemble_operator(g.spec(true, g.uniform(0.05, 1.0)), FourierBasis(16));
    EXPECT_LT(m.imag().cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Assemble, SymmetryIdentityHoldsExactly) {
  Gen g(23);
  for (int trial = 0; trial < 50; ++trial) {
    const ComplexMatrix m = assemble_operator(g.spec(g.coin(), g.uniform(0.05, 1.0)), FourierBasis(10));
    const int n = static_cast<int>(m.rows());
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) EXPECT_EQ(m(r, c), m(n - 1 - c, n - 1 - r));
  }
}

TEST(Assemble, RejectsNonElliptic) {
  OperatorSpec s;
  s.div_terms.push_back({1, TrigPoly{{0, 1.0}, {1, 0.5}, {-1, 0.5}}});
  EXPECT_THROW(assemble_operator(s, FourierBasis(4)), ValidationError);
}

TEST(Assemble, WideBandCoefficientsWarn) {
  OperatorSpec s = free_model(0.5);
  s.potential = TrigPoly{{9, 1.0}};
  Diagnostics d;
  assemble_operator(s, FourierBasis(4), &d);
  EXPECT_FALSE(d.warnings.empty());
}

TEST(Multiplication, Examples) {
  EXPECT_LT(max_abs(assemble_multiplication(TrigPoly::constant(1.0), FourierBasis(3)) - ComplexMatrix::Identity(7, 7)), 0.0 + 1e-300);
  const FourierBasis b(1);
  const ComplexMatrix shift = assemble_multiplication(TrigPoly{{1, 1.0}}, b);
  ComplexMatrix want = ComplexMatrix::Zero(3, 3);
  want(b.index(0), b.index(-1)) = 1.0;
  want(b.index(1), b.index(0)) = 1.0;
  EXPECT_EQ(max_abs(shift - want), 0.0);
  Gen g(24);
  const ComplexMatrix r = assemble_multiplication(g.trig(3, true), FourierBasis(8));
  EXPECT_EQ(r.imag().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Multiplication, ToeplitzEntries) {
  Gen g(25);
  const TrigPoly q = g.trig(4, false);
  const FourierBasis b(5);
  const ComplexMatrix m = assemble_multiplication(q, b);
  for (int j = -5; j <= 5; ++j)
    for (int k = -5; k <= 5; ++k) EXPECT_EQ(m(b.index(j), b.index(k)), q.coeff(j - k));
}

TEST(PerturbBasis, EnumerationExamples) {
  const FourierBasis b(8);
  EXPECT_EQ(enumerate_perturb_basis(b, 1.0).size(), 1u);
  const auto three = enumerate_perturb_basis(b, 1.5);
  ASSERT_EQ(three.size(), 3u);
  EXPECT_EQ(three[0].k, 0);
  EXPECT_EQ(three[1].parity, Parity::even);
  EXPECT_EQ(three[2].parity, Parity::odd);
  EXPECT_EQ(enumerate_perturb_basis(b, std::sqrt(5.0)).size(), 5u);
  EXPECT_EQ(enumerate_perturb_basis(FourierBasis(2), 100.0).size(), 5u);
  EXPECT_THROW(enumerate_perturb_basis(b, 0.0), ValidationError);
}

TEST(PerturbBasis, FunctionsAreTheNamedTrigonometricFunctions) {
  const auto e = enumerate_perturb_basis(FourierBasis(4), 10.0);
  for (const auto& el : e) {
    for (double x : {0.1, 1.3, 2.9, -2.2}) {
      cplx want;
      if (el.k == 0) want = 1.0 / std::sqrt(2 * kPi);
      else if (el.parity == Parity::even) want = std::cos(el.k * x) / std::sqrt(kPi);
      else want = cplx(0.0, std::sin(el.k * x) / std::sqrt(kPi));
      EXPECT_LT(std::abs(el.function(x) - want), 1e-14);
    }
    EXPECT_TRUE(el.function.is_pt());
    EXPECT_DOUBLE_EQ(el.mu0, std::sqrt(el.k * el.k + 1.0));
  }
  for (std::size_t i = 1; i < e.size(); ++i) EXPECT_LE(e[i - 1].mu0, e[i].mu0);
}

TEST(PerturbBasis, Orthonormal) {
  const auto e = enumerate_perturb_basis(FourierBasis(20), 25.0);
  const ComplexMatrix gm = gram_matrix(e);
  EXPECT_LT(max_abs(gm - ComplexMatrix::Identity(gm.rows(), gm.cols())), 1e-12);
  // Independent check by quadrature of the L2 pairing.
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t c = 0; c < 6; ++c) {
      const cplx ip = 2 * kPi * fourier_coefficient(
                                    [&](double x) { return e[a].function(x) * std::conj(e[c].function(x)); }, 0);
      EXPECT_LT(std::abs(ip - (a == c ? 1.0 : 0.0)), 1e-12);
    }
}

TEST(Assemble, TruncationsAgreeOnBoundedRegion) {
  // Triangular model: the spectrum is exactly the diagonal at any cutoff.
  const double h = 0.1;
  auto restricted = [&](int K) {
    std::vector<cplx> out;
    for (cplx z : eigenvalues(assemble_operator(triangular_model(h), FourierBasis(K))).eigenvalues)
      if (std::abs(z) <= 1.0) out.push_back(z);
    return out;
  };
  const auto a = restricted(20), b = restricted(40);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LT(std::abs(a[i] - b[i]), 1e-6);
}

TEST(MatrixDump, CsvRowsHoldReImPairs) {
  ComplexMatrix m(2, 2);
  m << cplx(1, 2), cplx(3, 4), cplx(5, 6), cplx(0.1, -0.25);
  std::ostringstream os;
  write_matrix_csv(os, m);
  EXPECT_EQ(os.str(), "1,2,3,4\n5,6,0.10000000000000001,-0.25\n");
}
