#include <catch2/catch.hpp>

#include <algorithm>
#include <complex>
#include <vector>

#include "support/test_rng.hpp"
#include "tricfrac/operator_core.hpp"
#include "tricfrac/oracle.hpp"

using namespace tricfrac;

namespace {

DenseMatrix random_hermitian(testsupport::Rng& rng, std::size_t n, double bound) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = Complex(rng.uniform(-bound, bound), 0.0);
    for (std::size_t j = i + 1; j < n; ++j) {
      const Complex v = rng.complex_box(bound);
      m(i, j) = v;
      m(j, i) = std::conj(v);
    }
  }
  return m;
}

}  // namespace

TEST_CASE("exchange matrix eigenvalues") {
  DenseMatrix m(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  const std::vector<double> eig = oracle::eig_hermitian(m);
  CHECK(eig[0] == Approx(-1.0).epsilon(1e-14));
  CHECK(eig[1] == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("jacobi trace identity and residuals on a random hermitian matrix") {
  testsupport::Rng rng(60233);
  const std::size_t n = 20;
  const DenseMatrix m = random_hermitian(rng, n, 4.0);
  const DenseHermitian hm(m);
  const oracle::HermitianEigenSystem sys = oracle::eig_hermitian_system(hm);

  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += m(i, i).real();
  double sum = 0.0;
  for (double v : sys.values) sum += v;
  CHECK(trace == Approx(sum).margin(1e-10 * std::max(1.0, std::abs(trace))));

  const double norm = m.frobenius_norm();
  for (std::size_t k = 0; k < n; ++k) {
    double resid = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Complex acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += m(i, j) * sys.vectors(j, k);
      acc -= sys.values[k] * sys.vectors(i, k);
      resid += std::norm(acc);
    }
    CHECK(std::sqrt(resid) <= 1e-10 * norm);
  }
}

TEST_CASE("eig_hermitian rejects non-hermitian input") {
  DenseMatrix m(2, 2);
  m(0, 1) = Complex(0.0, 1.0);
  m(1, 0) = Complex(0.0, 1.0);  // should be -i
  CHECK_THROWS_AS(oracle::eig_hermitian(m), ValidationError);
}

TEST_CASE("singular values of simple truncations") {
  const std::vector<double> one = oracle::svd_values(build_tridiagonal({}, {4.0}, {0.5}));
  REQUIRE(one.size() == 1);
  CHECK(one[0] == Approx(std::sqrt(16.25)).epsilon(1e-12));

  const std::vector<double> pair =
      oracle::svd_values(build_tridiagonal({1.0}, {0.0, 0.0}, {0.0, 0.0}));
  REQUIRE(pair.size() == 2);
  CHECK(pair[0] == Approx(1.0).margin(1e-12));
  CHECK(pair[1] == Approx(1.0).margin(1e-12));
}

TEST_CASE("singular values ignore off-diagonal sign flips") {
  testsupport::Rng rng(81754);
  for (int trial = 0; trial < 4; ++trial) {
    const std::size_t n = rng.index(3, 12);
    std::vector<double> alpha = rng.vector(n - 1, -5.0, 5.0);
    const std::vector<double> beta = rng.vector(n, -5.0, 5.0);
    const std::vector<double> gamma = rng.vector(n, -5.0, 5.0);
    const std::vector<double> base = oracle::svd_values(ComplexTridiagonal(alpha, beta, gamma));

    // conjugation by diag(+-1) flips selected couplings and leaves the
    // diagonal untouched
    std::vector<double> sign(n, 1.0);
    for (std::size_t k = 0; k < n; ++k)
      if (rng.uniform(0.0, 1.0) < 0.5) sign[k] = -1.0;
    std::vector<double> flipped = alpha;
    for (std::size_t k = 0; k + 1 < n; ++k) flipped[k] *= sign[k] * sign[k + 1];
    const std::vector<double> other =
        oracle::svd_values(ComplexTridiagonal(flipped, beta, gamma));

    REQUIRE(base.size() == other.size());
    for (std::size_t i = 0; i < base.size(); ++i)
      CHECK(base[i] == Approx(other[i]).margin(1e-10 * std::max(1.0, base.back())));
  }
}

TEST_CASE("dense inverse basics") {
  CHECK(oracle::dense_inverse(DenseMatrix::identity(3)).same_entries(DenseMatrix::identity(3)));

  DenseMatrix d(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 4.0;
  const DenseMatrix inv = oracle::dense_inverse(d);
  CHECK(inv(0, 0) == Complex(0.5, 0.0));
  CHECK(inv(1, 1) == Complex(0.25, 0.0));

  DenseMatrix singular(2, 2);
  singular(0, 0) = 1.0;
  singular(0, 1) = 2.0;
  singular(1, 0) = 0.5;
  singular(1, 1) = 1.0;
  CHECK_THROWS_AS(oracle::dense_inverse(singular), SingularityError);
}

TEST_CASE("dense inverse residual on a random matrix") {
  testsupport::Rng rng(19022);
  const std::size_t n = 50;
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rng.complex_box(1.0);
  const DenseMatrix prod = m * oracle::dense_inverse(m);
  CHECK(max_abs_diff(prod, DenseMatrix::identity(n)) <= 1e-9);
}

TEST_CASE("complex eigenvalues of a diagonal matrix") {
  const GeneralTridiagonal h({Complex(1.0, 1.0), Complex(2.0, -1.0)}, {0.0}, {0.0});
  const std::vector<Complex> eig = oracle::eig_complex(h);
  REQUIRE(eig.size() == 2);
  CHECK(std::abs(eig[0] - Complex(1.0, 1.0)) < 1e-12);
  CHECK(std::abs(eig[1] - Complex(2.0, -1.0)) < 1e-12);
}

TEST_CASE("complex eigenvalues match the hermitian solver on a real symmetric matrix") {
  testsupport::Rng rng(34717);
  const std::size_t n = 14;
  const std::vector<double> off = rng.vector(n - 1, -2.0, 2.0);
  const std::vector<double> diag = rng.vector(n, -2.0, 2.0);
  std::vector<Complex> cdiag(n), coff(n - 1);
  for (std::size_t i = 0; i < n; ++i) cdiag[i] = diag[i];
  for (std::size_t i = 0; i + 1 < n; ++i) coff[i] = off[i];
  const GeneralTridiagonal h(cdiag, coff, coff);

  std::vector<Complex> eig = oracle::eig_complex(h);
  const std::vector<double> ref =
      oracle::eig_hermitian(assemble_dense(ComplexTridiagonal(off, diag, std::vector<double>(n, 0.0))));
  REQUIRE(eig.size() == ref.size());
  for (std::size_t i = 0; i < eig.size(); ++i) {
    CHECK(std::abs(eig[i].imag()) < 1e-9);
    CHECK(eig[i].real() == Approx(ref[i]).margin(1e-9 * std::max(1.0, std::abs(ref[i]))));
  }
}

TEST_CASE("defective two-by-two with double eigenvalue zero") {
  const GeneralTridiagonal h({Complex(0.0, 1.0), Complex(0.0, -1.0)}, {1.0}, {1.0});
  const std::vector<Complex> eig = oracle::eig_complex(h);
  REQUIRE(eig.size() == 2);
  CHECK(std::abs(eig[0]) < 1e-8);
  CHECK(std::abs(eig[1]) < 1e-8);
}
