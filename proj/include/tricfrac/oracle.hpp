#pragma once

// Dense reference implementations used to validate the continued-fraction
// paths.  Nothing in this header performs continued-fraction arithmetic;
// keeping the two code paths disjoint is what makes the cross-checks in the
// test suite meaningful.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "tricfrac/config.hpp"
#include "tricfrac/dense_matrix.hpp"
#include "tricfrac/detail/complex_eig.hpp"
#include "tricfrac/errors.hpp"
#include "tricfrac/operator_core.hpp"

namespace tricfrac::oracle {

struct HermitianEigenSystem {
  std::vector<double> values;  // ascending
  DenseMatrix vectors;         // column k pairs with values[k]
};

namespace detail {

// One cyclic sweep target: rotate (p,q) so the updated entry vanishes.
// The rotation is diag(w,1) * G with w the phase of a(p,q) and G a real
// Jacobi rotation, so only standard real-angle formulas are needed.
inline void apply_complex_jacobi(DenseMatrix& a, DenseMatrix* v, std::size_t p,
                                 std::size_t q) {
  const Complex apq = a(p, q);
  const double m = std::abs(apq);
  if (m < 1e-300) return;
  const Complex w = apq / m;
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double theta = 0.5 * std::atan2(2.0 * m, aqq - app);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const Complex wc = w * c;
  const Complex ws = w * s;

  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i) {  // columns: A <- A * R
    const Complex x = a(i, p);
    const Complex y = a(i, q);
    a(i, p) = wc * x - s * y;
    a(i, q) = ws * x + c * y;
  }
  for (std::size_t j = 0; j < n; ++j) {  // rows: A <- R^dagger * A
    const Complex x = a(p, j);
    const Complex y = a(q, j);
    a(p, j) = std::conj(wc) * x - s * y;
    a(q, j) = std::conj(ws) * x + c * y;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = Complex(a(p, p).real(), 0.0);
  a(q, q) = Complex(a(q, q).real(), 0.0);
  if (v) {
    for (std::size_t i = 0; i < n; ++i) {
      const Complex x = (*v)(i, p);
      const Complex y = (*v)(i, q);
      (*v)(i, p) = wc * x - s * y;
      (*v)(i, q) = ws * x + c * y;
    }
  }
}

inline double off_diagonal_norm(const DenseMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

inline HermitianEigenSystem jacobi_eigen(const DenseMatrix& input, bool want_vectors) {
  const std::size_t n = input.rows();
  if (n > tricfrac::dense_limit())
    throw SizeError("matrix exceeds the dense limit");
  DenseMatrix a = input;
  DenseMatrix v;
  if (want_vectors) v = DenseMatrix::identity(n);

  const double total = a.frobenius_norm();
  const double target = 1e-15 * std::max(total, 1e-300);
  bool converged = off_diagonal_norm(a) <= target;
  for (std::size_t sweep = 0; sweep < 60 && !converged; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q)
        apply_complex_jacobi(a, want_vectors ? &v : nullptr, p, q);
    converged = off_diagonal_norm(a) <= target;
  }
  if (!converged) throw NumericalError("Jacobi sweeps did not converge");

  HermitianEigenSystem sys;
  sys.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) sys.values[i] = a(i, i).real();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return sys.values[i] < sys.values[j]; });
  std::vector<double> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = sys.values[order[i]];
  sys.values = std::move(sorted);
  if (want_vectors) {
    sys.vectors = DenseMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) sys.vectors(i, j) = v(i, order[j]);
  }
  return sys;
}

}  // namespace detail

// Real eigenvalues of a Hermitian matrix, ascending, by cyclic Jacobi sweeps.
inline std::vector<double> eig_hermitian(const DenseHermitian& m) {
  return detail::jacobi_eigen(m.matrix(), false).values;
}

inline std::vector<double> eig_hermitian(const DenseMatrix& m) {
  if (m.rows() != m.cols()) throw ValidationError("matrix must be square");
  if (m.hermiticity_defect() > 1e-12 * std::max(1.0, m.max_abs()))
    throw ValidationError("matrix is not Hermitian to tolerance");
  return detail::jacobi_eigen(m, false).values;
}

inline HermitianEigenSystem eig_hermitian_system(const DenseHermitian& m) {
  return detail::jacobi_eigen(m.matrix(), true);
}

// Singular values of the truncation, ascending, computed through the doubled
// Hermitian matrix.  The plus/minus pairing of the doubled spectrum is
// verified before the non-negative half is returned.
inline std::vector<double> svd_values(const ComplexTridiagonal& h) {
  if (2 * h.size() > tricfrac::dense_limit())
    throw SizeError("doubled matrix exceeds the dense limit");
  const std::vector<double> all = eig_hermitian(augment_double(h));
  const std::size_t n = h.size();
  double scale = 1.0;
  for (double v : all) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(all[i] + all[2 * n - 1 - i]) > 1e-10 * scale) {
      throw ConsistencyError(
          "doubled spectrum is not paired: " + std::to_string(all[i]) + " vs " +
          std::to_string(all[2 * n - 1 - i]));
    }
  }
  return std::vector<double>(all.begin() + static_cast<std::ptrdiff_t>(n), all.end());
}

// Partial-pivoting Gauss-Jordan inverse.
inline DenseMatrix dense_inverse(const DenseMatrix& m) {
  const std::size_t n = m.rows();
  if (m.cols() != n) throw ValidationError("inverse needs a square matrix");
  if (n > tricfrac::dense_limit()) throw SizeError("matrix exceeds the dense limit");
  DenseMatrix a = m;
  DenseMatrix inv = DenseMatrix::identity(n);
  const double pivot_floor = 1e-13 * std::max(m.max_abs(), 1e-300);

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(a(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      const double cand = std::abs(a(r, col));
      if (cand > best) {
        best = cand;
        pivot = r;
      }
    }
    if (best < pivot_floor) throw SingularityError("matrix is singular to working precision");
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(col, j), a(pivot, j));
        std::swap(inv(col, j), inv(pivot, j));
      }
    }
    const Complex d = a(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      a(col, j) /= d;
      inv(col, j) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const Complex factor = a(r, col);
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a(r, j) -= factor * a(col, j);
        inv(r, j) -= factor * inv(col, j);
      }
    }
  }
  return inv;
}

// Complex eigenvalues of a general tridiagonal matrix (already Hessenberg),
// sorted by real part then imaginary part.  Comparison data for the CLI.
inline std::vector<Complex> eig_complex(const GeneralTridiagonal& h) {
  if (h.size() > tricfrac::dense_limit())
    throw SizeError("matrix exceeds the dense limit");
  std::vector<Complex> eig =
      tricfrac::detail::hessenberg_eigenvalues(assemble_dense(h));
  std::sort(eig.begin(), eig.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return eig;
}

}  // namespace tricfrac::oracle
