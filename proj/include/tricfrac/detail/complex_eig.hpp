#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "tricfrac/dense_matrix.hpp"
#include "tricfrac/errors.hpp"

namespace tricfrac::detail {

struct GivensRotation {
  double c;   // real cosine
  Complex s;  // complex sine, c*c + |s|^2 = 1
};

// Unitary [[c, s],[-conj(s), c]] mapping (f, g) to (r, 0).
inline GivensRotation make_givens(Complex f, Complex g) {
  if (g == 0.0) return {1.0, 0.0};
  if (f == 0.0) return {0.0, 1.0};
  const double d = std::sqrt(std::norm(f) + std::norm(g));
  const double af = std::abs(f);
  return {af / d, (f / af) * std::conj(g) / d};
}

// In-place Householder-free reduction to upper Hessenberg form using Givens
// rotations; adequate for the small matrices this header serves.
inline void hessenberg_reduce(DenseMatrix& a) {
  const std::size_t n = a.rows();
  for (std::size_t col = 0; col + 2 < n; ++col) {
    for (std::size_t row = n - 1; row > col + 1; --row) {
      if (a(row, col) == 0.0) continue;
      const GivensRotation g = make_givens(a(row - 1, col), a(row, col));
      for (std::size_t j = 0; j < n; ++j) {
        const Complex x = a(row - 1, j);
        const Complex y = a(row, j);
        a(row - 1, j) = g.c * x + g.s * y;
        a(row, j) = -std::conj(g.s) * x + g.c * y;
      }
      for (std::size_t i = 0; i < n; ++i) {
        const Complex x = a(i, row - 1);
        const Complex y = a(i, row);
        a(i, row - 1) = g.c * x + std::conj(g.s) * y;
        a(i, row) = -g.s * x + g.c * y;
      }
      a(row, col) = 0.0;
    }
  }
}

inline std::array<Complex, 2> eig2x2(Complex a, Complex b, Complex c, Complex d) {
  const Complex half_tr = 0.5 * (a + d);
  const Complex disc = std::sqrt(half_tr * half_tr - (a * d - b * c));
  return {half_tr + disc, half_tr - disc};
}

// Eigenvalues of an upper-Hessenberg complex matrix via the single-shift QR
// iteration with deflation.  Blocks of size two are finished in closed form.
inline std::vector<Complex> hessenberg_eigenvalues(DenseMatrix h) {
  const std::size_t n = h.rows();
  if (h.cols() != n) throw ValidationError("eigenvalue problem needs a square matrix");
  std::vector<Complex> eig;
  eig.reserve(n);
  if (n == 0) return eig;

  const double eps = 1e-15;
  std::size_t high = n - 1;
  std::size_t iter = 0;
  const std::size_t iter_cap = 120;

  while (true) {
    // Deflate trivially small subdiagonal entries.
    std::size_t low = high;
    while (low > 0) {
      const double bound =
          eps * (std::abs(h(low - 1, low - 1)) + std::abs(h(low, low)));
      if (std::abs(h(low, low - 1)) <= std::max(bound, 1e-300)) {
        h(low, low - 1) = 0.0;
        break;
      }
      --low;
    }

    if (low == high) {
      eig.push_back(h(high, high));
      if (high == 0) break;
      --high;
      iter = 0;
      continue;
    }
    if (low + 1 == high) {
      const auto pair =
          eig2x2(h(low, low), h(low, high), h(high, low), h(high, high));
      eig.push_back(pair[0]);
      eig.push_back(pair[1]);
      if (low == 0) break;
      high = low - 1;
      iter = 0;
      continue;
    }

    if (++iter > iter_cap) {
      throw NumericalError("QR eigenvalue iteration did not converge");
    }

    // Wilkinson shift: eigenvalue of the trailing 2x2 closest to the corner.
    Complex shift;
    {
      const auto pair = eig2x2(h(high - 1, high - 1), h(high - 1, high),
                               h(high, high - 1), h(high, high));
      const Complex corner = h(high, high);
      shift = (std::abs(pair[0] - corner) < std::abs(pair[1] - corner)) ? pair[0]
                                                                        : pair[1];
      if (iter % 12 == 0) {
        // Exceptional shift to break rare stagnation cycles.
        shift = corner + Complex(1.1331 * std::abs(h(high, high - 1)), 0.0);
      }
    }

    // Explicit QR sweep on the active window [low, high]; blocks outside the
    // window do not feed back into the eigenvalues and are left untouched.
    std::vector<GivensRotation> rot(high - low);
    for (std::size_t i = low; i <= high; ++i) h(i, i) -= shift;
    for (std::size_t i = low; i < high; ++i) {
      const GivensRotation g = make_givens(h(i, i), h(i + 1, i));
      rot[i - low] = g;
      for (std::size_t j = i; j <= high; ++j) {
        const Complex x = h(i, j);
        const Complex y = h(i + 1, j);
        h(i, j) = g.c * x + g.s * y;
        h(i + 1, j) = -std::conj(g.s) * x + g.c * y;
      }
      h(i + 1, i) = 0.0;
    }
    for (std::size_t i = low; i < high; ++i) {
      const GivensRotation g = rot[i - low];
      const std::size_t top = low;
      const std::size_t bottom = std::min(i + 2, high);
      for (std::size_t r = top; r <= bottom; ++r) {
        const Complex x = h(r, i);
        const Complex y = h(r, i + 1);
        h(r, i) = g.c * x + std::conj(g.s) * y;
        h(r, i + 1) = -g.s * x + g.c * y;
      }
    }
    for (std::size_t i = low; i <= high; ++i) h(i, i) += shift;
  }
  return eig;
}

inline std::vector<Complex> dense_eigenvalues(DenseMatrix a) {
  hessenberg_reduce(a);
  return hessenberg_eigenvalues(std::move(a));
}

}  // namespace tricfrac::detail
