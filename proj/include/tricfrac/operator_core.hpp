#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "tricfrac/dense_matrix.hpp"
#include "tricfrac/errors.hpp"

namespace tricfrac {

namespace detail {

inline void require_finite(const std::vector<double>& v, const char* name) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw ValidationError(std::string(name) + " contains a non-finite entry");
    }
  }
}

inline void require_finite(const std::vector<Complex>& v, const char* name) {
  for (const Complex& x : v) {
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) {
      throw ValidationError(std::string(name) + " contains a non-finite entry");
    }
  }
}

}  // namespace detail

// Finite truncation of a complex-symmetric tridiagonal operator: real
// couplings alpha_k on both off-diagonals, complex entries beta_k+i*gamma_k
// on the diagonal.  Immutable after construction.
class ComplexTridiagonal {
 public:
  ComplexTridiagonal(std::vector<double> alpha, std::vector<double> beta,
                     std::vector<double> gamma)
      : alpha_(std::move(alpha)), beta_(std::move(beta)), gamma_(std::move(gamma)) {
    if (beta_.empty()) throw ValidationError("beta must have at least one entry");
    if (gamma_.size() != beta_.size())
      throw ValidationError("gamma must have the same length as beta");
    if (alpha_.size() + 1 != beta_.size())
      throw ValidationError("alpha must have one entry fewer than beta");
    detail::require_finite(alpha_, "alpha");
    detail::require_finite(beta_, "beta");
    detail::require_finite(gamma_, "gamma");
  }

  std::size_t size() const noexcept { return beta_.size(); }
  const std::vector<double>& alpha() const noexcept { return alpha_; }
  const std::vector<double>& beta() const noexcept { return beta_; }
  const std::vector<double>& gamma() const noexcept { return gamma_; }
  Complex diagonal(std::size_t k) const { return Complex(beta_[k], gamma_[k]); }

 private:
  std::vector<double> alpha_;
  std::vector<double> beta_;
  std::vector<double> gamma_;
};

// General complex tridiagonal matrix with independent super- and
// sub-diagonals.  sub[k] is the entry at (k+1, k).
class GeneralTridiagonal {
 public:
  GeneralTridiagonal(std::vector<Complex> diag, std::vector<Complex> super,
                     std::vector<Complex> sub)
      : diag_(std::move(diag)), super_(std::move(super)), sub_(std::move(sub)) {
    if (diag_.empty()) throw ValidationError("diag must have at least one entry");
    if (super_.size() + 1 != diag_.size())
      throw ValidationError("super must have one entry fewer than diag");
    if (sub_.size() + 1 != diag_.size())
      throw ValidationError("sub must have one entry fewer than diag");
    detail::require_finite(diag_, "diag");
    detail::require_finite(super_, "super");
    detail::require_finite(sub_, "sub");
  }

  std::size_t size() const noexcept { return diag_.size(); }
  const std::vector<Complex>& diag() const noexcept { return diag_; }
  const std::vector<Complex>& super() const noexcept { return super_; }
  const std::vector<Complex>& sub() const noexcept { return sub_; }

 private:
  std::vector<Complex> diag_;
  std::vector<Complex> super_;
  std::vector<Complex> sub_;
};

// Hermitian block-tridiagonal partner built from 2x2 blocks
//   A_k = [[0, d_k],[conj(d_k), 0]],   B_k = C_{k+1} = [[0, a_k],[a_k, 0]]
// with d_k = beta_k + i*gamma_k and real couplings a_k = alpha_k.
class BlockTridiagonal2 {
 public:
  BlockTridiagonal2(std::vector<Complex> diag_offdiag, std::vector<double> coupling)
      : diag_offdiag_(std::move(diag_offdiag)), coupling_(std::move(coupling)) {
    if (diag_offdiag_.empty())
      throw ValidationError("diag_offdiag must have at least one entry");
    if (coupling_.size() + 1 != diag_offdiag_.size())
      throw ValidationError("coupling must have one entry fewer than diag_offdiag");
    detail::require_finite(diag_offdiag_, "diag_offdiag");
    detail::require_finite(coupling_, "coupling");
  }

  std::size_t size() const noexcept { return diag_offdiag_.size(); }
  const std::vector<Complex>& diag_offdiag() const noexcept { return diag_offdiag_; }
  const std::vector<double>& coupling() const noexcept { return coupling_; }

 private:
  std::vector<Complex> diag_offdiag_;
  std::vector<double> coupling_;
};

// Dense matrix certified Hermitian at construction (defect at most 1e-13
// relative to the largest entry magnitude).
class DenseHermitian {
 public:
  explicit DenseHermitian(DenseMatrix m) : matrix_(std::move(m)) {
    if (matrix_.rows() != matrix_.cols())
      throw ValidationError("Hermitian matrix must be square");
    if (!matrix_.all_finite())
      throw ValidationError("Hermitian matrix contains a non-finite entry");
    if (matrix_.hermiticity_defect() > 1e-13 * matrix_.max_abs())
      throw ValidationError("matrix is not Hermitian to tolerance");
  }

  std::size_t dim() const noexcept { return matrix_.rows(); }
  const DenseMatrix& matrix() const noexcept { return matrix_; }

 private:
  DenseMatrix matrix_;
};

inline ComplexTridiagonal build_tridiagonal(std::vector<double> alpha,
                                            std::vector<double> beta,
                                            std::vector<double> gamma) {
  return ComplexTridiagonal(std::move(alpha), std::move(beta), std::move(gamma));
}

// Three-point stencil for -d^2/dr^2 + V(r) on the uniform lattice r_k = k*h
// with the wavefunction pinned to zero at both dropped endpoints.  The raw
// stencil has diagonal 2/h^2 + V(r_k) and off-diagonal -1/h^2; `normalized`
// divides the whole matrix by -1/h^2 so every coupling becomes exactly 1.
// Reported eigen/singular values follow the chosen scaling.
inline ComplexTridiagonal discretize_schroedinger(const std::vector<double>& v_re,
                                                  const std::vector<double>& v_im,
                                                  double h, bool normalized = false) {
  if (v_re.empty()) throw ValidationError("v_re must have at least one sample");
  if (v_im.size() != v_re.size())
    throw ValidationError("v_im must have the same length as v_re");
  if (!(h > 0.0) || !std::isfinite(h))
    throw ValidationError("h must be a positive finite grid spacing");
  detail::require_finite(v_re, "v_re");
  detail::require_finite(v_im, "v_im");

  const std::size_t n = v_re.size();
  const double inv_h2 = 1.0 / (h * h);
  std::vector<double> alpha(n - 1), beta(n), gamma(n);
  if (normalized) {
    const double scale = -(h * h);  // divide by -1/h^2
    for (std::size_t k = 0; k + 1 < n; ++k) alpha[k] = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      beta[k] = scale * (2.0 * inv_h2 + v_re[k]);
      gamma[k] = scale * v_im[k];
    }
  } else {
    for (std::size_t k = 0; k + 1 < n; ++k) alpha[k] = -inv_h2;
    for (std::size_t k = 0; k < n; ++k) {
      beta[k] = 2.0 * inv_h2 + v_re[k];
      gamma[k] = v_im[k];
    }
  }
  return ComplexTridiagonal(std::move(alpha), std::move(beta), std::move(gamma));
}

inline GeneralTridiagonal to_general(const ComplexTridiagonal& h) {
  const std::size_t n = h.size();
  std::vector<Complex> diag(n), off(n > 0 ? n - 1 : 0);
  for (std::size_t k = 0; k < n; ++k) diag[k] = h.diagonal(k);
  for (std::size_t k = 0; k + 1 < n; ++k) off[k] = Complex(h.alpha()[k], 0.0);
  return GeneralTridiagonal(std::move(diag), off, off);
}

inline DenseMatrix assemble_dense(const ComplexTridiagonal& h) {
  const std::size_t n = h.size();
  DenseMatrix m(n, n);
  for (std::size_t k = 0; k < n; ++k) m(k, k) = h.diagonal(k);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    m(k, k + 1) = Complex(h.alpha()[k], 0.0);
    m(k + 1, k) = Complex(h.alpha()[k], 0.0);
  }
  return m;
}

inline DenseMatrix assemble_dense(const GeneralTridiagonal& h) {
  const std::size_t n = h.size();
  DenseMatrix m(n, n);
  for (std::size_t k = 0; k < n; ++k) m(k, k) = h.diag()[k];
  for (std::size_t k = 0; k + 1 < n; ++k) {
    m(k, k + 1) = h.super()[k];
    m(k + 1, k) = h.sub()[k];
  }
  return m;
}

// Doubled Hermitian matrix [[0, H],[H^dagger, 0]] whose spectrum is the
// plus/minus pairing of the singular values of H.
inline DenseHermitian augment_double(const ComplexTridiagonal& h) {
  const std::size_t n = h.size();
  DenseMatrix m(2 * n, 2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    const Complex d = h.diagonal(k);
    m(k, n + k) = d;
    m(n + k, k) = std::conj(d);
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const Complex a(h.alpha()[k], 0.0);
    m(k, n + k + 1) = a;
    m(k + 1, n + k) = a;
    m(n + k + 1, k) = std::conj(a);
    m(n + k, k + 1) = std::conj(a);
  }
  return DenseHermitian(std::move(m));
}

inline BlockTridiagonal2 build_block_tridiagonal(const ComplexTridiagonal& h) {
  std::vector<Complex> d(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) d[k] = h.diagonal(k);
  return BlockTridiagonal2(std::move(d), h.alpha());
}

inline DenseMatrix assemble_dense(const BlockTridiagonal2& hb) {
  const std::size_t n = hb.size();
  DenseMatrix m(2 * n, 2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    const Complex d = hb.diag_offdiag()[k];
    m(2 * k, 2 * k + 1) = d;
    m(2 * k + 1, 2 * k) = std::conj(d);
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const Complex a(hb.coupling()[k], 0.0);
    m(2 * k, 2 * k + 3) = a;
    m(2 * k + 1, 2 * k + 2) = a;
    m(2 * k + 2, 2 * k + 1) = std::conj(a);
    m(2 * k + 3, 2 * k) = std::conj(a);
  }
  return m;
}

// Basis renumbering that carries the doubled order (e_1..e_n, f_1..f_n)
// into the interleaved order (e_1, f_1, e_2, f_2, ...).  Conjugating the
// doubled matrix by this permutation reproduces the assembled
// block-tridiagonal matrix entry for entry, with no arithmetic involved.
inline std::vector<std::size_t> interleave_similarity(std::size_t n) {
  if (n == 0) throw ValidationError("n must be positive");
  std::vector<std::size_t> perm(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    perm[2 * k] = k;
    perm[2 * k + 1] = n + k;
  }
  return perm;
}

// Exact reindexing M'[p][q] = M[perm[p]][perm[q]]; equivalent to P*M*P^T for
// the permutation matrix P with P[p][perm[p]] = 1.
inline DenseMatrix permutation_conjugate(const DenseMatrix& m,
                                         const std::vector<std::size_t>& perm) {
  if (m.rows() != m.cols() || m.rows() != perm.size())
    throw ValidationError("permutation size must match the matrix dimension");
  DenseMatrix out(m.rows(), m.cols());
  for (std::size_t p = 0; p < perm.size(); ++p)
    for (std::size_t q = 0; q < perm.size(); ++q) out(p, q) = m(perm[p], perm[q]);
  return out;
}

}  // namespace tricfrac
