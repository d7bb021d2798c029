#pragma once

// Scalar continued-fraction machinery for tridiagonal resolvents: the
// backward tail recurrence, the bidiagonal U*F*L factorization of H - z,
// its explicit product-form inverses, and the fixed-point analysis of the
// homogeneous iteration f -> 2/(2*beta - f).

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "tricfrac/config.hpp"
#include "tricfrac/dense_matrix.hpp"
#include "tricfrac/errors.hpp"
#include "tricfrac/operator_core.hpp"

namespace tricfrac {

// Relative threshold below which a continued-fraction denominator counts as
// a genuine pole rather than roundoff.
inline constexpr double singularity_eps = 1e-14;

// Tail coefficients f_1..f_n of the shifted matrix H - z, computed backward
// with f_{n+1} = 0 from
//   f_k = 1 / (a_k - z - b_k * f_{k+1} * c_{k+1}).
// When a denominator magnitude falls under singularity_eps * scale the
// recurrence stops; breakdown_index is the 1-based position of the vanishing
// denominator and entries at or below it are meaningless.
struct CfTail {
  Complex z;
  std::vector<Complex> f;
  std::optional<std::size_t> breakdown_index;
};

inline CfTail cf_tail(const GeneralTridiagonal& h, Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw ValidationError("shift z must be finite");
  const std::size_t n = h.size();
  CfTail tail{z, std::vector<Complex>(n), std::nullopt};
  for (std::size_t k = n; k >= 1; --k) {
    const std::size_t i = k - 1;
    Complex denom = h.diag()[i] - z;
    if (k < n) denom -= h.super()[i] * tail.f[i + 1] * h.sub()[i];
    const double scale = std::max({1.0, std::abs(h.diag()[i]), std::abs(z)});
    if (std::abs(denom) < singularity_eps * scale) {
      tail.breakdown_index = k;
      break;
    }
    tail.f[i] = 1.0 / denom;
  }
  return tail;
}

// The three factors of H - z = U * F * L:
//   u_super[k] = b_{k+1} f_{k+2}   (superdiagonal of the unit upper factor)
//   f_diag[k]  = 1 / f_{k+1}       (diagonal middle factor)
//   l_sub[k]   = f_{k+2} c_{k+2}   (subdiagonal of the unit lower factor)
// indices 0-based in storage, so entry k of l_sub sits at matrix (k+1, k).
struct Factorization {
  Complex z;
  std::vector<Complex> u_super;
  std::vector<Complex> f_diag;
  std::vector<Complex> l_sub;
};

inline Factorization factorize(const GeneralTridiagonal& h, Complex z) {
  const CfTail tail = cf_tail(h, z);
  if (tail.breakdown_index) {
    throw PoleError("factorization breakdown at tail index " +
                        std::to_string(*tail.breakdown_index),
                    *tail.breakdown_index);
  }
  const std::size_t n = h.size();
  Factorization fac{z, std::vector<Complex>(n - 1), std::vector<Complex>(n),
                    std::vector<Complex>(n - 1)};
  for (std::size_t k = 0; k < n; ++k) fac.f_diag[k] = 1.0 / tail.f[k];
  for (std::size_t k = 0; k + 1 < n; ++k) {
    fac.u_super[k] = h.super()[k] * tail.f[k + 1];
    fac.l_sub[k] = tail.f[k + 1] * h.sub()[k];
  }
  return fac;
}

inline DenseMatrix assemble_factor_u(const Factorization& fac) {
  const std::size_t n = fac.f_diag.size();
  DenseMatrix m = DenseMatrix::identity(n);
  for (std::size_t k = 0; k + 1 < n; ++k) m(k, k + 1) = fac.u_super[k];
  return m;
}

inline DenseMatrix assemble_factor_f(const Factorization& fac) {
  const std::size_t n = fac.f_diag.size();
  DenseMatrix m(n, n);
  for (std::size_t k = 0; k < n; ++k) m(k, k) = fac.f_diag[k];
  return m;
}

inline DenseMatrix assemble_factor_l(const Factorization& fac) {
  const std::size_t n = fac.f_diag.size();
  DenseMatrix m = DenseMatrix::identity(n);
  for (std::size_t k = 0; k + 1 < n; ++k) m(k + 1, k) = fac.l_sub[k];
  return m;
}

// (1,1) entry of the resolvent (H - z)^{-1}; this is the first tail value.
inline Complex greens_f1(const GeneralTridiagonal& h, Complex z) {
  const CfTail tail = cf_tail(h, z);
  if (tail.breakdown_index) {
    throw PoleError("resolvent pole near tail index " +
                        std::to_string(*tail.breakdown_index),
                    *tail.breakdown_index);
  }
  return tail.f[0];
}

// Explicit inverse of the unit upper factor: ones on the diagonal and
// entry (i,j) = u_{i+2} u_{i+3} ... u_{j+1} with u_{k+1} = -b_k f_{k+1}.
inline DenseMatrix inverse_upper_factor(const GeneralTridiagonal& h, const CfTail& tail) {
  const std::size_t n = h.size();
  DenseMatrix m = DenseMatrix::identity(n);
  std::vector<Complex> u(n);  // u[j] multiplies when extending a row to column j
  for (std::size_t j = 1; j < n; ++j) u[j] = -h.super()[j - 1] * tail.f[j];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m(i, j) = m(i, j - 1) * u[j];
  return m;
}

// Explicit inverse of the unit lower factor, with v_j = -c_j f_j.
inline DenseMatrix inverse_lower_factor(const GeneralTridiagonal& h, const CfTail& tail) {
  const std::size_t n = h.size();
  DenseMatrix m = DenseMatrix::identity(n);
  std::vector<Complex> v(n);
  for (std::size_t i = 1; i < n; ++i) v[i] = -h.sub()[i - 1] * tail.f[i];
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = j + 1; i < n; ++i) m(i, j) = v[i] * m(i - 1, j);
  return m;
}

// Full resolvent (H - z)^{-1} = L^{-1} * F^{-1} * U^{-1} assembled from the
// product-form inverses.  Dense output, capped by the dense limit.
inline DenseMatrix resolvent_full(const GeneralTridiagonal& h, Complex z) {
  const std::size_t n = h.size();
  if (n > dense_limit()) throw SizeError("resolvent size exceeds the dense limit");
  const CfTail tail = cf_tail(h, z);
  if (tail.breakdown_index) {
    throw PoleError("resolvent pole near tail index " +
                        std::to_string(*tail.breakdown_index),
                    *tail.breakdown_index);
  }
  const DenseMatrix uinv = inverse_upper_factor(h, tail);
  const DenseMatrix linv = inverse_lower_factor(h, tail);
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Complex s = 0.0;
      const std::size_t kmax = std::min(i, j);
      for (std::size_t k = 0; k <= kmax; ++k) s += linv(i, k) * tail.f[k] * uinv(k, j);
      out(i, j) = s;
    }
  }
  return out;
}

// Fixed points of the homogeneous map f -> 2/(2*beta - f): the roots of
// f^2 - 2*beta*f + 2 = 0, their derivative values (f^2)/2, and whichever
// root (if any) the iteration can actually accumulate at.
struct ScalarFixedPointReport {
  double beta;
  std::array<Complex, 2> roots;        // beta + sqrt(beta^2-2), beta - sqrt(...)
  std::array<Complex, 2> derivatives;  // roots[i]^2 / 2
  std::optional<double> stable_root;   // set iff exactly one derivative is inside the unit disc
  bool roots_real;
};

inline ScalarFixedPointReport scalar_fixed_points(double beta) {
  if (!std::isfinite(beta)) throw ValidationError("beta must be finite");
  ScalarFixedPointReport rep;
  rep.beta = beta;
  const double disc = beta * beta - 2.0;
  const Complex root_disc = std::sqrt(Complex(disc, 0.0));
  rep.roots = {Complex(beta, 0.0) + root_disc, Complex(beta, 0.0) - root_disc};
  rep.derivatives = {0.5 * rep.roots[0] * rep.roots[0], 0.5 * rep.roots[1] * rep.roots[1]};
  rep.roots_real = disc >= 0.0;
  int stable_count = 0;
  std::size_t stable_at = 0;
  for (std::size_t i = 0; i < 2; ++i) {
    if (std::abs(rep.derivatives[i]) < 1.0) {
      ++stable_count;
      stable_at = i;
    }
  }
  if (stable_count == 1 && rep.roots_real) rep.stable_root = rep.roots[stable_at].real();
  return rep;
}

enum class ScalarVerdict { Converged, Diverged, MaxIterations };

struct ScalarTrace {
  std::vector<double> values;  // values[0] is the starting point
  ScalarVerdict verdict = ScalarVerdict::MaxIterations;
  double limit = 0.0;          // meaningful when Converged
  std::size_t steps = 0;       // number of applications of the map
};

namespace detail {

template <typename Map>
ScalarTrace iterate_scalar_map(Map&& next_value, double f0, std::size_t max_iter,
                               double tol) {
  if (max_iter < 1) throw ValidationError("max_iter must be at least 1");
  if (!(tol > 0.0)) throw ValidationError("tol must be positive");
  ScalarTrace trace;
  trace.values.reserve(max_iter + 1);
  trace.values.push_back(f0);
  double f = f0;
  for (std::size_t step = 1; step <= max_iter; ++step) {
    const std::optional<double> fn = next_value(f);
    if (!fn) {  // denominator vanished
      trace.verdict = ScalarVerdict::Diverged;
      trace.steps = step;
      return trace;
    }
    trace.values.push_back(*fn);
    trace.steps = step;
    if (!std::isfinite(*fn) || std::abs(*fn) > 1e12) {
      trace.verdict = ScalarVerdict::Diverged;
      return trace;
    }
    if (std::abs(*fn - f) < tol) {
      trace.verdict = ScalarVerdict::Converged;
      trace.limit = *fn;
      return trace;
    }
    f = *fn;
  }
  trace.verdict = ScalarVerdict::MaxIterations;
  return trace;
}

}  // namespace detail

// Homogeneous iteration f <- 2/(2*beta - f).
inline ScalarTrace scalar_iterate(double beta, double f0, std::size_t max_iter,
                                  double tol) {
  if (!std::isfinite(beta) || !std::isfinite(f0))
    throw ValidationError("beta and f0 must be finite");
  return detail::iterate_scalar_map(
      [beta](double f) -> std::optional<double> {
        const double denom = 2.0 * beta - f;
        if (std::abs(denom) < 1e-14) return std::nullopt;
        return 2.0 / denom;
      },
      f0, max_iter, tol);
}

// Serialization convention for scalar traces: CSV columns step,f at full
// precision.
inline std::string scalar_trace_csv(const ScalarTrace& trace) {
  std::string out = "step,f\n";
  for (std::size_t i = 0; i < trace.values.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, trace.values[i]);
    out += buf;
  }
  return out;
}

// General one-parameter family f <- 1/(beta - energy - alpha^2 f); the
// homogeneous map above is the special case energy = 0, alpha = 1/sqrt(2).
inline ScalarTrace scalar_iterate_general(double beta, double energy, double alpha,
                                          double f0, std::size_t max_iter, double tol) {
  if (!std::isfinite(beta) || !std::isfinite(energy) || !std::isfinite(alpha) ||
      !std::isfinite(f0))
    throw ValidationError("parameters must be finite");
  const double a2 = alpha * alpha;
  return detail::iterate_scalar_map(
      [beta, energy, a2](double f) -> std::optional<double> {
        const double denom = beta - energy - a2 * f;
        if (std::abs(denom) < 1e-14) return std::nullopt;
        return 1.0 / denom;
      },
      f0, max_iter, tol);
}

}  // namespace tricfrac
