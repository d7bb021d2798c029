#pragma once

// 2x2 matrix-continued-fraction engine for the Hermitian block-tridiagonal
// partner.  Every F_k^{-1} block is Hermitian with equal diagonal entries,
//   F_k^{-1} = [[u, x+iy],[x-iy, u]],
// so the whole backward recurrence
//   F_k^{-1} = A_k - sigma*I - B_k F_{k+1} C_{k+1}
// is carried in the three real numbers (u, x, y):
//   u' = -sigma - a^2 u / D,   x' = beta + a^2 x / D,   y' = gamma - a^2 y / D
// with D = u^2 - x^2 - y^2 the (real) determinant of the block.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tricfrac/dense_matrix.hpp"
#include "tricfrac/errors.hpp"
#include "tricfrac/operator_core.hpp"
#include "tricfrac/scalar_cf.hpp"

namespace tricfrac {

struct Uxy {
  double u = 0.0;
  double x = 0.0;
  double y = 0.0;
};

// One tail block in (u,x,y) form together with the local parameters it was
// built from.  alpha is the coupling used in the update producing this block
// (zero for the last index, which starts the recurrence).
struct McfState {
  double u, x, y;
  double sigma;
  double alpha;
  double beta;
  double gamma;

  double det() const { return u * u - x * x - y * y; }

  DenseMatrix f_inverse() const {
    DenseMatrix m(2, 2);
    m(0, 0) = u;
    m(0, 1) = Complex(x, y);
    m(1, 0) = Complex(x, -y);
    m(1, 1) = u;
    return m;
  }
};

// Tail blocks F_1..F_n at shift sigma; states[k] holds 1-based index k+1.
// On breakdown, breakdown_index is the 1-based index whose determinant
// vanished and states below it are meaningless.
struct McfTail {
  double sigma;
  std::vector<McfState> states;
  std::optional<std::size_t> breakdown_index;
};

inline McfTail mcf_tail(const BlockTridiagonal2& hb, double sigma) {
  if (!std::isfinite(sigma)) throw ValidationError("sigma must be finite");
  const std::size_t n = hb.size();
  McfTail tail{sigma, std::vector<McfState>(n), std::nullopt};
  {
    const Complex d = hb.diag_offdiag()[n - 1];
    tail.states[n - 1] = {-sigma, d.real(), d.imag(), sigma, 0.0, d.real(), d.imag()};
  }
  for (std::size_t k = n - 1; k >= 1; --k) {
    const std::size_t i = k - 1;
    const McfState& next = tail.states[i + 1];
    const double det = next.det();
    const double scale =
        std::max(1.0, next.u * next.u + next.x * next.x + next.y * next.y);
    if (std::abs(det) < singularity_eps * scale) {
      tail.breakdown_index = k + 1;
      return tail;
    }
    const double a = hb.coupling()[i];
    const double a2 = a * a;
    const Complex d = hb.diag_offdiag()[i];
    tail.states[i] = {-sigma - a2 * next.u / det, d.real() + a2 * next.x / det,
                      d.imag() - a2 * next.y / det, sigma, a, d.real(), d.imag()};
  }
  return tail;
}

enum class McfVerdict { Converged, Diverged, MaxIterations };
enum class DivergenceReason { None, Magnitude, Singular };

struct McfIterationRow {
  std::size_t step;
  double u, x, y;
};

struct IterationTrace {
  std::vector<McfIterationRow> rows;  // rows[0] is the initial state
  McfVerdict verdict = McfVerdict::MaxIterations;
  DivergenceReason reason = DivergenceReason::None;
  Uxy limit{};           // meaningful when Converged
  std::size_t steps = 0;  // number of map applications recorded
};

// Constant-coefficient iteration of the (u,x,y) map starting from the exact
// first tail block (-sigma, beta, gamma).  Every step is recorded.
inline IterationTrace mcf_iterate_homogeneous(double alpha, double beta, double gamma,
                                              double sigma, std::size_t max_iter,
                                              double tol) {
  if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(gamma) ||
      !std::isfinite(sigma))
    throw ValidationError("parameters must be finite");
  if (max_iter < 1) throw ValidationError("max_iter must be at least 1");
  if (!(tol > 0.0)) throw ValidationError("tol must be positive");

  const double a2 = alpha * alpha;
  IterationTrace trace;
  trace.rows.reserve(std::min<std::size_t>(max_iter + 1, 1 << 20));
  double u = -sigma, x = beta, y = gamma;
  trace.rows.push_back({0, u, x, y});

  for (std::size_t step = 1; step <= max_iter; ++step) {
    const double det = u * u - x * x - y * y;
    if (std::abs(det) < 1e-14) {
      trace.verdict = McfVerdict::Diverged;
      trace.reason = DivergenceReason::Singular;
      return trace;
    }
    const double un = -sigma - a2 * u / det;
    const double xn = beta + a2 * x / det;
    const double yn = gamma - a2 * y / det;
    trace.rows.push_back({step, un, xn, yn});
    trace.steps = step;
    if (!std::isfinite(un) || !std::isfinite(xn) || !std::isfinite(yn) ||
        std::max({std::abs(un), std::abs(xn), std::abs(yn)}) > 1e12) {
      trace.verdict = McfVerdict::Diverged;
      trace.reason = DivergenceReason::Magnitude;
      return trace;
    }
    const double delta =
        std::max({std::abs(un - u), std::abs(xn - x), std::abs(yn - y)});
    u = un;
    x = xn;
    y = yn;
    if (delta < tol) {
      trace.verdict = McfVerdict::Converged;
      trace.limit = {u, x, y};
      return trace;
    }
  }
  trace.verdict = McfVerdict::MaxIterations;
  return trace;
}

// det F_1^{-1}(sigma) = u^2 - x^2 - y^2, a real number.  A tail breakdown at
// some inner index means sigma collides with an eigenvalue of a trailing
// block submatrix -- a removable event for the secular function -- so the
// evaluation is retried at a slightly jittered shift and flagged.
struct SecularValue {
  double value;
  bool jittered;
};

inline SecularValue secular_det(const BlockTridiagonal2& hb, double sigma) {
  double s = sigma;
  bool jittered = false;
  std::size_t last_index = 0;
  for (int attempt = 0; attempt < 4; ++attempt) {
    const McfTail tail = mcf_tail(hb, s);
    if (!tail.breakdown_index) return {tail.states[0].det(), jittered};
    last_index = *tail.breakdown_index;
    s = s * (1.0 + 1e-12) + 1e-12;
    jittered = true;
  }
  throw PoleError("secular evaluation keeps breaking down at tail index " +
                      std::to_string(last_index),
                  last_index);
}

// Gershgorin-style bound guaranteeing every singular value lies inside
// [0, sigma_max].
inline double default_sigma_max(const BlockTridiagonal2& hb) {
  double diag = 0.0;
  for (const Complex& d : hb.diag_offdiag()) diag = std::max(diag, std::abs(d));
  double coup = 0.0;
  for (double a : hb.coupling()) coup = std::max(coup, std::abs(a));
  return 1.25 * (diag + 2.0 * coup);
}

struct ScanOptions {
  double sigma_max = 0.0;  // 0 selects the default bound above
  std::size_t grid_points = 2048;
  double refine_tol = 1e-12;
  // Externally supplied expected root count (e.g. from the dense reference);
  // when set, a count disagreement is reported in the result.
  std::optional<std::size_t> expected_count;
};

struct ScanResult {
  std::vector<double> singular_values;  // ascending, within [0, sigma_max]
  std::vector<bool> jittered;           // per returned value
  // (found, expected) when expected_count was given and differs: either a
  // cluster merged below the resolution or the grid was too coarse.
  std::optional<std::pair<std::size_t, std::size_t>> count_mismatch;
};

namespace detail {

// Sign and log-magnitude of det(HB - sigma*I) = prod_k det F_k^{-1}(sigma),
// accumulated along the same (u,x,y) sweep that drives the tail.  Unlike the
// corner determinant alone, the product is a polynomial in sigma: the poles
// contributed by trailing submatrices cancel against the matching zeros, so
// every sign change on the real axis marks an eigenvalue of odd multiplicity.
// That matters for strongly localized spectra, where a trailing eigenvalue
// can shadow a true singular value to within far less than any grid step.
struct SecularSign {
  int sign;        // -1, 0, +1
  double log_abs;  // natural log of |det|, meaningful when sign != 0
  bool jittered;
};

inline SecularSign secular_log_det(const BlockTridiagonal2& hb, double sigma) {
  double s = sigma;
  bool jittered = false;
  std::size_t last_index = 0;
  for (int attempt = 0; attempt < 4; ++attempt) {
    const std::size_t n = hb.size();
    double u = -s;
    double x = hb.diag_offdiag()[n - 1].real();
    double y = hb.diag_offdiag()[n - 1].imag();
    int sign = 1;
    double log_abs = 0.0;
    bool broke = false;
    for (std::size_t k = n - 1; k-- > 0;) {
      const double det = u * u - x * x - y * y;
      const double scale = std::max(1.0, u * u + x * x + y * y);
      if (std::abs(det) < singularity_eps * scale) {
        last_index = k + 2;
        broke = true;
        break;
      }
      sign *= det > 0.0 ? 1 : det < 0.0 ? -1 : 0;
      log_abs += std::log(std::abs(det));
      const double a2 = hb.coupling()[k] * hb.coupling()[k];
      const Complex d = hb.diag_offdiag()[k];
      const double un = -s - a2 * u / det;
      const double xn = d.real() + a2 * x / det;
      const double yn = d.imag() - a2 * y / det;
      u = un;
      x = xn;
      y = yn;
    }
    if (!broke) {
      const double det = u * u - x * x - y * y;
      if (det == 0.0) return {0, 0.0, jittered};
      const int sign_final = sign * (det > 0.0 ? 1 : -1);
      return {sign_final, log_abs + std::log(std::abs(det)), jittered};
    }
    s = s * (1.0 + 1e-12) + 1e-12;
    jittered = true;
  }
  throw PoleError("determinant sweep keeps breaking down at tail index " +
                      std::to_string(last_index),
                  last_index);
}

struct ScanSample {
  double sigma;
  SecularSign value;
  bool valid;
};

}  // namespace detail

// Scans the partner determinant over [0, sigma_max], brackets sign changes,
// and refines each bracket by bisection to refine_tol.
inline ScanResult singular_values_scan(const BlockTridiagonal2& hb,
                                       const ScanOptions& options = {}) {
  if (options.grid_points < 2) throw ValidationError("grid_points must be at least 2");
  if (!(options.refine_tol > 0.0)) throw ValidationError("refine_tol must be positive");
  double sigma_max = options.sigma_max;
  if (sigma_max == 0.0) sigma_max = default_sigma_max(hb);
  if (!(sigma_max > 0.0) || !std::isfinite(sigma_max))
    throw ValidationError("sigma_max must be positive");

  const std::size_t g = options.grid_points;
  std::vector<detail::ScanSample> samples(g);
  for (std::size_t i = 0; i < g; ++i) {
    const double s = sigma_max * static_cast<double>(i) / static_cast<double>(g - 1);
    samples[i].sigma = s;
    try {
      samples[i].value = detail::secular_log_det(hb, s);
      samples[i].valid = true;
    } catch (const PoleError&) {
      samples[i].valid = false;
    }
  }

  struct Root {
    double sigma;
    bool jittered;
  };
  std::vector<Root> roots;

  for (std::size_t i = 0; i < g; ++i) {
    if (samples[i].valid && samples[i].value.sign == 0)
      roots.push_back({samples[i].sigma, samples[i].value.jittered});
  }

  for (std::size_t i = 0; i + 1 < g; ++i) {
    const detail::ScanSample& left = samples[i];
    const detail::ScanSample& right = samples[i + 1];
    if (!left.valid || !right.valid) continue;
    if (left.value.sign == 0 || right.value.sign == 0) continue;
    if (left.value.sign == right.value.sign) continue;

    double a = left.sigma, b = right.sigma;
    int sign_a = left.value.sign;
    bool jit = left.value.jittered || right.value.jittered;
    bool gave_up = false;
    bool exact_zero = false;
    double exact_at = 0.0;

    for (int it = 0; it < 200 && (b - a) > options.refine_tol; ++it) {
      const double mid = 0.5 * (a + b);
      detail::SecularSign fm{};
      try {
        fm = detail::secular_log_det(hb, mid);
      } catch (const PoleError&) {
        gave_up = true;
        break;
      }
      jit = jit || fm.jittered;
      if (fm.sign == 0) {
        exact_zero = true;
        exact_at = mid;
        break;
      }
      if (fm.sign == sign_a) {
        a = mid;
      } else {
        b = mid;
      }
    }
    if (gave_up) continue;
    roots.push_back({exact_zero ? exact_at : 0.5 * (a + b), jit});
  }

  std::sort(roots.begin(), roots.end(),
            [](const Root& r1, const Root& r2) { return r1.sigma < r2.sigma; });

  ScanResult result;
  const double dedup = 10.0 * options.refine_tol;
  std::size_t i = 0;
  while (i < roots.size()) {
    std::size_t j = i + 1;
    double sum = roots[i].sigma;
    bool jit = roots[i].jittered;
    while (j < roots.size() && roots[j].sigma - roots[j - 1].sigma < dedup) {
      sum += roots[j].sigma;
      jit = jit || roots[j].jittered;
      ++j;
    }
    result.singular_values.push_back(sum / static_cast<double>(j - i));
    result.jittered.push_back(jit);
    i = j;
  }

  if (options.expected_count &&
      *options.expected_count != result.singular_values.size()) {
    result.count_mismatch = {result.singular_values.size(), *options.expected_count};
  }
  return result;
}

// Block factors of HB - sigma*I with 2x2 blocks: unit upper factor with
// superdiagonal B_k F_{k+1}, block-diagonal middle factor F_k^{-1}, unit
// lower factor with subdiagonal F_{k+1} C_{k+1}.
struct McfFactors {
  double sigma;
  std::vector<DenseMatrix> f_inv;    // n blocks
  std::vector<DenseMatrix> u_super;  // n-1 blocks
  std::vector<DenseMatrix> l_sub;    // n-1 blocks
};

inline McfFactors mcf_factorize(const BlockTridiagonal2& hb, double sigma) {
  const McfTail tail = mcf_tail(hb, sigma);
  if (tail.breakdown_index) {
    throw PoleError("block factorization breakdown at tail index " +
                        std::to_string(*tail.breakdown_index),
                    *tail.breakdown_index);
  }
  const std::size_t n = hb.size();
  McfFactors fac{sigma, {}, {}, {}};
  fac.f_inv.reserve(n);
  for (std::size_t k = 0; k < n; ++k) fac.f_inv.push_back(tail.states[k].f_inverse());
  fac.u_super.reserve(n - 1);
  fac.l_sub.reserve(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const McfState& next = tail.states[k + 1];
    const double det = next.det();
    DenseMatrix f_next(2, 2);  // inverse of the (k+1) block
    f_next(0, 0) = Complex(next.u / det, 0.0);
    f_next(0, 1) = Complex(-next.x / det, -next.y / det);
    f_next(1, 0) = Complex(-next.x / det, next.y / det);
    f_next(1, 1) = Complex(next.u / det, 0.0);
    DenseMatrix exchange(2, 2);
    exchange(0, 1) = hb.coupling()[k];
    exchange(1, 0) = hb.coupling()[k];
    fac.u_super.push_back(exchange * f_next);
    fac.l_sub.push_back(f_next * exchange);
  }
  return fac;
}

namespace detail {

inline void place_block(DenseMatrix& dst, std::size_t bi, std::size_t bj,
                        const DenseMatrix& block) {
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) dst(2 * bi + i, 2 * bj + j) = block(i, j);
}

}  // namespace detail

inline DenseMatrix assemble_block_factor_u(const McfFactors& fac) {
  const std::size_t n = fac.f_inv.size();
  DenseMatrix m = DenseMatrix::identity(2 * n);
  for (std::size_t k = 0; k + 1 < n; ++k) detail::place_block(m, k, k + 1, fac.u_super[k]);
  return m;
}

inline DenseMatrix assemble_block_factor_f(const McfFactors& fac) {
  const std::size_t n = fac.f_inv.size();
  DenseMatrix m(2 * n, 2 * n);
  for (std::size_t k = 0; k < n; ++k) detail::place_block(m, k, k, fac.f_inv[k]);
  return m;
}

inline DenseMatrix assemble_block_factor_l(const McfFactors& fac) {
  const std::size_t n = fac.f_inv.size();
  DenseMatrix m = DenseMatrix::identity(2 * n);
  for (std::size_t k = 0; k + 1 < n; ++k) detail::place_block(m, k + 1, k, fac.l_sub[k]);
  return m;
}

}  // namespace tricfrac
