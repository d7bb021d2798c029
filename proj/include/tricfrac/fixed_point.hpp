#pragma once

// Closed-form fixed-point analysis of the homogeneous (u,x,y) map at unit
// coupling.  Candidate limits are the real roots of a quartic in u; each
// real root is completed to a full (u,x,y) triple through a relation linear
// in x and the proportionality gamma*u = -sigma*y, and classified by the
// spectral radius of the 3x3 Jacobian of the map at that point.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tricfrac/dense_matrix.hpp"
#include "tricfrac/detail/complex_eig.hpp"
#include "tricfrac/errors.hpp"
#include "tricfrac/matrix_cf.hpp"

namespace tricfrac {

// P(u) = c[4] u^4 + ... + c[0]; c[k] multiplies u^k.
struct QuarticPoly {
  std::array<double, 5> c;
};

inline QuarticPoly quartic_coeffs(double sigma, double beta, double gamma) {
  if (!std::isfinite(sigma) || !std::isfinite(beta) || !std::isfinite(gamma))
    throw ValidationError("parameters must be finite");
  if (!(sigma > 0.0))
    throw DomainError("sigma must be positive; degenerate shifts are handled by the reduced analysis");
  const double s2 = sigma * sigma;
  const double s3 = s2 * sigma;
  const double s4 = s2 * s2;
  const double s5 = s4 * sigma;
  const double g2 = gamma * gamma;
  const double b2 = beta * beta;
  QuarticPoly p;
  p.c[4] = -4.0 * s2 + 4.0 * g2;
  p.c[3] = -8.0 * s3 + 8.0 * sigma * g2;
  p.c[2] = s2 * b2 - 5.0 * s4 + 5.0 * g2 * s2 - 4.0 * s2;
  p.c[1] = s3 * b2 - 4.0 * s3 - s5 + g2 * s3;
  p.c[0] = -s4;
  return p;
}

namespace detail {

inline Complex poly_eval(const double* c, std::size_t degree, Complex z) {
  Complex v = c[degree];
  for (std::size_t k = degree; k-- > 0;) v = v * z + c[k];
  return v;
}

inline Complex poly_derivative_eval(const double* c, std::size_t degree, Complex z) {
  Complex v = static_cast<double>(degree) * c[degree];
  for (std::size_t k = degree - 1; k >= 1; --k) v = v * z + static_cast<double>(k) * c[k];
  return v;
}

}  // namespace detail

// Roots of the quartic (with multiplicity) through the companion-matrix
// eigenvalues, polished by two Newton steps.  Near-zero leading coefficients
// are trimmed so the degenerate degree-3 case is handled transparently.
inline std::vector<Complex> solve_quartic(const QuarticPoly& p) {
  double max_c = 0.0;
  for (double c : p.c) max_c = std::max(max_c, std::abs(c));
  if (max_c == 0.0) throw ValidationError("polynomial is identically zero");

  std::size_t degree = 4;
  while (degree > 0 && std::abs(p.c[degree]) <= 1e-13 * max_c) --degree;
  if (degree == 0) return {};

  DenseMatrix companion(degree, degree);
  for (std::size_t j = 0; j < degree; ++j)
    companion(0, j) = -p.c[degree - 1 - j] / p.c[degree];
  for (std::size_t i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  std::vector<Complex> roots = detail::hessenberg_eigenvalues(std::move(companion));

  for (Complex& r : roots) {
    for (int step = 0; step < 2; ++step) {
      const Complex val = detail::poly_eval(p.c.data(), degree, r);
      const Complex der = detail::poly_derivative_eval(p.c.data(), degree, r);
      if (std::abs(der) < 1e-20 * max_c) break;  // multiple root: leave as is
      r -= val / der;
    }
  }
  // order by real part, then by imaginary part inside clusters of equal real
  // part, so polished conjugate pairs stay adjacent and deterministic
  std::sort(roots.begin(), roots.end(),
            [](Complex a, Complex b) { return a.real() < b.real(); });
  for (std::size_t lo = 0; lo < roots.size();) {
    std::size_t hi = lo + 1;
    while (hi < roots.size() &&
           roots[hi].real() - roots[lo].real() <=
               1e-10 * std::max(1.0, std::abs(roots[lo].real())))
      ++hi;
    std::sort(roots.begin() + static_cast<std::ptrdiff_t>(lo),
              roots.begin() + static_cast<std::ptrdiff_t>(hi),
              [](Complex a, Complex b) { return a.imag() < b.imag(); });
    lo = hi;
  }
  for (const Complex& r : roots) {
    const double bound = 1e-10 * max_c * std::pow(std::max(1.0, std::abs(r)), 4);
    if (std::abs(detail::poly_eval(p.c.data(), degree, r)) > bound)
      throw NumericalError("quartic root residual exceeds its bound");
  }
  return roots;
}

// The homogeneous map at unit coupling.
inline Uxy mcf_map_apply(double sigma, double beta, double gamma, const Uxy& s) {
  const double det = s.u * s.u - s.x * s.x - s.y * s.y;
  if (det == 0.0) throw SingularityError("map evaluated at a vanishing determinant");
  return {-sigma - s.u / det, beta + s.x / det, gamma - s.y / det};
}

// Analytic Jacobian of (u,x,y) -> (-sigma - u/D, beta + x/D, gamma - y/D);
// the additive parameters drop out of the linearization.
inline std::array<std::array<double, 3>, 3> mcf_map_jacobian(const Uxy& s) {
  const double det = s.u * s.u - s.x * s.x - s.y * s.y;
  if (det == 0.0) throw SingularityError("Jacobian at a vanishing determinant");
  const double d2 = det * det;
  const double u = s.u, x = s.x, y = s.y;
  return {{{(2.0 * u * u - det) / d2, -2.0 * u * x / d2, -2.0 * u * y / d2},
           {-2.0 * u * x / d2, (det + 2.0 * x * x) / d2, 2.0 * x * y / d2},
           {2.0 * u * y / d2, -2.0 * x * y / d2, -(det + 2.0 * y * y) / d2}}};
}

inline double jacobian_radius(const Uxy& s) {
  const auto j = mcf_map_jacobian(s);
  DenseMatrix m(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < 3; ++k) m(i, k) = j[i][k];
  double radius = 0.0;
  for (const Complex& eig : detail::dense_eigenvalues(std::move(m)))
    radius = std::max(radius, std::abs(eig));
  return radius;
}

namespace detail {

inline bool is_fixed_point(double sigma, double beta, double gamma, const Uxy& s,
                           double tol) {
  const double det = s.u * s.u - s.x * s.x - s.y * s.y;
  if (det == 0.0) return false;
  const Uxy next = mcf_map_apply(sigma, beta, gamma, s);
  const double scale = std::max({1.0, std::abs(s.u), std::abs(s.x), std::abs(s.y)});
  return std::max({std::abs(next.u - s.u), std::abs(next.x - s.x),
                   std::abs(next.y - s.y)}) <= tol * scale;
}

}  // namespace detail

// Completes a real root u of the quartic to the full triple: x from the
// relation linear in x (valid for beta != 0), y from gamma*u = -sigma*y.
// For beta = 0 the linear relation degenerates; the x fixed-point equation
// then forces x = 0 or D = 1, and those branches are tried directly.
// The returned triple is verified to reproduce itself under the map.
inline Uxy complete_fixed_point(double sigma, double beta, double gamma, double u) {
  if (!std::isfinite(u)) throw ValidationError("u must be finite");
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  const double y = -gamma * u / sigma;
  const double s2 = sigma * sigma;
  const double s3 = s2 * sigma;
  const double s4 = s2 * s2;
  const double g2 = gamma * gamma;
  const double u2 = u * u;
  const double u3 = u2 * u;

  if (beta != 0.0) {
    const double numerator = 4.0 * u3 * s2 - 4.0 * u3 * g2 + 6.0 * s3 * u2 -
                             6.0 * u2 * g2 * sigma + 4.0 * u * s2 -
                             s2 * u * beta * beta + 2.0 * u * s4 -
                             2.0 * u * s2 * g2 + 2.0 * s3;
    const Uxy candidate{u, numerator / (beta * s3), y};
    if (!detail::is_fixed_point(sigma, beta, gamma, candidate, 1e-9))
      throw DomainError("completion of u is not a fixed point of the map");
    return candidate;
  }

  const Uxy plain{u, 0.0, y};
  if (detail::is_fixed_point(sigma, beta, gamma, plain, 1e-9)) return plain;
  const double x2 = u2 - y * y - 1.0;  // D = 1 branch
  if (x2 >= 0.0) {
    for (const double x : {std::sqrt(x2), -std::sqrt(x2)}) {
      const Uxy candidate{u, x, y};
      if (detail::is_fixed_point(sigma, beta, gamma, candidate, 1e-9)) return candidate;
    }
  }
  throw DomainError("no consistent completion for this root at beta = 0");
}

enum class FixedPointVerdict { Convergent, Divergent, Marginal };

inline const char* to_string(FixedPointVerdict v) {
  switch (v) {
    case FixedPointVerdict::Convergent: return "Convergent";
    case FixedPointVerdict::Divergent: return "Divergent";
    case FixedPointVerdict::Marginal: return "Marginal";
  }
  return "?";
}

struct CompletedFixedPoint {
  Uxy point;
  double radius;  // spectral radius of the Jacobian at the point
  bool stable;
};

struct FixedPointReport {
  double sigma, beta, gamma;
  std::vector<Complex> roots;                 // candidate u values
  std::vector<CompletedFixedPoint> completed;  // genuine fixed points only
  std::optional<Uxy> stable;
  FixedPointVerdict verdict = FixedPointVerdict::Divergent;
};

namespace detail {

inline void classify_report(FixedPointReport& rep) {
  constexpr double margin = 1e-10;
  bool marginal = false;
  std::size_t stable_count = 0;
  std::size_t stable_at = 0;
  for (std::size_t i = 0; i < rep.completed.size(); ++i) {
    if (std::abs(rep.completed[i].radius - 1.0) <= margin) marginal = true;
    if (rep.completed[i].radius < 1.0 - margin) {
      rep.completed[i].stable = true;
      ++stable_count;
      stable_at = i;
    }
  }
  if (marginal || stable_count > 1) {
    rep.verdict = FixedPointVerdict::Marginal;
    return;
  }
  if (stable_count == 1) {
    rep.verdict = FixedPointVerdict::Convergent;
    rep.stable = rep.completed[stable_at].point;
  } else {
    rep.verdict = FixedPointVerdict::Divergent;
  }
}

inline std::array<Complex, 2> quadratic_roots_monic(double b, double c) {
  // roots of t^2 + b t + c
  const Complex disc = std::sqrt(Complex(b * b - 4.0 * c, 0.0));
  return {0.5 * (-b + disc), 0.5 * (-b - disc)};
}

// With gamma = 0 the map preserves y = 0 and decouples in p = u + x,
// q = u - x into two scalar chains p' = (beta - sigma) - 1/p and
// q' = -(beta + sigma) - 1/q; the four fixed points are the root combos.
inline FixedPointReport analyze_gamma_zero(double sigma, double beta) {
  FixedPointReport rep{sigma, beta, 0.0, {}, {}, std::nullopt,
                       FixedPointVerdict::Divergent};
  const auto p_roots = quadratic_roots_monic(-(beta - sigma), 1.0);
  const auto q_roots = quadratic_roots_monic(beta + sigma, 1.0);
  for (const Complex& p : p_roots) {
    for (const Complex& q : q_roots) {
      const Complex uc = 0.5 * (p + q);
      const Complex xc = 0.5 * (p - q);
      rep.roots.push_back(uc);
      if (std::abs(p.imag()) > 1e-12 || std::abs(q.imag()) > 1e-12) continue;
      const Uxy candidate{uc.real(), xc.real(), 0.0};
      if (!is_fixed_point(sigma, beta, 0.0, candidate, 1e-9)) continue;
      rep.completed.push_back({candidate, jacobian_radius(candidate), false});
    }
  }
  std::sort(rep.roots.begin(), rep.roots.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  classify_report(rep);
  return rep;
}

}  // namespace detail

// Theory side only: quartic, real-root completion, Jacobian radii, verdict.
inline FixedPointReport analyze_fixed_points(double sigma, double beta, double gamma) {
  if (!std::isfinite(sigma) || !std::isfinite(beta) || !std::isfinite(gamma))
    throw ValidationError("parameters must be finite");
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  if (gamma == 0.0) return detail::analyze_gamma_zero(sigma, beta);

  FixedPointReport rep{sigma, beta, gamma, {}, {}, std::nullopt,
                       FixedPointVerdict::Divergent};
  rep.roots = solve_quartic(quartic_coeffs(sigma, beta, gamma));
  for (const Complex& r : rep.roots) {
    if (std::abs(r.imag()) > 1e-8 * std::max(1.0, std::abs(r))) continue;
    Uxy point{};
    try {
      point = complete_fixed_point(sigma, beta, gamma, r.real());
    } catch (const DomainError&) {
      continue;  // spurious root of the eliminated system
    }
    rep.completed.push_back({point, jacobian_radius(point), false});
  }
  detail::classify_report(rep);
  return rep;
}

// Full pipeline plus a consistency check against the actual iteration:
// a Convergent verdict must be reproduced by the trace settling on the
// stable triple, a Divergent verdict by the trace failing to settle.
inline FixedPointReport convergence_verdict(double sigma, double beta, double gamma) {
  FixedPointReport rep = analyze_fixed_points(sigma, beta, gamma);
  const IterationTrace trace =
      mcf_iterate_homogeneous(1.0, beta, gamma, sigma, 10000, 1e-12);

  if (rep.verdict == FixedPointVerdict::Convergent) {
    bool ok = trace.verdict == McfVerdict::Converged;
    if (ok) {
      const Uxy& s = *rep.stable;
      ok = std::max({std::abs(trace.limit.u - s.u), std::abs(trace.limit.x - s.x),
                     std::abs(trace.limit.y - s.y)}) <= 1e-8;
    }
    if (!ok) {
      std::ostringstream msg;
      msg << "theory says Convergent but the iteration did not settle on the "
             "stable triple (iteration verdict "
          << static_cast<int>(trace.verdict) << ")";
      throw ConsistencyError(msg.str());
    }
  } else if (rep.verdict == FixedPointVerdict::Divergent) {
    if (trace.verdict == McfVerdict::Converged) {
      std::ostringstream msg;
      msg << "theory says Divergent but the iteration converged to (" << trace.limit.u
          << ", " << trace.limit.x << ", " << trace.limit.y << ")";
      throw ConsistencyError(msg.str());
    }
  }
  return rep;
}

}  // namespace tricfrac
