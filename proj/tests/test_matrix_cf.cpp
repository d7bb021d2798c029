#include <catch2/catch.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "support/test_rng.hpp"
#include "tricfrac/matrix_cf.hpp"
#include "tricfrac/oracle.hpp"

using namespace tricfrac;

namespace {

BlockTridiagonal2 homogeneous_block(std::size_t n, double alpha, double beta, double gamma) {
  return build_block_tridiagonal(ComplexTridiagonal(std::vector<double>(n - 1, alpha),
                                                    std::vector<double>(n, beta),
                                                    std::vector<double>(n, gamma)));
}

ComplexTridiagonal random_tridiagonal(testsupport::Rng& rng, std::size_t n, double bound) {
  return ComplexTridiagonal(rng.vector(n - 1, -bound, bound), rng.vector(n, -bound, bound),
                            rng.vector(n, -bound, bound));
}

// Doubles the grid until the root count matches the expectation; near band
// edges the trailing-spectrum poles interlace the roots more tightly than
// the default grid resolves, and the count channel reports exactly that.
ScanResult scan_until_count(const BlockTridiagonal2& hb, std::size_t expected) {
  ScanOptions opt;
  opt.expected_count = expected;
  ScanResult res;
  for (std::size_t grid = 2048; grid <= (1u << 20); grid *= 4) {
    opt.grid_points = grid;
    res = singular_values_scan(hb, opt);
    if (!res.count_mismatch) return res;
  }
  return res;
}

// The quadruplet form of the block recurrence, kept only in test code to
// confirm that u and v never separate.
struct Uvxy {
  double u, v, x, y;
};

Uvxy step_quadruplet(const Uvxy& s, double alpha, double beta, double gamma, double sigma) {
  const double det = s.u * s.v - s.x * s.x - s.y * s.y;
  const double a2 = alpha * alpha;
  return {-sigma - a2 * s.u / det, -sigma - a2 * s.v / det, beta + a2 * s.x / det,
          gamma - a2 * s.y / det};
}

}  // namespace

TEST_CASE("single-block tail is the shifted block itself") {
  const McfTail tail = mcf_tail(homogeneous_block(1, 1.0, 4.0, 0.5), 1.0);
  REQUIRE_FALSE(tail.breakdown_index.has_value());
  CHECK(tail.states[0].u == -1.0);
  CHECK(tail.states[0].x == 4.0);
  CHECK(tail.states[0].y == 0.5);
}

TEST_CASE("two-block tail reproduces the first hand-computed step") {
  const McfTail tail = mcf_tail(homogeneous_block(2, 1.0, 4.0, 0.5), 1.0);
  REQUIRE_FALSE(tail.breakdown_index.has_value());
  CHECK(tail.states[0].u == Approx(-65.0 / 61.0).epsilon(1e-15));
  CHECK(tail.states[0].x == Approx(228.0 / 61.0).epsilon(1e-15));
  CHECK(tail.states[0].y == Approx(32.5 / 61.0).epsilon(1e-15));
}

TEST_CASE("first tail block equals the corner of the dense shifted inverse") {
  const BlockTridiagonal2 hb = homogeneous_block(40, 1.0, 4.0, 0.5);
  const double sigma = 1.0;
  const McfTail tail = mcf_tail(hb, sigma);
  REQUIRE_FALSE(tail.breakdown_index.has_value());

  DenseMatrix shifted = assemble_dense(hb);
  for (std::size_t i = 0; i < shifted.rows(); ++i) shifted(i, i) -= sigma;
  const DenseMatrix inv = oracle::dense_inverse(shifted);

  // invert the leading 2x2 block of the inverse: that is exactly F_1^{-1}
  DenseMatrix corner(2, 2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) corner(i, j) = inv(i, j);
  const DenseMatrix f1_inv = oracle::dense_inverse(corner);

  const DenseMatrix state = tail.states[0].f_inverse();
  CHECK(max_abs_diff(state, f1_inv) < 1e-10 * std::max(1.0, f1_inv.max_abs()));
}

TEST_CASE("tail states satisfy the block recurrence") {
  testsupport::Rng rng(15923);
  const ComplexTridiagonal h = random_tridiagonal(rng, 12, 3.0);
  const BlockTridiagonal2 hb = build_block_tridiagonal(h);
  const double sigma = 0.77;
  const McfTail tail = mcf_tail(hb, sigma);
  REQUIRE_FALSE(tail.breakdown_index.has_value());
  const std::size_t n = hb.size();
  for (std::size_t k = 0; k < n; ++k) {
    DenseMatrix rhs(2, 2);
    rhs(0, 1) = hb.diag_offdiag()[k];
    rhs(1, 0) = std::conj(hb.diag_offdiag()[k]);
    rhs(0, 0) = -sigma;
    rhs(1, 1) = -sigma;
    if (k + 1 < n) {
      DenseMatrix exchange(2, 2);
      exchange(0, 1) = hb.coupling()[k];
      exchange(1, 0) = hb.coupling()[k];
      const DenseMatrix f_next = oracle::dense_inverse(tail.states[k + 1].f_inverse());
      rhs = rhs - exchange * f_next * exchange;
    }
    CHECK(max_abs_diff(tail.states[k].f_inverse(), rhs) <
          1e-11 * std::max(1.0, rhs.max_abs()));
  }
}

TEST_CASE("assembled tail blocks are hermitian with equal diagonal") {
  const McfTail tail = mcf_tail(homogeneous_block(6, 1.0, 2.5, -0.75), 0.4);
  for (const McfState& s : tail.states) {
    const DenseMatrix m = s.f_inverse();
    CHECK(m.hermiticity_defect() == 0.0);
    CHECK(m(0, 0) == m(1, 1));
  }
}

TEST_CASE("homogeneous iteration reproduces the tabulated run") {
  // printed ten-digit reference values for alpha=sigma=1, beta=4, gamma=1/2
  const double table[11][3] = {
      {-1.000000000, 4.000000000, 0.5000000000}, {-1.065573770, 3.737704918, 0.5327868852},
      {-1.081224617, 3.715089035, 0.5406123086}, {-1.083653085, 3.712567903, 0.5418265425},
      {-1.083988278, 3.712258295, 0.5419941392}, {-1.084032778, 3.712218864, 0.5420163892},
      {-1.084038607, 3.712213775, 0.5420193033}, {-1.084039366, 3.712213115, 0.5420196832},
      {-1.084039465, 3.712213029, 0.5420197326}, {-1.084039478, 3.712213018, 0.5420197391},
      {-1.084039480, 3.712213017, 0.5420197399}};
  const IterationTrace trace = mcf_iterate_homogeneous(1.0, 4.0, 0.5, 1.0, 10, 1e-15);
  REQUIRE(trace.rows.size() == 11);
  for (std::size_t r = 0; r < 11; ++r) {
    CHECK(trace.rows[r].u == Approx(table[r][0]).margin(1e-9));
    CHECK(trace.rows[r].x == Approx(table[r][1]).margin(1e-9));
    CHECK(trace.rows[r].y == Approx(table[r][2]).margin(1e-9));
  }
}

TEST_CASE("iteration does not settle for the oscillatory parameter choice") {
  const IterationTrace trace = mcf_iterate_homogeneous(1.0, 2.0, 0.5, 1.0, 10000, 1e-12);
  CHECK(trace.verdict != McfVerdict::Converged);
}

TEST_CASE("gamma zero keeps y at exactly zero") {
  const IterationTrace trace = mcf_iterate_homogeneous(1.0, 4.0, 0.0, 1.0, 50, 1e-13);
  for (const McfIterationRow& row : trace.rows) CHECK(row.y == 0.0);
}

TEST_CASE("reduced triplet equals the quadruplet with u = v") {
  testsupport::Rng rng(77401);
  for (int trial = 0; trial < 5; ++trial) {
    const double alpha = rng.uniform(0.5, 2.0);
    const double beta = rng.uniform(-4.0, 4.0);
    const double gamma = rng.uniform(-2.0, 2.0);
    const double sigma = rng.uniform(0.2, 2.5);
    Uvxy quad{-sigma, -sigma, beta, gamma};
    const IterationTrace trace = mcf_iterate_homogeneous(alpha, beta, gamma, sigma, 100, 1e-300);
    for (std::size_t step = 1; step < trace.rows.size(); ++step) {
      quad = step_quadruplet(quad, alpha, beta, gamma, sigma);
      REQUIRE(quad.u == quad.v);  // identical update expressions, bit for bit
      CHECK(std::abs(trace.rows[step].u - quad.u) <= 1e-13 * std::max(1.0, std::abs(quad.u)));
      CHECK(std::abs(trace.rows[step].x - quad.x) <= 1e-13 * std::max(1.0, std::abs(quad.x)));
      CHECK(std::abs(trace.rows[step].y - quad.y) <= 1e-13 * std::max(1.0, std::abs(quad.y)));
      if (trace.verdict != McfVerdict::MaxIterations && step == trace.rows.size() - 1) break;
    }
  }
}

TEST_CASE("gamma*u + sigma*y vanishes along homogeneous traces") {
  testsupport::Rng rng(98611);
  for (int trial = 0; trial < 10; ++trial) {
    const double beta = rng.uniform(-5.0, 5.0);
    const double gamma = rng.uniform(-2.0, 2.0);
    const double sigma = rng.uniform(0.2, 3.0);
    const IterationTrace trace = mcf_iterate_homogeneous(1.0, beta, gamma, sigma, 200, 1e-300);
    for (const McfIterationRow& row : trace.rows) {
      const double residual = std::abs(gamma * row.u + sigma * row.y);
      CHECK(residual <= 1e-11 * std::max(1.0, std::abs(sigma * row.y)));
    }
  }
}

TEST_CASE("secular determinant of a single block") {
  const BlockTridiagonal2 hb = homogeneous_block(1, 1.0, 4.0, 0.5);
  for (double sigma : {0.0, 1.0, 3.5, 4.0311288741492746}) {
    const SecularValue v = secular_det(hb, sigma);
    CHECK_FALSE(v.jittered);
    CHECK(v.value == Approx(sigma * sigma - 16.25).margin(1e-12));
  }
  CHECK(secular_det(hb, 0.0).value == Approx(-16.25));
}

TEST_CASE("secular values are real by construction and the scan finds the 1x1 root") {
  const BlockTridiagonal2 hb = homogeneous_block(1, 1.0, 4.0, 0.5);
  ScanOptions opt;
  opt.sigma_max = 10.0;
  const ScanResult res = singular_values_scan(hb, opt);
  REQUIRE(res.singular_values.size() == 1);
  CHECK(res.singular_values[0] == Approx(std::sqrt(16.25)).margin(1e-9));
}

TEST_CASE("degenerate pair produces an undercount warning") {
  // the two singular values of the exchange matrix coincide: the secular
  // determinant touches zero without a sign change
  const BlockTridiagonal2 hb = homogeneous_block(2, 1.0, 0.0, 0.0);
  ScanOptions opt;
  opt.expected_count = 2;
  const ScanResult res = singular_values_scan(hb, opt);
  CHECK(res.singular_values.size() < 2);
  REQUIRE(res.count_mismatch.has_value());
  CHECK(res.count_mismatch->second == 2);
}

TEST_CASE("scan matches the dense reference on the tabulated model") {
  const std::size_t n = 30;
  const ComplexTridiagonal h(std::vector<double>(n - 1, 1.0), std::vector<double>(n, 4.0),
                             std::vector<double>(n, 0.5));
  const std::vector<double> reference = oracle::svd_values(h);
  const ScanResult res = scan_until_count(build_block_tridiagonal(h), reference.size());
  REQUIRE_FALSE(res.count_mismatch.has_value());
  REQUIRE(res.singular_values.size() == reference.size());
  for (std::size_t i = 0; i < reference.size(); ++i)
    CHECK(res.singular_values[i] == Approx(reference[i]).margin(1e-8));
}

TEST_CASE("scan does not report poles of the corner determinant as roots") {
  testsupport::Rng rng(26310);
  const ComplexTridiagonal h = random_tridiagonal(rng, 10, 3.0);
  const std::vector<double> reference = oracle::svd_values(h);
  const ScanResult res = scan_until_count(build_block_tridiagonal(h), reference.size());
  REQUIRE_FALSE(res.count_mismatch.has_value());
  for (std::size_t i = 0; i < reference.size(); ++i)
    CHECK(res.singular_values[i] == Approx(reference[i]).margin(1e-8 * std::max(1.0, reference[i])));
}

TEST_CASE("default sigma bound brackets the whole spectrum") {
  testsupport::Rng rng(44870);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t n = rng.index(2, 20);
    const ComplexTridiagonal h = random_tridiagonal(rng, n, 8.0);
    const double bound = default_sigma_max(build_block_tridiagonal(h));
    const std::vector<double> reference = oracle::svd_values(h);
    CHECK(reference.back() < bound);
  }
}

TEST_CASE("single-block factorization is trivial") {
  const McfFactors fac = mcf_factorize(homogeneous_block(1, 1.0, 4.0, 0.5), 1.0);
  REQUIRE(fac.f_inv.size() == 1);
  CHECK(fac.u_super.empty());
  CHECK(fac.f_inv[0](0, 0) == Complex(-1.0, 0.0));
  CHECK(fac.f_inv[0](0, 1) == Complex(4.0, 0.5));
}

TEST_CASE("block factors rebuild the shifted partner") {
  testsupport::Rng rng(35520);
  const ComplexTridiagonal h = random_tridiagonal(rng, 3, 2.0);
  const BlockTridiagonal2 hb = build_block_tridiagonal(h);
  const double sigma = 0.31;
  const McfFactors fac = mcf_factorize(hb, sigma);
  const DenseMatrix product = assemble_block_factor_u(fac) * assemble_block_factor_f(fac) *
                              assemble_block_factor_l(fac);
  DenseMatrix shifted = assemble_dense(hb);
  for (std::size_t i = 0; i < shifted.rows(); ++i) shifted(i, i) -= sigma;
  CHECK(max_abs_diff(product, shifted) < 1e-10 * std::max(1.0, shifted.max_abs()));
}

TEST_CASE("factorization at a singular value keeps the identity with a tiny corner") {
  testsupport::Rng rng(62180);
  const ComplexTridiagonal h = random_tridiagonal(rng, 6, 2.0);
  const BlockTridiagonal2 hb = build_block_tridiagonal(h);
  const double sigma = oracle::svd_values(h)[2];
  const McfFactors fac = mcf_factorize(hb, sigma);
  const double corner_det = std::abs(secular_det(hb, sigma).value);
  CHECK(corner_det < 1e-6 * std::max(1.0, assemble_dense(hb).max_abs()));
  const DenseMatrix product = assemble_block_factor_u(fac) * assemble_block_factor_f(fac) *
                              assemble_block_factor_l(fac);
  DenseMatrix shifted = assemble_dense(hb);
  for (std::size_t i = 0; i < shifted.rows(); ++i) shifted(i, i) -= sigma;
  CHECK(max_abs_diff(product, shifted) < 1e-10 * std::max(1.0, shifted.max_abs()));
}

TEST_CASE("hermitian limit: scan returns the magnitudes of the real spectrum") {
  testsupport::Rng rng(70233);
  const std::size_t n = 12;
  const std::vector<double> off = rng.vector(n - 1, -2.0, 2.0);
  const std::vector<double> diag = rng.vector(n, -3.0, 3.0);
  const ComplexTridiagonal h(off, diag, std::vector<double>(n, 0.0));

  std::vector<double> expected;
  for (double lambda : oracle::eig_hermitian(assemble_dense(h)))
    expected.push_back(std::abs(lambda));
  std::sort(expected.begin(), expected.end());

  const ScanResult res = scan_until_count(build_block_tridiagonal(h), expected.size());
  REQUIRE_FALSE(res.count_mismatch.has_value());
  for (std::size_t i = 0; i < expected.size(); ++i)
    CHECK(res.singular_values[i] == Approx(expected[i]).margin(1e-9));
}

TEST_CASE("tail depth stability where the iteration accumulates") {
  // truncation depth stops mattering once the backward recurrence has
  // settled: the corner state and the corner determinant agree between
  // depths 100 and 200 far below the working tolerance
  const BlockTridiagonal2 h100 = homogeneous_block(100, 1.0, 4.0, 0.5);
  const BlockTridiagonal2 h200 = homogeneous_block(200, 1.0, 4.0, 0.5);
  for (double sigma : {0.25, 0.5, 1.0, 1.5}) {
    const McfTail t100 = mcf_tail(h100, sigma);
    const McfTail t200 = mcf_tail(h200, sigma);
    REQUIRE_FALSE(t100.breakdown_index.has_value());
    REQUIRE_FALSE(t200.breakdown_index.has_value());
    CHECK(std::abs(t100.states[0].u - t200.states[0].u) <= 1e-8);
    CHECK(std::abs(t100.states[0].x - t200.states[0].x) <= 1e-8);
    CHECK(std::abs(t100.states[0].y - t200.states[0].y) <= 1e-8);
    CHECK(std::abs(secular_det(h100, sigma).value - secular_det(h200, sigma).value) <= 1e-8);
  }
}

TEST_CASE("scan rejects bad options") {
  const BlockTridiagonal2 hb = homogeneous_block(2, 1.0, 1.0, 0.0);
  ScanOptions opt;
  opt.grid_points = 1;
  CHECK_THROWS_AS(singular_values_scan(hb, opt), ValidationError);
  opt = ScanOptions{};
  opt.refine_tol = 0.0;
  CHECK_THROWS_AS(singular_values_scan(hb, opt), ValidationError);
}
