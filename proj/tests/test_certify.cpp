#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "expfact/error.hpp"
#include "expfact/general.hpp"
#include "support.hpp"

using namespace expfact;
using testsup::Rng;

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

TEST_CASE("certificates recompute from the stored factors") {
  auto pt = SampleSpace::finite_points(2);
  MatrixOverAlgebra id = MatrixOverAlgebra::identity(3, pt);
  MatrixOverAlgebra zero(3, pt);
  FactorizationCertificate cert = verify_factorization(id, {zero}, 1e-10);
  CHECK(cert.reconstruction_residual == 0.0);
  CHECK(cert.all_verified);
  CHECK(cert.factor_count == 1);

  // corrupting one entry of a factor is caught by recomputation
  Rng rng(3);
  auto iv = SampleSpace::interval_path(65);
  MatrixOverAlgebra a = testsup::random_prod_one_triangular(rng, 3, iv, 2, 0.3);
  TriangularFactorization tf = two_exp_triangular(a, 0.25);
  MatrixOverAlgebra corrupted = tf.b2;
  corrupted.set(0, 1,
                corrupted.at(0, 1) + AlgebraElement::constant(iv, Complex(0.1, 0)));
  FactorizationCertificate bad =
      verify_factorization(a, {tf.b1, corrupted}, 1e-7, tf.certificate.claims);
  CHECK(bad.reconstruction_residual > 1e-3);
  CHECK(!bad.all_verified);

  // re-verification of intact factors reproduces the pipeline's certificate
  FactorizationCertificate again =
      verify_factorization(a, {tf.b1, tf.b2}, 1e-7, tf.certificate.claims);
  CHECK(std::abs(again.reconstruction_residual -
                 tf.certificate.reconstruction_residual) <= 1e-12);
  CHECK(again.all_verified == tf.certificate.all_verified);
  for (std::size_t i = 0; i < again.claims.size(); ++i) {
    CHECK(again.claims[i].verified == tf.certificate.claims[i].verified);
    CHECK(std::abs(again.claims[i].margin - tf.certificate.claims[i].margin) <= 1e-12);
  }
}

TEST_CASE("obstruction instance endpoints") {
  auto iv = SampleSpace::interval_path(257);
  MatrixOverAlgebra t = build_t_counterexample(iv);

  DenseMatrix want(2, 2);
  want << 1, 1, 0, 1;
  CHECK((t.eval(0) - want).norm() < 1e-12);    // g(0) = 1
  CHECK((t.eval(256) - want).norm() < 1e-12);  // g(1) = e^{2 pi i} = 1

  // its spectrum traces the unit circle plus the constant eigenvalue 1
  Spectrum s = spectrum(t);
  for (const auto& p : s.points) CHECK(std::abs(std::abs(p.value) - 1.0) < 1e-12);

  CHECK_THROWS_AS(build_t_counterexample(SampleSpace::interval_path(32)), Error);
  CHECK_THROWS_AS(build_t_counterexample(SampleSpace::circle_path(64)), Error);
}

TEST_CASE("no logarithm exists for the obstruction instance") {
  auto iv = SampleSpace::interval_path(257);
  MatrixOverAlgebra t = build_t_counterexample(iv);
  try {
    direct_log(t);
    FAIL("direct_log should not succeed on the obstruction instance");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotInSigmaN);
  }
}

TEST_CASE("block extension to higher dimensions") {
  auto iv = SampleSpace::interval_path(257);
  MatrixOverAlgebra t3 = build_tn(iv, 3);
  REQUIRE(t3.dim() == 3);
  CHECK(std::abs(t3.at(0, 0).value(0) - Complex(2, 0)) < 1e-12);  // M = 1 + max|g| = 2

  // the separation device: T - M I stays invertible with margin
  MatrixOverAlgebra t = build_t_counterexample(iv);
  double min_sv = 1e300;
  for (std::size_t s = 0; s < iv->size(); ++s) {
    DenseMatrix d = t.eval(s) - 2.0 * DenseMatrix::Identity(2, 2);
    Eigen::JacobiSVD<DenseMatrix> svd(d);
    min_sv = std::min(min_sv, svd.singularValues().minCoeff());
  }
  CHECK(min_sv > 0.2);

  try {
    direct_log(t3);
    FAIL("direct_log should not succeed on the extended instance");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotInSigmaN);
  }

  CHECK_THROWS_AS(build_tn(iv, 2), Error);
}

TEST_CASE("square-root case analysis finds all four contradictions") {
  auto iv = SampleSpace::interval_path(257);
  MatrixOverAlgebra t = build_t_counterexample(iv);
  ObstructionReport rep = verify_t_obstruction(t);
  CHECK(rep.no_continuous_sqrt);
  for (const auto& c : rep.cases) CHECK(c.magnitude <= 1e-12);

  // opposite signs cancel at the left endpoint, equal signs at the right
  for (const auto& c : rep.cases) {
    if (c.sign_half * c.sign_unit < 0) CHECK(c.sample == 0);
    else CHECK(c.sample == 256);
  }
}

TEST_CASE("the obstruction instance still factors into two exponentials") {
  auto iv = SampleSpace::interval_path(257);
  MatrixOverAlgebra t = build_t_counterexample(iv);
  GeneralFactorization f = factorize_two_exp(t, 0.25, {});
  CHECK(f.certificate.reconstruction_residual <= 1e-7);
  CHECK(f.certificate.all_verified);
  CHECK(f.certificate.continuity_jump <= 10.0 * continuity_report(t) + 1e-6);

  MatrixOverAlgebra t3 = build_tn(iv, 3);
  GeneralFactorization f3 = factorize_two_exp(t3, 0.25, {});
  CHECK(f3.certificate.reconstruction_residual <= 1e-7);
  CHECK(f3.certificate.continuity_jump <= 10.0 * continuity_report(t3) + 1e-6);
}

TEST_CASE("continuity report") {
  auto iv = SampleSpace::interval_path(257);
  MatrixOverAlgebra constant = MatrixOverAlgebra::identity(2, iv);
  CHECK(continuity_report(constant) == 0.0);

  std::vector<Complex> g(257);
  for (std::size_t j = 0; j < 257; ++j)
    g[j] = std::exp(Complex(0, kTwoPi * iv->coordinate(j).real()));
  MatrixOverAlgebra gm(1, iv);
  gm.set(0, 0, AlgebraElement(iv, g));
  const double jump = continuity_report(gm);
  CHECK(jump <= 0.025);
  CHECK(jump >= 0.02);

  // a raw principal log of g jumps by ~2*pi where the phase wraps
  std::vector<Complex> raw(257);
  for (std::size_t j = 0; j < 257; ++j) raw[j] = std::log(g[j]);
  MatrixOverAlgebra lm(1, iv);
  lm.set(0, 0, AlgebraElement(iv, raw));
  CHECK(continuity_report(lm) > 6.0);

  auto pt = SampleSpace::finite_points(3);
  CHECK_THROWS_AS(continuity_report(MatrixOverAlgebra::identity(2, pt)), Error);
}
