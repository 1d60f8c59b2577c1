#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "expfact/dense.hpp"
#include "expfact/error.hpp"
#include "expfact/matfunc.hpp"
#include "support.hpp"

using namespace expfact;
using testsup::Rng;

namespace {
constexpr double kPi = 3.14159265358979323846;

Spectrum cloud(std::initializer_list<Complex> pts, double rho) {
  Spectrum s;
  s.matrix_dim = 1;
  s.resolution = rho;
  std::size_t i = 0;
  for (const Complex& p : pts) s.points.push_back({p, i++, 1});
  return s;
}
}  // namespace

TEST_CASE("matrix exponential basics") {
  auto pt = SampleSpace::finite_points(1);
  MatrixOverAlgebra zero(3, pt);
  CHECK(max_residual(mat_exp(zero), MatrixOverAlgebra::identity(3, pt)) < 1e-15);

  DenseMatrix nil(2, 2);
  nil << 0, 1, 0, 0;
  DenseMatrix want(2, 2);
  want << 1, 1, 0, 1;
  MatrixOverAlgebra e = mat_exp(MatrixOverAlgebra::from_constant(nil, pt));
  CHECK((e.eval(0) - want).norm() < 1e-15);
}

TEST_CASE("exponential against the eigendecomposition oracle") {
  Rng rng(21);
  auto pt = SampleSpace::finite_points(1);
  for (int trial = 0; trial < 40; ++trial) {
    // build a diagonalizable matrix with a known eigensystem
    DenseMatrix v = testsup::random_dense(rng, 4, 1.0) + 4.0 * DenseMatrix::Identity(4, 4);
    Eigen::VectorXcd lam(4);
    for (int i = 0; i < 4; ++i) lam(i) = rng.box(1.5);
    DenseMatrix b = v * lam.asDiagonal() * v.inverse();
    DenseMatrix oracle = v * lam.array().exp().matrix().asDiagonal() * v.inverse();
    MatrixOverAlgebra bm = MatrixOverAlgebra::from_constant(b, pt);
    CHECK((mat_exp(bm).eval(0) - oracle).operatorNorm() < 1e-10 * oracle.operatorNorm());
  }
}

TEST_CASE("determinant of the exponential equals exp of the trace") {
  Rng rng(22);
  auto iv = SampleSpace::interval_path(17);
  for (int trial = 0; trial < 10; ++trial) {
    MatrixOverAlgebra b = testsup::random_poly_matrix(rng, 3, iv, 2, 0.8);
    MatrixOverAlgebra e = mat_exp(b);
    for (std::size_t s = 0; s < iv->size(); ++s) {
      const Complex det = e.eval(s).determinant();
      const Complex tr = b.eval(s).trace();
      CHECK(std::abs(det - std::exp(tr)) <= 1e-9 * std::abs(std::exp(tr)) + 1e-9);
    }
  }
}

TEST_CASE("branch ray selection") {
  // all mass on the positive real axis: the opposite ray has maximal angular
  // clearance among the tied euclidean optima
  CHECK(choose_branch_angle(cloud({Complex(2, 0), Complex(3, 0)}, 0.1)) ==
        doctest::Approx(kPi));

  Spectrum s4;
  s4.matrix_dim = 4;
  s4.resolution = 0.1;
  std::size_t i = 0;
  for (const Complex& r : roots_of_unity(4)) s4.points.push_back({r, i++, 1});
  CHECK(std::abs(choose_branch_angle(s4) - kPi / 4.0) <= kPi / 180.0);

  Spectrum circle;
  circle.matrix_dim = 1;
  circle.resolution = 0.2;
  for (std::size_t j = 0; j < 64; ++j)
    circle.points.push_back({std::polar(1.0, 2.0 * kPi * double(j) / 64.0), j, 1});
  CHECK_THROWS_AS(choose_branch_angle(circle), Error);
}

TEST_CASE("branch logarithm") {
  auto pt = SampleSpace::finite_points(1);
  MatrixOverAlgebra id = MatrixOverAlgebra::identity(3, pt);
  CHECK(mat_log_branch(id, kPi).max_abs_entry() < 1e-14);

  DenseMatrix d(2, 2);
  d << std::exp(1.0), 0, 0, std::exp(2.0);
  MatrixOverAlgebra lg = mat_log_branch(MatrixOverAlgebra::from_constant(d, pt), kPi);
  CHECK(std::abs(lg.at(0, 0).value(0) - Complex(1, 0)) < 1e-12);
  CHECK(std::abs(lg.at(1, 1).value(0) - Complex(2, 0)) < 1e-12);

  // the cycle: log with a cut between the eigenvalue rays round-trips
  MatrixOverAlgebra r4 = MatrixOverAlgebra::from_constant(
      (DenseMatrix(4, 4) << 0, 0, 0, 1, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0).finished(), pt);
  const double theta = choose_branch_angle(spectrum(r4));
  MatrixOverAlgebra lr4 = mat_log_branch(r4, theta);
  CHECK(max_residual(mat_exp(lr4), r4) < 1e-10);

  // an eigenvalue on the cut is rejected
  DenseMatrix neg(1, 1);
  neg << -1;
  CHECK_THROWS_AS(mat_log_branch(MatrixOverAlgebra::from_constant(neg, pt), kPi), Error);
}

TEST_CASE("direct logarithm pipeline") {
  Rng rng(31);
  auto iv = SampleSpace::interval_path(33);
  for (int trial = 0; trial < 8; ++trial) {
    MatrixOverAlgebra b = testsup::random_poly_matrix(rng, 3, iv, 2, 0.4);
    MatrixOverAlgebra a = mat_exp(b);
    DirectLogResult r = direct_log(a);
    CHECK(max_residual(mat_exp(r.log), a) <= 1e-8);
  }

  auto pt = SampleSpace::finite_points(1);
  MatrixOverAlgebra two = mat_scale(MatrixOverAlgebra::identity(3, pt), Complex(2, 0));
  DirectLogResult r = direct_log(two);
  CHECK(std::abs(r.log.at(0, 0).value(0) - Complex(std::log(2.0), 0)) < 1e-12);
}

TEST_CASE("unipotent logarithm series") {
  auto pt = SampleSpace::finite_points(1);
  CHECK(log_unipotent(MatrixOverAlgebra::identity(3, pt)).max_abs_entry() < 1e-15);

  DenseMatrix u(2, 2);
  u << 1, 1, 0, 1;
  MatrixOverAlgebra lu = log_unipotent(MatrixOverAlgebra::from_constant(u, pt));
  CHECK(std::abs(lu.at(0, 1).value(0) - Complex(1, 0)) < 1e-15);
  CHECK(std::abs(lu.at(0, 0).value(0)) < 1e-15);

  DenseMatrix u3(3, 3);
  u3 << 1, 2, 3, 0, 1, 4, 0, 0, 1;
  MatrixOverAlgebra m3 = MatrixOverAlgebra::from_constant(u3, pt);
  CHECK(max_residual(mat_exp(log_unipotent(m3)), m3) <= 1e-12);

  DenseMatrix notu(2, 2);
  notu << 2, 0, 0, 1;
  CHECK_THROWS_AS(log_unipotent(MatrixOverAlgebra::from_constant(notu, pt)), Error);
}

TEST_CASE("unipotent series agrees with the branch logarithm") {
  Rng rng(33);
  auto pt = SampleSpace::finite_points(1);
  for (int trial = 0; trial < 20; ++trial) {
    MatrixOverAlgebra u =
        MatrixOverAlgebra::from_constant(testsup::random_unipotent(rng, 4, 0.8), pt);
    CHECK(max_residual(log_unipotent(u), mat_log_branch(u, kPi)) <= 1e-9);
  }
}

TEST_CASE("scalar logarithm of Exp1 elements") {
  // on the disk: recovers the exponent of e^z
  auto disk = SampleSpace::disk_grid(64, 2, 8);
  AlgebraElement z = AlgebraElement::coordinate(disk);
  AlgebraElement lg = scalar_log_exp1(exp_pointwise(z));
  for (std::size_t i = 0; i < disk->size(); ++i)
    CHECK(std::abs(lg.value(i) - z.value(i)) < 1e-12);

  // on the interval: unwraps through the full turn instead of jumping
  auto iv = SampleSpace::interval_path(129);
  std::vector<Complex> g(129);
  for (std::size_t j = 0; j < 129; ++j)
    g[j] = std::exp(Complex(0, 2.0 * kPi * iv->coordinate(j).real()));
  AlgebraElement lg2 = scalar_log_exp1(AlgebraElement(iv, g));
  CHECK(std::abs(lg2.value(128) - Complex(0, 2.0 * kPi)) < 1e-12);

  CHECK_THROWS_AS(scalar_log_exp1(AlgebraElement::constant(iv, Complex(0, 0))), Error);
}

TEST_CASE("polyline-cut branch is continuous off the cut") {
  // cut along the positive real axis: continuity across the negative axis,
  // a full 2*pi jump across the cut itself
  std::vector<Complex> cut = {Complex(0, 0), Complex(5, 0)};
  const Complex above = detail::log_along_cut(Complex(-1, 1e-6), cut);
  const Complex below = detail::log_along_cut(Complex(-1, -1e-6), cut);
  CHECK(std::abs(above - below) < 1e-2);
  const Complex top = detail::log_along_cut(Complex(2, 1e-6), cut);
  const Complex bottom = detail::log_along_cut(Complex(2, -1e-6), cut);
  CHECK(std::abs(top - bottom) == doctest::Approx(2.0 * kPi).epsilon(1e-3));
  // still a logarithm everywhere
  for (const Complex& zpt : {Complex(-1, 1e-6), Complex(2, 1e-6), Complex(0.3, -2)})
    CHECK(std::abs(std::exp(detail::log_along_cut(zpt, cut)) - zpt) < 1e-12);
}

TEST_CASE("spiral spectrum falls back to a polyline cut") {
  // a two-turn spiral blocks every ray from 0 yet leaves 0 connected to
  // infinity through its mouth
  auto iv = SampleSpace::interval_path(1025);
  std::vector<Complex> vals(1025);
  for (std::size_t j = 0; j < 1025; ++j) {
    const double x = iv->coordinate(j).real();
    vals[j] = (0.5 + 0.8 * x) * std::exp(Complex(0, 4.0 * kPi * x));
  }
  MatrixOverAlgebra a(1, iv);
  a.set(0, 0, AlgebraElement(iv, vals));
  DirectLogResult r = direct_log(a);
  CHECK(!r.used_ray);
  CHECK(max_residual(mat_exp(r.log), a) <= 1e-10);
  // the chosen branch is continuous along the sampled path
  double jump = 0.0;
  for (std::size_t j = 0; j + 1 < 1025; ++j)
    jump = std::max(jump, std::abs(r.log.at(0, 0).value(j + 1) - r.log.at(0, 0).value(j)));
  CHECK(jump < 0.1);
}

TEST_CASE("holomorphy survives the matrix functions") {
  Rng rng(35);
  auto disk = SampleSpace::disk_grid(128, 4, 8);
  for (int trial = 0; trial < 4; ++trial) {
    MatrixOverAlgebra b = testsup::random_poly_matrix(rng, 3, disk, 2, 0.3);
    MatrixOverAlgebra e = mat_exp(b);
    double worst = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        worst = std::max(worst, holomorphy_residual(e.at(i, j)));
    CHECK(worst <= 1e-6);
    DirectLogResult lg = direct_log(e);
    worst = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        worst = std::max(worst, holomorphy_residual(lg.log.at(i, j)));
    CHECK(worst <= 1e-6);
  }
}
