#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "expfact/element.hpp"
#include "expfact/error.hpp"
#include "support.hpp"

using namespace expfact;
using testsup::Rng;

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

TEST_CASE("backend layouts are deterministic") {
  auto one = SampleSpace::finite_points(1);
  CHECK(one->size() == 1);
  CHECK(one->contractible());

  auto iv = SampleSpace::interval_path(3);
  REQUIRE(iv->size() == 3);
  CHECK(iv->coordinate(0) == Complex(0.0, 0.0));
  CHECK(iv->coordinate(1) == Complex(0.5, 0.0));
  CHECK(iv->coordinate(2) == Complex(1.0, 0.0));

  // 8 boundary points at angles 2*pi*j/8, then the center
  auto disk = SampleSpace::disk_grid(8, 1, 4);
  REQUIRE(disk->size() == 9);
  for (std::size_t j = 0; j < 8; ++j) {
    const Complex want = std::polar(1.0, kTwoPi * double(j) / 8.0);
    CHECK(std::abs(disk->coordinate(j) - want) < 1e-15);
  }
  CHECK(std::abs(disk->coordinate(8)) == 0.0);

  auto circle = SampleSpace::circle_path(16);
  CHECK(circle->closed_path());
  CHECK(!circle->contractible());

  CHECK_THROWS_AS(SampleSpace::disk_grid(4, 1, 4), Error);
  CHECK_THROWS_AS(SampleSpace::finite_points(0), Error);
}

TEST_CASE("pointwise arithmetic") {
  auto disk = SampleSpace::disk_grid(16, 2, 8);
  AlgebraElement z = AlgebraElement::coordinate(disk);
  AlgebraElement z2 = elem_mul(z, z);
  for (std::size_t i = 0; i < disk->size(); ++i) {
    const Complex c = disk->coordinate(i);
    CHECK(std::abs(z2.value(i) - c * c) < 1e-15);
  }
  CHECK(z2.has_poly());
  REQUIRE(z2.poly().size() == 3);
  CHECK(std::abs(z2.poly()[2] - Complex(1, 0)) == 0.0);

  AlgebraElement zero = AlgebraElement::constant(disk, Complex(0, 0));
  AlgebraElement sum = z + zero;
  for (std::size_t i = 0; i < disk->size(); ++i) CHECK(sum.value(i) == z.value(i));

  auto two = SampleSpace::finite_points(2);
  AlgebraElement a(two, {Complex(1, 0), Complex(2, 0)});
  AlgebraElement b(two, {Complex(3, 0), Complex(4, 0)});
  AlgebraElement prod = a * b;
  CHECK(prod.value(0) == Complex(3, 0));
  CHECK(prod.value(1) == Complex(8, 0));

  auto iv = SampleSpace::interval_path(5);
  CHECK_THROWS_AS(elem_add(a, AlgebraElement::constant(iv, Complex(1, 0))), Error);
}

TEST_CASE("polynomial payloads truncate past the degree cap") {
  auto disk = SampleSpace::disk_grid(16, 1, 2);
  AlgebraElement z = AlgebraElement::coordinate(disk);
  AlgebraElement z2 = z * z;
  CHECK(z2.has_poly());
  const auto before = poly_truncation_count();
  AlgebraElement z3 = z2 * z;  // degree 3 > cap 2
  CHECK(!z3.has_poly());
  CHECK(poly_truncation_count() == before + 1);
  for (std::size_t i = 0; i < disk->size(); ++i) {
    const Complex c = disk->coordinate(i);
    CHECK(std::abs(z3.value(i) - c * c * c) < 1e-15);
  }
}

TEST_CASE("inversion") {
  auto two = SampleSpace::finite_points(2);
  AlgebraElement c2 = AlgebraElement::constant(two, Complex(2, 0));
  AlgebraElement half = invert_elem(c2);
  CHECK(half.value(0) == Complex(0.5, 0));

  AlgebraElement pm(two, {Complex(1, 0), Complex(-1, 0)});
  AlgebraElement pm_inv = invert_elem(pm);
  CHECK(pm_inv.value(0) == Complex(1, 0));
  CHECK(pm_inv.value(1) == Complex(-1, 0));

  auto disk = SampleSpace::disk_grid(128, 4, 8);
  AlgebraElement shifted =
      AlgebraElement::from_poly(disk, {Complex(2, 0), Complex(1, 0)});  // z + 2
  AlgebraElement inv = invert_elem(shifted);
  // 1/(z+2) is holomorphic on the disk: interior values must match the
  // boundary Cauchy integral
  CHECK(holomorphy_residual(inv) < 1e-6);
  CHECK(holomorphy_residual(inv) <= 10.0 * holomorphy_residual(shifted) + 1e-8);

  AlgebraElement small(two, {Complex(1, 0), Complex(1e-14, 0)});
  CHECK_THROWS_AS(invert_elem(small), Error);
}

TEST_CASE("zero locus") {
  auto two = SampleSpace::finite_points(2);
  CHECK(zero_locus(AlgebraElement::constant(two, Complex(1, 0)), 1e-8).empty());

  auto disk = SampleSpace::disk_grid(16, 1, 4);
  AlgebraElement z = AlgebraElement::coordinate(disk);
  auto locus = zero_locus(z, 1e-8);
  REQUIRE(locus.size() == 1);
  CHECK(locus[0] == 16);  // the center sample

  AlgebraElement e(two, {Complex(0, 0), Complex(1, 0)});
  auto l2 = zero_locus(e, 1e-8);
  REQUIRE(l2.size() == 1);
  CHECK(l2[0] == 0);
}

TEST_CASE("exponential subgroup membership") {
  auto iv = SampleSpace::interval_path(64);
  auto circle = SampleSpace::circle_path(64);

  CHECK(is_exp1(AlgebraElement::constant(iv, Complex(5, 0))));

  std::vector<Complex> loop_iv(64), loop_c(64);
  for (std::size_t j = 0; j < 64; ++j) {
    loop_iv[j] = std::exp(Complex(0, kTwoPi * iv->coordinate(j).real()));
    loop_c[j] = std::exp(Complex(0, kTwoPi * double(j) / 64.0));
  }
  // same values: winding 1 blocks membership on the circle, contractibility
  // saves it on the interval
  CHECK(is_exp1(AlgebraElement(iv, loop_iv)));
  CHECK(!is_exp1(AlgebraElement(circle, loop_c)));

  // vanishing anywhere blocks membership
  CHECK(!is_exp1(AlgebraElement::constant(iv, Complex(0, 0))));

  // disk grid: an interior zero shows up as boundary winding even when all
  // samples miss it
  auto disk = SampleSpace::disk_grid(128, 4, 8);
  AlgebraElement interior_zero =
      AlgebraElement::from_poly(disk, {Complex(0.25, 0.25), Complex(1, 0)});
  CHECK(interior_zero.min_abs() > 1e-8);  // samples all clear...
  CHECK(!is_exp1(interior_zero));         // ...but the winding catches the zero
  AlgebraElement outside_zero =
      AlgebraElement::from_poly(disk, {Complex(1.25, 0), Complex(1, 0)});
  CHECK(is_exp1(outside_zero));
}

TEST_CASE("holomorphy residual") {
  auto disk = SampleSpace::disk_grid(64, 2, 8);
  AlgebraElement z3 = AlgebraElement::from_poly(
      disk, {Complex(0, 0), Complex(0, 0), Complex(0, 0), Complex(1, 0)});
  CHECK(holomorphy_residual(z3) <= 1e-10);

  CHECK(holomorphy_residual(AlgebraElement::constant(disk, Complex(1, 0))) <= 1e-14);

  // conj(z) is anti-holomorphic: reconstruction fails by roughly |z|
  std::vector<Complex> conj_vals(disk->size());
  for (std::size_t i = 0; i < disk->size(); ++i) conj_vals[i] = std::conj(disk->coordinate(i));
  const double resid = holomorphy_residual(AlgebraElement(disk, conj_vals));
  CHECK(resid > 0.1);  // ring at radius 0.5 already misses by ~0.5

  auto iv = SampleSpace::interval_path(5);
  CHECK_THROWS_AS(holomorphy_residual(AlgebraElement::constant(iv, Complex(1, 0))), Error);
}

TEST_CASE("ring laws on random elements") {
  Rng rng(42);
  for (const SpacePtr& sp :
       {SampleSpace::finite_points(5), SampleSpace::interval_path(33),
        SampleSpace::disk_grid(32, 2, 8), SampleSpace::circle_path(32)}) {
    for (int trial = 0; trial < 10; ++trial) {
      AlgebraElement a = testsup::random_poly_element(rng, sp, 3, 1.0);
      AlgebraElement b = testsup::random_poly_element(rng, sp, 3, 1.0);
      AlgebraElement c = testsup::random_poly_element(rng, sp, 3, 1.0);
      AlgebraElement lhs = (a * b) * c;
      AlgebraElement rhs = a * (b * c);
      for (std::size_t i = 0; i < sp->size(); ++i)
        CHECK(std::abs(lhs.value(i) - rhs.value(i)) <=
              1e-12 * (1.0 + std::abs(lhs.value(i))));

      AlgebraElement shifted = a + AlgebraElement::constant(sp, Complex(3, 0));
      AlgebraElement unit = shifted * invert_elem(shifted);
      for (std::size_t i = 0; i < sp->size(); ++i)
        CHECK(std::abs(unit.value(i) - Complex(1, 0)) <= 1e-12);
    }
  }
}

TEST_CASE("exp of anything is in Exp1 on contractible backends") {
  Rng rng(7);
  for (const SpacePtr& sp : {SampleSpace::finite_points(6), SampleSpace::interval_path(65),
                             SampleSpace::disk_grid(64, 2, 8)}) {
    for (int trial = 0; trial < 10; ++trial) {
      AlgebraElement f = testsup::random_poly_element(rng, sp, 4, 1.2);
      CHECK(is_exp1(exp_pointwise(f)));
    }
  }
}

TEST_CASE("products and inverses of polynomial elements stay holomorphic") {
  Rng rng(11);
  auto disk = SampleSpace::disk_grid(128, 4, 8);
  for (int trial = 0; trial < 10; ++trial) {
    AlgebraElement a = testsup::random_poly_element(rng, disk, 8, 0.5);
    AlgebraElement b = testsup::random_poly_element(rng, disk, 8, 0.5);
    CHECK(holomorphy_residual(a * b) <= 1e-6);
    AlgebraElement shifted = a + AlgebraElement::constant(disk, Complex(5, 0));
    CHECK(holomorphy_residual(invert_elem(shifted)) <= 1e-6);
  }
}
