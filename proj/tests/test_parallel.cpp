#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "expfact/general.hpp"
#include "expfact/io.hpp"
#include "support.hpp"

// The OpenMP kernels partition the per-sample index range and nothing else,
// so every parallel result must equal the serial reference bit for bit.

using namespace expfact;
using testsup::Rng;

namespace {

bool bitwise_equal(const MatrixOverAlgebra& a, const MatrixOverAlgebra& b) {
  if (a.dim() != b.dim() || a.samples() != b.samples()) return false;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      for (std::size_t s = 0; s < a.samples(); ++s)
        if (a.at(i, j).value(s) != b.at(i, j).value(s)) return false;
  return true;
}

}  // namespace

TEST_CASE("matrix exponential kernel is schedule independent") {
  Rng rng(101);
  auto iv = SampleSpace::interval_path(257);
  MatrixOverAlgebra b = testsup::random_poly_matrix(rng, 4, iv, 3, 0.6);
  CHECK(bitwise_equal(mat_exp(b, Exec::Serial), mat_exp(b, Exec::Parallel)));
}

TEST_CASE("spectrum kernel is schedule independent") {
  Rng rng(102);
  auto disk = SampleSpace::disk_grid(64, 4, 8);
  MatrixOverAlgebra a = testsup::random_poly_matrix(rng, 3, disk, 2, 0.8);
  Spectrum s1 = spectrum(a, Exec::Serial);
  Spectrum s2 = spectrum(a, Exec::Parallel);
  REQUIRE(s1.points.size() == s2.points.size());
  CHECK(s1.resolution == s2.resolution);
  for (std::size_t i = 0; i < s1.points.size(); ++i) {
    CHECK(s1.points[i].value == s2.points[i].value);
    CHECK(s1.points[i].sample == s2.points[i].sample);
  }
}

TEST_CASE("branch logarithm kernel is schedule independent") {
  Rng rng(103);
  auto iv = SampleSpace::interval_path(129);
  MatrixOverAlgebra b = testsup::random_poly_matrix(rng, 3, iv, 2, 0.4);
  MatrixOverAlgebra a = mat_exp(b);
  const double theta = choose_branch_angle(spectrum(a));
  CHECK(bitwise_equal(mat_log_branch(a, theta, Exec::Serial),
                      mat_log_branch(a, theta, Exec::Parallel)));
}

TEST_CASE("whole pipelines emit identical certificates either way") {
  Rng rng(104);
  auto iv = SampleSpace::interval_path(65);
  MatrixOverAlgebra a = testsup::exp_product_instance(rng, 3, iv);

  SearchOptions serial;
  serial.exec = Exec::Serial;
  SearchOptions parallel;
  parallel.exec = Exec::Parallel;

  GeneralFactorization fs = factorize_two_exp(a, 0.25, serial);
  GeneralFactorization fp = factorize_two_exp(a, 0.25, parallel);
  CHECK(bitwise_equal(fs.b1, fp.b1));
  CHECK(bitwise_equal(fs.b2, fp.b2));

  const io::Json js = io::certificate_to_json(fs.certificate, {fs.b1, fs.b2}, iv);
  const io::Json jp = io::certificate_to_json(fp.certificate, {fp.b1, fp.b2}, iv);
  CHECK(js.dump() == jp.dump());
}

TEST_CASE("errors surface deterministically from parallel sweeps") {
  auto pts = SampleSpace::finite_points(8);
  MatrixOverAlgebra a = MatrixOverAlgebra::identity(2, pts);
  // two singular samples; the report must name the smallest index
  std::vector<Complex> vals(8, Complex(1, 0));
  vals[3] = Complex(0, 0);
  vals[6] = Complex(0, 0);
  a.set(0, 0, AlgebraElement(pts, vals));
  for (Exec exec : {Exec::Serial, Exec::Parallel}) {
    try {
      mat_inverse(a, exec);
      FAIL("inverse of a singular matrix succeeded");
    } catch (const Error& e) {
      CHECK(e.has_sample());
      CHECK(e.sample() == 3);
    }
  }
}
