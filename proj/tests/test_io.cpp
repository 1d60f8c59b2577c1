#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "expfact/io.hpp"
#include "support.hpp"

using namespace expfact;
using io::Json;
using testsup::Rng;

TEST_CASE("backend descriptors round trip") {
  for (const SpacePtr& sp :
       {SampleSpace::finite_points(4), SampleSpace::interval_path(129),
        SampleSpace::disk_grid(128, 4, 8), SampleSpace::circle_path(64)}) {
    SpacePtr back = io::backend_from_json(io::backend_to_json(sp));
    CHECK(back->same_as(*sp));
  }
  CHECK_THROWS_AS(io::backend_from_json(Json{{"kind", "torus"}}), Error);
}

TEST_CASE("element literals") {
  auto disk = SampleSpace::disk_grid(16, 2, 8);

  Json poly = {{"poly", Json::array({Json::array({1.0, 0.0}), Json::array({0.0, 1.0})})}};
  AlgebraElement e = io::element_from_json(poly, disk);  // 1 + i z
  CHECK(e.has_poly());
  for (std::size_t i = 0; i < disk->size(); ++i) {
    const Complex want = Complex(1, 0) + Complex(0, 1) * disk->coordinate(i);
    CHECK(std::abs(e.value(i) - want) < 1e-15);
  }

  // samples round trip through serialization
  Rng rng(5);
  AlgebraElement raw(disk, [&] {
    std::vector<Complex> v(disk->size());
    for (auto& x : v) x = rng.box(2.0);
    return v;
  }());
  AlgebraElement back = io::element_from_json(io::element_to_json(raw), disk);
  for (std::size_t i = 0; i < disk->size(); ++i) CHECK(back.value(i) == raw.value(i));

  // constants can be written as bare pairs
  AlgebraElement c = io::element_from_json(Json::array({2.0, -1.0}), disk);
  CHECK(c.value(0) == Complex(2, -1));

  CHECK_THROWS_AS(io::element_from_json(Json{{"nope", 1}}, disk), Error);
}

TEST_CASE("matrix specs") {
  Json spec;
  spec["backend"] = {{"kind", "interval_path"}, {"samples", 65}};
  spec["n"] = 2;
  spec["entries"] = Json::array(
      {Json::array({Json::array({1.0, 0.0}), Json::array({0.5, 0.0})}),
       Json::array({Json::array({0.0, 0.0}), Json::array({1.0, 0.0})})});
  io::MatrixSpec ms = io::matrix_spec_from_json(spec);
  CHECK(ms.matrix.dim() == 2);
  CHECK(!ms.normalize_det);
  CHECK(ms.matrix.at(0, 1).value(3) == Complex(0.5, 0));
}

TEST_CASE("certificates round trip with traces") {
  Rng rng(7);
  auto iv = SampleSpace::interval_path(33);
  MatrixOverAlgebra a = testsup::exp_product_instance(rng, 2, iv);
  GeneralFactorization f = factorize_two_exp(a, 0.25, {});

  Json j = io::certificate_to_json(f.certificate, {f.b1, f.b2}, iv, &f.trace);
  CHECK(j["schema"] == "expfact-cert-1");
  io::StoredCertificate stored = io::certificate_from_json(j);
  CHECK(stored.factors.size() == 2);
  CHECK(stored.cert.reconstruction_residual == f.certificate.reconstruction_residual);
  CHECK(stored.cert.all_verified == f.certificate.all_verified);
  REQUIRE(stored.trace.has_value());

  auto [b1, b2] = replay_trace(a, *stored.trace);
  CHECK(max_residual(b1, f.b1) <= 1e-9);
  CHECK(max_residual(b2, f.b2) <= 1e-9);

  // serialization is deterministic
  Json j2 = io::certificate_to_json(f.certificate, {f.b1, f.b2}, iv, &f.trace);
  CHECK(j.dump() == j2.dump());
}

TEST_CASE("spectrum serialization carries provenance") {
  auto pt = SampleSpace::finite_points(2);
  MatrixOverAlgebra a(1, pt);
  a.set(0, 0, AlgebraElement(pt, {Complex(2, 0), Complex(0, 3)}));
  Json j = io::spectrum_to_json(spectrum(a));
  REQUIRE(j["points"].size() == 2);
  CHECK(j["points"][0]["sample"].get<int>() == 0);
  CHECK(j["dim"].get<int>() == 1);
  CHECK(j["resolution"].get<double>() > 0);
}
