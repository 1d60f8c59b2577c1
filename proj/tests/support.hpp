#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "expfact/matfunc.hpp"

namespace testsup {

using expfact::AlgebraElement;
using expfact::Complex;
using expfact::DenseMatrix;
using expfact::MatrixOverAlgebra;
using expfact::SpacePtr;

// deterministic splitmix64 stream, independent of the standard library
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  Complex box(double r) { return Complex(r * (2 * uniform() - 1), r * (2 * uniform() - 1)); }
};

// bounded random element: polynomial in the coordinate where the coordinate
// lives in the unit disk, direct values on finite point sets (whose labels
// are unbounded integers, a bad polynomial basis)
inline AlgebraElement random_poly_element(Rng& rng, const SpacePtr& sp, int degree, double r) {
  if (sp->kind() == expfact::SpaceKind::FinitePoints) {
    std::vector<Complex> v(sp->size());
    for (auto& x : v) x = rng.box(r);
    return AlgebraElement(sp, v);
  }
  std::vector<Complex> c(std::size_t(degree) + 1);
  for (auto& x : c) x = rng.box(r);
  return AlgebraElement::from_poly(sp, c);
}

inline MatrixOverAlgebra random_poly_matrix(Rng& rng, std::size_t n, const SpacePtr& sp,
                                            int degree, double r) {
  MatrixOverAlgebra m(n, sp);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m.set(i, j, random_poly_element(rng, sp, degree, r));
  return m;
}

inline DenseMatrix random_dense(Rng& rng, std::size_t n, double r) {
  DenseMatrix m(static_cast<long>(n), static_cast<long>(n));
  for (long i = 0; i < long(n); ++i)
    for (long j = 0; j < long(n); ++j) m(i, j) = rng.box(r);
  return m;
}

// random unipotent upper triangular constant matrix
inline DenseMatrix random_unipotent(Rng& rng, std::size_t n, double r) {
  DenseMatrix m = DenseMatrix::Identity(long(n), long(n));
  for (long i = 0; i < long(n); ++i)
    for (long j = i + 1; j < long(n); ++j) m(i, j) = rng.box(r);
  return m;
}

// random diagonal with entry product exactly adjusted to 1
inline MatrixOverAlgebra random_prod_one_diagonal(Rng& rng, std::size_t n, const SpacePtr& sp) {
  MatrixOverAlgebra d(n, sp);
  AlgebraElement running = AlgebraElement::constant(sp, Complex(1.0, 0.0));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    AlgebraElement e = expfact::exp_pointwise(random_poly_element(rng, sp, 3, 0.4));
    d.set(i, i, e);
    running = elem_mul(running, e);
  }
  d.set(n - 1, n - 1, invert_elem(running));
  return d;
}

// random upper triangular: constant product-one diagonal, polynomial strict
// upper part
inline MatrixOverAlgebra random_prod_one_triangular(Rng& rng, std::size_t n, const SpacePtr& sp,
                                                    int degree, double r) {
  MatrixOverAlgebra a(n, sp);
  Complex prod(1.0, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Complex c = std::polar(rng.uniform(0.8, 1.25), rng.uniform(-3.0, 3.0));
    a.set(i, i, AlgebraElement::constant(sp, c));
    prod *= c;
  }
  a.set(n - 1, n - 1, AlgebraElement::constant(sp, Complex(1.0, 0.0) / prod));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      a.set(i, j, random_poly_element(rng, sp, degree, r));
  return a;
}

inline MatrixOverAlgebra exp_product_instance(Rng& rng, std::size_t n, const SpacePtr& sp) {
  const double r = 0.25 / std::sqrt(double(n));
  MatrixOverAlgebra p = random_poly_matrix(rng, n, sp, 2, r);
  MatrixOverAlgebra q = random_poly_matrix(rng, n, sp, 2, r);
  return expfact::mat_exp(p) * expfact::mat_exp(q);
}

}  // namespace testsup
