#include "expfact/matrix.hpp"

#include <cmath>

#include "expfact/error.hpp"

namespace expfact {

MatrixOverAlgebra::MatrixOverAlgebra(std::size_t n, SpacePtr space)
    : n_(n), space_(std::move(space)) {
  if (n_ == 0) throw Error(ErrorCode::ShapeMismatch, "matrix dimension must be >= 1");
  entries_.assign(n_ * n_, AlgebraElement::constant(space_, Complex(0.0, 0.0)));
}

MatrixOverAlgebra MatrixOverAlgebra::identity(std::size_t n, const SpacePtr& space) {
  MatrixOverAlgebra m(n, space);
  for (std::size_t i = 0; i < n; ++i)
    m.set(i, i, AlgebraElement::constant(space, Complex(1.0, 0.0)));
  return m;
}

MatrixOverAlgebra MatrixOverAlgebra::from_constant(const DenseMatrix& c, const SpacePtr& space) {
  if (c.rows() != c.cols()) throw Error(ErrorCode::ShapeMismatch, "constant matrix not square");
  MatrixOverAlgebra m(std::size_t(c.rows()), space);
  for (std::size_t i = 0; i < m.n_; ++i)
    for (std::size_t j = 0; j < m.n_; ++j)
      m.set(i, j, AlgebraElement::constant(space, c(long(i), long(j))));
  return m;
}

const AlgebraElement& MatrixOverAlgebra::at(std::size_t i, std::size_t j) const {
  return entries_[i * n_ + j];
}

void MatrixOverAlgebra::set(std::size_t i, std::size_t j, AlgebraElement e) {
  require_same_space(space_, e.space());
  entries_[i * n_ + j] = std::move(e);
}

MatrixOverAlgebra MatrixOverAlgebra::from_sample_fn(
    std::size_t n, const SpacePtr& space, Exec exec,
    const std::function<DenseMatrix(std::size_t)>& fn) {
  const std::size_t count = space->size();
  std::vector<std::vector<Complex>> slots(n * n, std::vector<Complex>(count));
  for_each_sample_checked(count, exec, [&](std::size_t s) {
    DenseMatrix m = fn(s);
    if (std::size_t(m.rows()) != n || std::size_t(m.cols()) != n)
      throw Error(ErrorCode::ShapeMismatch, "sample kernel returned wrong shape", s);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) slots[i * n + j][s] = m(long(i), long(j));
  });
  MatrixOverAlgebra out(n, space);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out.set(i, j, AlgebraElement(space, std::move(slots[i * n + j])));
  return out;
}

DenseMatrix MatrixOverAlgebra::eval(std::size_t sample) const {
  DenseMatrix m(static_cast<long>(n_), static_cast<long>(n_));
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) m(long(i), long(j)) = entries_[i * n_ + j].value(sample);
  return m;
}

void MatrixOverAlgebra::set_sample(std::size_t sample, const DenseMatrix& m) {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) {
      auto& e = entries_[i * n_ + j];
      std::vector<Complex> vals = e.values();
      vals[sample] = m(long(i), long(j));
      e = AlgebraElement(space_, std::move(vals));
    }
}

MatrixOverAlgebra MatrixOverAlgebra::transpose() const {
  MatrixOverAlgebra t(n_, space_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) t.set(j, i, at(i, j));
  return t;
}

double MatrixOverAlgebra::max_operator_norm() const {
  double worst = 0.0;
  for (std::size_t s = 0; s < samples(); ++s)
    worst = std::max(worst, eval(s).operatorNorm());
  return worst;
}

double MatrixOverAlgebra::max_abs_entry() const {
  double worst = 0.0;
  for (const auto& e : entries_) worst = std::max(worst, e.max_abs());
  return worst;
}

bool MatrixOverAlgebra::is_upper_triangular(double tol) const {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (at(i, j).max_abs() > tol) return false;
  return true;
}

bool MatrixOverAlgebra::is_lower_triangular(double tol) const {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if (at(i, j).max_abs() > tol) return false;
  return true;
}

bool MatrixOverAlgebra::is_diagonal(double tol) const {
  return is_upper_triangular(tol) && is_lower_triangular(tol);
}

AlgebraElement MatrixOverAlgebra::det(Exec exec) const {
  std::vector<Complex> vals(samples());
  for_each_sample(samples(), exec, [&](std::size_t s) {
    vals[s] = eval(s).partialPivLu().determinant();
  });
  return AlgebraElement(space_, std::move(vals));
}

namespace {
void require_compatible(const MatrixOverAlgebra& a, const MatrixOverAlgebra& b) {
  require_same_space(a.space(), b.space());
  if (a.dim() != b.dim()) throw Error(ErrorCode::ShapeMismatch, "matrix dimensions differ");
}
}  // namespace

MatrixOverAlgebra mat_add(const MatrixOverAlgebra& a, const MatrixOverAlgebra& b) {
  require_compatible(a, b);
  MatrixOverAlgebra out(a.dim(), a.space());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) out.set(i, j, a.at(i, j) + b.at(i, j));
  return out;
}

MatrixOverAlgebra mat_sub(const MatrixOverAlgebra& a, const MatrixOverAlgebra& b) {
  require_compatible(a, b);
  MatrixOverAlgebra out(a.dim(), a.space());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) out.set(i, j, a.at(i, j) - b.at(i, j));
  return out;
}

MatrixOverAlgebra mat_mul(const MatrixOverAlgebra& a, const MatrixOverAlgebra& b) {
  require_compatible(a, b);
  MatrixOverAlgebra out(a.dim(), a.space());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) {
      AlgebraElement acc = elem_mul(a.at(i, 0), b.at(0, j));
      for (std::size_t k = 1; k < a.dim(); ++k)
        acc = acc + elem_mul(a.at(i, k), b.at(k, j));
      out.set(i, j, acc);
    }
  return out;
}

MatrixOverAlgebra mat_scale(const MatrixOverAlgebra& a, Complex c) {
  MatrixOverAlgebra out(a.dim(), a.space());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) out.set(i, j, elem_scale(a.at(i, j), c));
  return out;
}

MatrixOverAlgebra mat_neg(const MatrixOverAlgebra& a) { return mat_scale(a, Complex(-1, 0)); }

MatrixOverAlgebra mat_inverse(const MatrixOverAlgebra& a, Exec exec) {
  return MatrixOverAlgebra::from_sample_fn(a.dim(), a.space(), exec, [&](std::size_t s) {
    DenseMatrix inv = a.eval(s).partialPivLu().inverse();
    if (!inv.allFinite())
      throw Error(ErrorCode::NotInvertible, "matrix not invertible", s);
    return inv;
  });
}

double max_residual(const MatrixOverAlgebra& a, const MatrixOverAlgebra& b) {
  require_same_space(a.space(), b.space());
  if (a.dim() != b.dim()) throw Error(ErrorCode::ShapeMismatch, "matrix dimensions differ");
  double worst = 0.0;
  for (std::size_t s = 0; s < a.samples(); ++s) {
    DenseMatrix d = a.eval(s) - b.eval(s);
    worst = std::max(worst, d.operatorNorm());
  }
  return worst;
}

}  // namespace expfact
