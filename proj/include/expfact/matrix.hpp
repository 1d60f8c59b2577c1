#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "expfact/element.hpp"
#include "expfact/parallel.hpp"

namespace expfact {

using DenseMatrix = Eigen::MatrixXcd;

// An n x n matrix of algebra elements sharing one sample space. Entry-level
// arithmetic keeps polynomial payloads alive where possible; per-sample
// kernels work on the dense evaluation instead.
class MatrixOverAlgebra {
 public:
  MatrixOverAlgebra() = default;
  MatrixOverAlgebra(std::size_t n, SpacePtr space);

  static MatrixOverAlgebra identity(std::size_t n, const SpacePtr& space);
  static MatrixOverAlgebra from_constant(const DenseMatrix& m, const SpacePtr& space);

  // Bulk builder for per-sample kernels: fn(s) produces the dense value at
  // sample s; samples are filled independently (parallelizable).
  static MatrixOverAlgebra from_sample_fn(std::size_t n, const SpacePtr& space, Exec exec,
                                          const std::function<DenseMatrix(std::size_t)>& fn);

  std::size_t dim() const { return n_; }
  const SpacePtr& space() const { return space_; }
  std::size_t samples() const { return space_ ? space_->size() : 0; }

  const AlgebraElement& at(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, AlgebraElement e);

  DenseMatrix eval(std::size_t sample) const;
  void set_sample(std::size_t sample, const DenseMatrix& m);

  MatrixOverAlgebra transpose() const;

  // max over samples of the per-sample 2-norm (largest singular value)
  double max_operator_norm() const;
  double max_abs_entry() const;

  bool is_upper_triangular(double tol = 1e-8) const;
  bool is_lower_triangular(double tol = 1e-8) const;
  bool is_diagonal(double tol = 1e-8) const;

  AlgebraElement det(Exec exec = Exec::Parallel) const;

 private:
  std::size_t n_ = 0;
  SpacePtr space_;
  std::vector<AlgebraElement> entries_;  // row-major
};

MatrixOverAlgebra mat_add(const MatrixOverAlgebra& a, const MatrixOverAlgebra& b);
MatrixOverAlgebra mat_sub(const MatrixOverAlgebra& a, const MatrixOverAlgebra& b);
MatrixOverAlgebra mat_mul(const MatrixOverAlgebra& a, const MatrixOverAlgebra& b);
MatrixOverAlgebra mat_scale(const MatrixOverAlgebra& a, Complex c);
MatrixOverAlgebra mat_neg(const MatrixOverAlgebra& a);

inline MatrixOverAlgebra operator+(const MatrixOverAlgebra& a, const MatrixOverAlgebra& b) { return mat_add(a, b); }
inline MatrixOverAlgebra operator-(const MatrixOverAlgebra& a, const MatrixOverAlgebra& b) { return mat_sub(a, b); }
inline MatrixOverAlgebra operator*(const MatrixOverAlgebra& a, const MatrixOverAlgebra& b) { return mat_mul(a, b); }

// Pointwise inverse via LU; throws NotInvertible at the first bad sample.
MatrixOverAlgebra mat_inverse(const MatrixOverAlgebra& a, Exec exec = Exec::Parallel);

// max over samples of the per-sample operator-norm difference
double max_residual(const MatrixOverAlgebra& a, const MatrixOverAlgebra& b);

}  // namespace expfact
