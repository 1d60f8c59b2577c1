#pragma once

#include "expfact/certify.hpp"

namespace expfact {

// Commutator data for a diagonal matrix D with product-one diagonal:
// D = C^-1 Rn^-1 C Rn where C is the diagonal of running products of D's
// entries and Rn is the n-cycle.
struct CommutatorData {
  MatrixOverAlgebra c;       // diagonal accumulator, c_11 = 1
  MatrixOverAlgebra rn;      // constant cyclic shift
  MatrixOverAlgebra rn_log;  // skew-Hermitian logarithm of rn
};

// Permutation matrix of the n-cycle e_i -> e_{i+1}; its spectrum is exactly
// the n-th roots of unity.
MatrixOverAlgebra cyclic_shift(std::size_t n, const SpacePtr& space);

// Logarithm of the cycle via discrete-Fourier diagonalization, eigenvalue
// angles mapped to (-pi, pi].
MatrixOverAlgebra log_cyclic(std::size_t n, const SpacePtr& space);

struct DiagonalFactorization {
  CommutatorData data;
  MatrixOverAlgebra b1;  // -C^-1 (log Rn) C
  MatrixOverAlgebra b2;  // log Rn
};

// Writes a product-one diagonal D as exp(B1) exp(B2) with both factor
// spectra equal to the n-th roots of unity.
DiagonalFactorization commutator_factor_diagonal(const MatrixOverAlgebra& d,
                                                 double product_tol = 1e-10);

// diag(1, t, ..., t^{n-1}); conjugating by it scales entry (i,j) by t^{j-i}.
MatrixOverAlgebra scale_matrix(Complex t, std::size_t n, const SpacePtr& space);

// The unipotent remainder Rn^-1 C^-1 Rn C * Dn(t)^-1 A Dn(t); shrinks to the
// identity as t -> 0.
MatrixOverAlgebra residual_unipotent(const MatrixOverAlgebra& a, Complex t,
                                     const CommutatorData& cd);

// First t in the halving schedule 2^-k, k <= 60, whose shifted spectrum
// sigma(Rn * A(t)) fits in the eps-neighborhood of the roots of unity.
double choose_t(const MatrixOverAlgebra& a, double eps, const CommutatorData& cd,
                Exec exec = Exec::Parallel);

struct TriangularFactorization {
  MatrixOverAlgebra b1;
  MatrixOverAlgebra b2;
  FactorizationCertificate certificate;
  double t_eps = 1.0;
  double theta = 0.0;  // branch ray used for log(Rn * A(t))
};

// Factors an invertible triangular matrix with product-one diagonal into two
// exponentials, sigma(exp B1) = S_n exactly and sigma(exp B2) within eps of
// it. Lower-triangular inputs are handled through transposition (factor
// order swaps, bounds are identical).
TriangularFactorization two_exp_triangular(const MatrixOverAlgebra& a, double eps,
                                           Exec exec = Exec::Parallel);

}  // namespace expfact
