#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace expfact::dense {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Complex = std::complex<double>;

// Diagonal similarity scaling (powers of two, so exactly invertible in
// floating point) that roughly equalizes row and column norms. Returns the
// scale factors d; the balanced matrix is D^-1 A D with D = diag(d).
Eigen::VectorXd balance(Matrix& a);

// Eigenvalues after balancing, sorted by (real, imag) for determinism.
std::vector<Complex> eigenvalues(const Matrix& a);

// Scaling-and-squaring Pade exponential on the balanced matrix.
Matrix exp(const Matrix& a);

// Logarithm with branch cut along the ray {r*e^{i*cut_angle} : r >= 0},
// computed by Schur triangularization and inverse scaling and squaring
// (repeated triangular square roots, then a Pade approximant). Handles
// repeated eigenvalues; throws BranchViolation if an eigenvalue sits on the
// cut. cut_angle = pi gives the principal logarithm.
Matrix log_branch(const Matrix& a, double cut_angle);

inline Matrix log_principal(const Matrix& a) { return log_branch(a, 3.14159265358979323846); }

// Distance from point p to the closed ray {r*e^{i*theta} : r >= 0}.
double ray_distance(Complex p, double theta);

}  // namespace expfact::dense
