#pragma once

#include "expfact/spectra.hpp"

namespace expfact {

// Pointwise matrix exponential (scaling-and-squaring with a diagonal Pade
// approximant, balanced first).
MatrixOverAlgebra mat_exp(const MatrixOverAlgebra& b, Exec exec = Exec::Parallel);

// A branch-cut ray for the logarithm: the angle whose closed ray from 0
// stays at least one resolution radius away from every spectrum point.
// Scans 720 candidate angles; maximizes ray clearance, breaking ties by
// angular clearance, then by smallest |theta|, then by sign. Throws
// NoRayFound when no candidate clears.
double choose_branch_angle(const Spectrum& s);

// Pointwise logarithm with the branch cut along the theta-ray. Every
// eigenvalue at every sample must clear the cut; the result satisfies
// exp(result) = A to within 1e-8 per sample (verified).
MatrixOverAlgebra mat_log_branch(const MatrixOverAlgebra& a, double theta,
                                 Exec exec = Exec::Parallel);

struct DirectLogResult {
  MatrixOverAlgebra log;
  bool used_ray = true;
  double theta = 0.0;        // branch ray when used_ray
  std::vector<Complex> cut;  // polyline cut otherwise
};

// Full logarithm pipeline: spectrum, membership test (0 must lie in the
// unbounded component of the spectrum complement, else NotInSigmaN), branch
// selection, and the branch logarithm. When no single ray clears but the
// membership test passes, a polyline cut is threaded through the free cells
// of the rasterized complement and the logarithm is taken eigenvalue-wise
// along that branch (verified per sample).
DirectLogResult direct_log(const MatrixOverAlgebra& a, Exec exec = Exec::Parallel);

// Finite series log for unipotent matrices: sum_{i=1}^{n-1} (-1)^{i+1}/i (A-I)^i.
MatrixOverAlgebra log_unipotent(const MatrixOverAlgebra& a);

// Continuous-branch scalar logarithm of an Exp1 element: principal values on
// FinitePoints (each point is clopen), phase unwrapping along IntervalPath
// and CirclePath, boundary unwrapping plus inward radial unwrapping on
// DiskGrid. exp(result) = a exactly per sample.
AlgebraElement scalar_log_exp1(const AlgebraElement& a, double tol = kDefaultZeroTol);

namespace detail {
// branch of log on the complement of a polyline cut from 0 to far field:
// principal log plus 2*pi*i times a crossing-count correction
Complex log_along_cut(Complex z, const std::vector<Complex>& cut);
// free-cell polyline from 0 out of the spectrum's bounding box
std::vector<Complex> polyline_cut(const std::vector<Complex>& points, double rho);
}  // namespace detail

}  // namespace expfact
