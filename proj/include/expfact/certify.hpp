#pragma once

#include <array>
#include <vector>

#include "expfact/matfunc.hpp"

namespace expfact {

enum class ClaimKind { EqualsSn, WithinNeps, InSigmaN };
const char* claim_kind_name(ClaimKind kind);

// One spectral assertion about exp(B_factor). `margin` is threshold minus
// measured value, so positive means verified with room to spare.
struct SpectralClaim {
  std::size_t factor = 0;
  ClaimKind kind = ClaimKind::EqualsSn;
  double epsilon = 0.0;  // WithinNeps radius
  bool verified = false;
  double margin = 0.0;
};

// Everything needed to re-check a factorization from the stored factors
// alone: reconstruction residual, spectral claims, and the continuity /
// holomorphy proxies for the backend at hand.
struct FactorizationCertificate {
  std::size_t factor_count = 0;
  std::vector<double> factor_norms;       // max-sample operator norm of each B_i
  double reconstruction_residual = 0.0;   // max-sample operator norm defect
  std::vector<SpectralClaim> claims;
  double continuity_jump = 0.0;           // path backends, max over factors
  double holomorphy_residual = 0.0;       // disk grid, max over factor entries
  double tolerance = 0.0;
  bool all_verified = false;
};

// Recomputes the product of exponentials, every claim, and the continuity /
// holomorphy residuals from scratch; independent of how the factors were
// produced.
FactorizationCertificate verify_factorization(const MatrixOverAlgebra& a,
                                              const std::vector<MatrixOverAlgebra>& factors,
                                              double tol,
                                              std::vector<SpectralClaim> claims = {},
                                              Exec exec = Exec::Parallel);

// The obstruction instance [[g, 1], [0, 1]] with g = exp(2*pi*i*x) on an
// interval path: invertible, determinant in Exp1, yet without any logarithm.
MatrixOverAlgebra build_t_counterexample(const SpacePtr& space);

// Block-diagonal extension diag(M*I_{n-2}, T) with M = 1 + max|g| = 2, which
// pushes the same obstruction to any dimension n >= 3.
MatrixOverAlgebra build_tn(const SpacePtr& space, std::size_t n);

struct ObstructionCase {
  int sign_half;      // f1 = sign_half * exp(f/2)
  int sign_unit;      // f4 = sign_unit * 1
  std::size_t sample; // where f1 + f4 must vanish
  double magnitude;   // |f1 + f4| there
};

struct ObstructionReport {
  std::array<ObstructionCase, 4> cases;
  bool no_continuous_sqrt = false;
};

// Replays the four continuous square-root branch assignments for T and
// confirms each one forces f1 + f4 to vanish somewhere, contradicting
// (f1 + f4) * f2 = 1.
ObstructionReport verify_t_obstruction(const MatrixOverAlgebra& t);

// Max adjacent-sample jump over all entries (path backends only).
double continuity_report(const MatrixOverAlgebra& m);
double continuity_jump(const AlgebraElement& e);

// Max holomorphy residual over all entries (disk grid only).
double holomorphy_residual(const MatrixOverAlgebra& m);

}  // namespace expfact
