#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "expfact/triangular.hpp"

namespace expfact {

struct SearchOptions {
  std::uint64_t seed = 0;
  double tol = kDefaultZeroTol;  // acceptance floor for invertibility checks
  double margin = 0.05;          // preferred relative clearance for shifts
  Exec exec = Exec::Parallel;
};

// Smallest verified b with a1 + b*a2 in Exp1: constants on a 41x41 grid over
// [-5,5]^2, doubled up to |c| <= 80, smallest |c| first, then 200 seeded
// random polynomials of degree <= 2. A first pass insists on a relative
// clearance margin (keeps later logarithms well-conditioned); if nothing
// clears, a second pass accepts any verified candidate.
AlgebraElement shift_search(const AlgebraElement& a1, const AlgebraElement& a2,
                            const SearchOptions& opts);

// Shift vector (b_1..b_{n-1}) making the shifted prefix of a left-invertible
// column jointly nonvanishing. Same candidate strategy, applied jointly.
std::vector<AlgebraElement> stable_rank_reduce(const std::vector<AlgebraElement>& col,
                                               const SearchOptions& opts);

// Unipotent upper-triangular C with (C*col)_1 in Exp1, built by the stable
// rank induction.
MatrixOverAlgebra column_reduce(const std::vector<AlgebraElement>& col,
                                const SearchOptions& opts);

struct PivotSwap {
  MatrixOverAlgebra conjugator;  // constant transposition S (identity if none)
  MatrixOverAlgebra swapped;     // S^-1 A S
  std::size_t column = 0;        // column interchanged with the first
};

// Moves some nonzero below-diagonal entry into column 1 by a constant
// transposition conjugation; scans columns left to right, rows top to bottom.
PivotSwap pivot_swap(const MatrixOverAlgebra& a);

struct FirstRowBlocks {
  AlgebraElement a11;
  std::vector<AlgebraElement> h;  // first column below the corner
  std::vector<AlgebraElement> k;  // first row over the corner, divided by a11
  MatrixOverAlgebra g;            // trailing block minus h*k
};

// Block data of A2 = [[a11, 0],[H, G]] * [[1, K],[0, I]].
FirstRowBlocks clear_first_row(const MatrixOverAlgebra& a2, double tol = kDefaultZeroTol);

// First lambda in the doubling schedule separating sigma(lambda*G1) from
// sigma(a11) and keeping 1 out of sigma(G2/lambda).
double choose_lambda(const AlgebraElement& a11, const MatrixOverAlgebra& g1,
                     const MatrixOverAlgebra& g2, Exec exec = Exec::Parallel);

struct BlockFactors {
  MatrixOverAlgebra b1;
  MatrixOverAlgebra b2;
};

// Conjugates the two block factors to block-diagonal form and assembles
// their logarithms from the pieces (scalar log of a11, the recursion's logs
// of G1 and G2, and +-log(lambda) on the blocks).
BlockFactors block_decouple(double lambda, const AlgebraElement& a11,
                            const std::vector<AlgebraElement>& h, const MatrixOverAlgebra& g1,
                            const std::vector<AlgebraElement>& k, const MatrixOverAlgebra& g2,
                            const MatrixOverAlgebra& g_b1, const MatrixOverAlgebra& g_b2,
                            const AlgebraElement& a11_log, Exec exec = Exec::Parallel);

// Reduction record: enough data to rebuild both factors without redoing any
// search, so a verifier can replay the run against the original input.
struct ReductionTrace {
  enum class Kind { Scalar, Triangular, Block };
  Kind kind = Kind::Scalar;
  std::size_t n = 0;

  // scalar and triangular routes
  std::optional<AlgebraElement> det_log;  // normalization exponent (scalar log)
  double t_eps = 1.0;
  double theta = 0.0;

  // block route
  std::size_t pivot_col = 0;                  // 0 means no swap
  std::optional<MatrixOverAlgebra> column_c;  // unipotent column reducer
  std::optional<MatrixOverAlgebra> reduced;   // A2 after swap + conjugation
  double lambda = 1.0;
  std::optional<AlgebraElement> a11_log;
  std::unique_ptr<ReductionTrace> sub;        // trace for the trailing block
};

struct GeneralFactorization {
  MatrixOverAlgebra b1;
  MatrixOverAlgebra b2;
  FactorizationCertificate certificate;
  ReductionTrace trace;
};

// Two-exponential factorization of any matrix whose determinant lies in
// Exp1: triangular inputs go through the commutator construction (after a
// determinant split), everything else through pivot swap, column reduction,
// first-row clearing, recursion on the trailing block, and block decoupling.
GeneralFactorization factorize_two_exp(const MatrixOverAlgebra& a, double eps,
                                       const SearchOptions& opts = {});

// Rebuilds both factors from a trace (no searches) and checks the recorded
// reduced matrices along the way; returns the replayed factors.
std::pair<MatrixOverAlgebra, MatrixOverAlgebra> replay_trace(const MatrixOverAlgebra& a,
                                                             const ReductionTrace& trace,
                                                             Exec exec = Exec::Parallel);

// Regroups an alternating product of unitriangular matrices into
// floor(t/2)+1 unipotent factors with the same product.
std::vector<MatrixOverAlgebra> regroup_unitriangular(
    const std::vector<MatrixOverAlgebra>& factors);

// Single-exponential logarithm over finite point sets: every point is its
// own clopen piece, so each gets its own branch ray.
MatrixOverAlgebra single_exp_finite(const MatrixOverAlgebra& a, Exec exec = Exec::Parallel);

// Exact inverse of a unitriangular matrix via its nilpotent part.
MatrixOverAlgebra inverse_unitriangular(const MatrixOverAlgebra& c);

}  // namespace expfact
