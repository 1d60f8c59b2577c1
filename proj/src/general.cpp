#include "expfact/general.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "expfact/dense.hpp"
#include "expfact/error.hpp"

namespace expfact {

namespace {

constexpr double kNonzeroTol = 1e-8;  // "not identically zero" threshold

// deterministic uniform doubles from splitmix64, independent of libstdc++
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next_u64() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }
  Complex unit_disk() {
    while (true) {
      double x = 2.0 * uniform() - 1.0;
      double y = 2.0 * uniform() - 1.0;
      if (x * x + y * y <= 1.0) return {x, y};
    }
  }
};

// constant candidates: 41x41 grids over [-5,5]^2 doubled out to [-80,80]^2,
// deduplicated, ordered by (|c|, re, im)
std::vector<Complex> constant_candidates() {
  std::set<std::pair<double, double>> seen;
  std::vector<Complex> out;
  for (int level = 0; level < 5; ++level) {
    const double extent = 5.0 * double(1 << level);
    const double step = extent / 20.0;
    for (int i = -20; i <= 20; ++i)
      for (int j = -20; j <= 20; ++j) {
        const double re = step * i, im = step * j;
        if (seen.insert({re, im}).second) out.emplace_back(re, im);
      }
  }
  std::sort(out.begin(), out.end(), [](Complex a, Complex b) {
    const double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma < mb;
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

std::vector<AlgebraElement> random_poly_candidates(const SpacePtr& space, std::uint64_t seed,
                                                   int count, int degree) {
  Rng rng(seed ^ 0x51c5f7f3a1b2c3d4ULL);
  std::vector<AlgebraElement> out;
  out.reserve(std::size_t(count));
  for (int i = 0; i < count; ++i) {
    std::vector<Complex> coeffs(std::size_t(degree) + 1);
    for (auto& c : coeffs) c = rng.unit_disk();
    out.push_back(AlgebraElement::from_poly(space, std::move(coeffs)));
  }
  return out;
}

}  // namespace

AlgebraElement shift_search(const AlgebraElement& a1, const AlgebraElement& a2,
                            const SearchOptions& opts) {
  require_same_space(a1.space(), a2.space());
  for (std::size_t s = 0; s < a1.size(); ++s)
    if (std::abs(a1.value(s)) <= opts.tol && std::abs(a2.value(s)) <= opts.tol)
      throw Error(ErrorCode::CommonZero, "pair vanishes jointly", s);

  const double scale = std::max({a1.max_abs(), a2.max_abs(), 1e-30});
  double best_clearance = 0.0;

  auto try_candidate = [&](const AlgebraElement& shifted, double floor) -> bool {
    const double clearance = shifted.min_abs();
    if (is_exp1(shifted, opts.tol)) best_clearance = std::max(best_clearance, clearance);
    return clearance > floor && is_exp1(shifted, opts.tol);
  };

  static const std::vector<Complex> constants = constant_candidates();
  const std::vector<AlgebraElement> polys =
      random_poly_candidates(a1.space(), opts.seed, 200, 2);

  const double floors[2] = {opts.margin * scale, opts.tol};
  for (double floor : floors) {
    for (const Complex& c : constants) {
      AlgebraElement shifted = a1 + elem_scale(a2, c);
      if (try_candidate(shifted, std::max(floor, opts.tol)))
        return AlgebraElement::constant(a1.space(), c);
    }
    for (const AlgebraElement& b : polys) {
      AlgebraElement shifted = a1 + elem_mul(b, a2);
      if (try_candidate(shifted, std::max(floor, opts.tol))) return b;
    }
  }
  throw Error(ErrorCode::SearchExhausted,
              "no verified shift; best clearance " + format_mag(best_clearance));
}

std::vector<AlgebraElement> stable_rank_reduce(const std::vector<AlgebraElement>& col,
                                               const SearchOptions& opts) {
  const std::size_t n = col.size();
  if (n < 3) throw Error(ErrorCode::Config, "stable rank shift needs n >= 3");
  for (std::size_t s = 0; s < col[0].size(); ++s) {
    double best = 0.0;
    for (const auto& e : col) best = std::max(best, std::abs(e.value(s)));
    if (best <= opts.tol)
      throw Error(ErrorCode::NotLeftInvertible, "column vanishes jointly", s);
  }

  const AlgebraElement& last = col[n - 1];
  const SpacePtr& space = col[0].space();
  double scale = 1e-30;
  for (const auto& e : col) scale = std::max(scale, e.max_abs());

  auto clearance_of = [&](const std::vector<AlgebraElement>& shifted) {
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < last.size(); ++s) {
      double best = 0.0;
      for (const auto& e : shifted) best = std::max(best, std::abs(e.value(s)));
      worst = std::min(worst, best);
    }
    return worst;
  };
  auto shift_with = [&](const std::vector<AlgebraElement>& b) {
    std::vector<AlgebraElement> shifted;
    shifted.reserve(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) shifted.push_back(col[i] + elem_mul(b[i], last));
    return shifted;
  };

  // candidate vectors: zero, then one grid constant in a single slot
  // (ordered by magnitude), then joint random constants, then joint random
  // low-degree polynomials
  static const std::vector<Complex> constants = constant_candidates();
  Rng rng(opts.seed ^ 0xa5a5a5a5deadbeefULL);

  double best_clearance = 0.0;
  const double floors[2] = {opts.margin * scale, opts.tol};
  for (double floor : floors) {
    const double accept = std::max(floor, opts.tol);

    std::vector<AlgebraElement> zero(n - 1, AlgebraElement::constant(space, {0.0, 0.0}));
    if (clearance_of(shift_with(zero)) > accept) return zero;

    for (const Complex& c : constants) {
      if (std::abs(c) == 0.0) continue;
      for (std::size_t slot = 0; slot + 1 < n; ++slot) {
        std::vector<AlgebraElement> b = zero;
        b[slot] = AlgebraElement::constant(space, c);
        const double cl = clearance_of(shift_with(b));
        best_clearance = std::max(best_clearance, cl);
        if (cl > accept) return b;
      }
    }
    Rng joint = rng;
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<AlgebraElement> b;
      b.reserve(n - 1);
      for (std::size_t i = 0; i + 1 < n; ++i)
        b.push_back(AlgebraElement::constant(space, 2.0 * joint.unit_disk()));
      const double cl = clearance_of(shift_with(b));
      best_clearance = std::max(best_clearance, cl);
      if (cl > accept) return b;
    }
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<AlgebraElement> b;
      b.reserve(n - 1);
      for (std::size_t i = 0; i + 1 < n; ++i) {
        std::vector<Complex> coeffs(3);
        for (auto& cc : coeffs) cc = joint.unit_disk();
        b.push_back(AlgebraElement::from_poly(space, std::move(coeffs)));
      }
      const double cl = clearance_of(shift_with(b));
      best_clearance = std::max(best_clearance, cl);
      if (cl > accept) return b;
    }
  }
  throw Error(ErrorCode::SearchExhausted,
              "no verified joint shift; best clearance " + format_mag(best_clearance));
}

namespace {

MatrixOverAlgebra embed_upper_left(const MatrixOverAlgebra& c, std::size_t n) {
  MatrixOverAlgebra out = MatrixOverAlgebra::identity(n, c.space());
  for (std::size_t i = 0; i < c.dim(); ++i)
    for (std::size_t j = 0; j < c.dim(); ++j) out.set(i, j, c.at(i, j));
  return out;
}

std::vector<AlgebraElement> apply_to_column(const MatrixOverAlgebra& c,
                                            const std::vector<AlgebraElement>& col) {
  std::vector<AlgebraElement> out;
  out.reserve(col.size());
  for (std::size_t i = 0; i < c.dim(); ++i) {
    AlgebraElement acc = elem_mul(c.at(i, 0), col[0]);
    for (std::size_t j = 1; j < c.dim(); ++j) acc = acc + elem_mul(c.at(i, j), col[j]);
    out.push_back(acc);
  }
  return out;
}

}  // namespace

MatrixOverAlgebra column_reduce(const std::vector<AlgebraElement>& col,
                                const SearchOptions& opts) {
  const std::size_t n = col.size();
  const SpacePtr& space = col[0].space();
  if (n < 2) throw Error(ErrorCode::Config, "column reduction needs n >= 2");
  for (std::size_t s = 0; s < col[0].size(); ++s) {
    double best = 0.0;
    for (const auto& e : col) best = std::max(best, std::abs(e.value(s)));
    if (best <= opts.tol)
      throw Error(ErrorCode::NotLeftInvertible, "column vanishes jointly", s);
  }
  bool lower_nonzero = false;
  for (std::size_t i = 1; i < n; ++i) lower_nonzero |= col[i].max_abs() > kNonzeroTol;
  if (!lower_nonzero)
    throw Error(ErrorCode::AllLowerEntriesZero, "nothing below the first entry to shift with");

  if (n == 2) {
    AlgebraElement b = shift_search(col[0], col[1], opts);
    MatrixOverAlgebra c = MatrixOverAlgebra::identity(2, space);
    c.set(0, 1, b);
    return c;
  }

  if (col[n - 1].max_abs() <= kNonzeroTol) {
    // last entry vanishes identically: reduce the prefix
    std::vector<AlgebraElement> prefix(col.begin(), col.end() - 1);
    return embed_upper_left(column_reduce(prefix, opts), n);
  }

  std::vector<AlgebraElement> b = stable_rank_reduce(col, opts);
  MatrixOverAlgebra c1 = MatrixOverAlgebra::identity(n, space);
  for (std::size_t i = 0; i + 1 < n; ++i) c1.set(i, n - 1, b[i]);

  std::vector<AlgebraElement> shifted;
  shifted.reserve(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) shifted.push_back(col[i] + elem_mul(b[i], col[n - 1]));

  bool middle_nonzero = false;
  for (std::size_t i = 1; i + 1 < n; ++i) middle_nonzero |= shifted[i].max_abs() > kNonzeroTol;

  MatrixOverAlgebra c2(n, space);
  if (!middle_nonzero) {
    // shifted column is (a1', 0, ..., 0, a_n): one more scalar shift
    AlgebraElement b0 = shift_search(shifted[0], col[n - 1], opts);
    c2 = MatrixOverAlgebra::identity(n, space);
    c2.set(0, n - 1, b0);
  } else {
    c2 = embed_upper_left(column_reduce(shifted, opts), n);
  }

  MatrixOverAlgebra c = c2 * c1;
  const AlgebraElement lead = apply_to_column(c, col)[0];
  if (!is_exp1(lead, opts.tol))
    throw Error(ErrorCode::NumericalError, "reduced leading entry failed the Exp1 check");
  return c;
}

PivotSwap pivot_swap(const MatrixOverAlgebra& a) {
  const std::size_t n = a.dim();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = j + 1; i < n; ++i) {
      if (a.at(i, j).max_abs() > kNonzeroTol) {
        PivotSwap out;
        out.column = j;
        DenseMatrix s = DenseMatrix::Identity(long(n), long(n));
        if (j != 0) {
          s(0, 0) = s(long(j), long(j)) = Complex(0.0, 0.0);
          s(0, long(j)) = s(long(j), 0) = Complex(1.0, 0.0);
        }
        out.conjugator = MatrixOverAlgebra::from_constant(s, a.space());
        out.swapped = j == 0 ? a : out.conjugator * a * out.conjugator;
        return out;
      }
    }
  }
  throw Error(ErrorCode::NoLowerEntry, "matrix is upper triangular");
}

FirstRowBlocks clear_first_row(const MatrixOverAlgebra& a2, double tol) {
  const std::size_t n = a2.dim();
  if (n < 2) throw Error(ErrorCode::Config, "need n >= 2");
  FirstRowBlocks out{a2.at(0, 0), {}, {}, MatrixOverAlgebra(n - 1, a2.space())};
  if (!is_exp1(out.a11, tol))
    throw Error(ErrorCode::TopLeftNotExp1, "corner entry is not in Exp1");

  const AlgebraElement inv_a11 = invert_elem(out.a11, tol);
  for (std::size_t j = 1; j < n; ++j) out.k.push_back(elem_mul(a2.at(0, j), inv_a11));
  for (std::size_t i = 1; i < n; ++i) out.h.push_back(a2.at(i, 0));
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 1; j < n; ++j)
      out.g.set(i - 1, j - 1, a2.at(i, j) - elem_mul(out.h[i - 1], out.k[j - 1]));
  return out;
}

double choose_lambda(const AlgebraElement& a11, const MatrixOverAlgebra& g1,
                     const MatrixOverAlgebra& g2, Exec exec) {
  // lambda*G1 - a11*I and I - G2/lambda must be invertible over the algebra,
  // which over a sampled space means eigenvalue clearance at every sample.
  // The clearance floor is relative: the absolute gap between the two
  // spectra grows like lambda itself, so a fixed relative margin always
  // terminates while still keeping the block solves well conditioned.
  const Spectrum s_g1 = spectrum(g1, exec);
  const Spectrum s_g2 = spectrum(g2, exec);

  double max_a11 = a11.max_abs();
  double min_g1 = std::numeric_limits<double>::infinity();
  for (const auto& p : s_g1.points) min_g1 = std::min(min_g1, std::abs(p.value));
  if (!(min_g1 > 0.0))
    throw Error(ErrorCode::NotInvertible, "first block factor has a zero eigenvalue");

  constexpr double kRelMargin = 1e-4;
  const double lambda0 = std::max(1.0, (1.0 + max_a11) / min_g1);
  double lambda = lambda0;
  for (int k = 0; k <= 60; ++k) {
    bool ok = true;
    for (const auto& p : s_g1.points) {
      const Complex scaled = lambda * p.value;
      const Complex corner = a11.value(p.sample);
      if (std::abs(scaled - corner) <=
          kRelMargin * (std::abs(scaled) + std::abs(corner) + 1.0)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      for (const auto& q : s_g2.points) {
        const Complex shrunk = q.value / lambda;
        if (std::abs(shrunk - Complex(1.0, 0.0)) <= kRelMargin * (std::abs(shrunk) + 2.0)) {
          ok = false;
          break;
        }
      }
    }
    if (ok) return lambda;
    lambda *= 2.0;
  }
  throw Error(ErrorCode::ScheduleExhausted, "no separating lambda within 60 doublings");
}

namespace {

// solve (lambda*G1 - a11*I) X = H per sample
std::vector<AlgebraElement> solve_block_column(double lambda, const MatrixOverAlgebra& g1,
                                               const AlgebraElement& a11,
                                               const std::vector<AlgebraElement>& h, Exec exec) {
  const std::size_t m = g1.dim();
  const SpacePtr& space = g1.space();
  std::vector<std::vector<Complex>> slots(m, std::vector<Complex>(space->size()));
  for_each_sample_checked(space->size(), exec, [&](std::size_t s) {
    DenseMatrix mtx = lambda * g1.eval(s);
    for (std::size_t i = 0; i < m; ++i) mtx(long(i), long(i)) -= a11.value(s);
    Eigen::VectorXcd rhs(static_cast<long>(m));
    for (std::size_t i = 0; i < m; ++i) rhs(long(i)) = h[i].value(s);
    Eigen::PartialPivLU<DenseMatrix> lu(mtx);
    Eigen::VectorXcd x = lu.solve(rhs);
    const double resid = (mtx * x - rhs).norm();
    if (!x.allFinite() || resid > 1e-8 * (mtx.norm() * x.norm() + rhs.norm() + 1.0))
      throw Error(ErrorCode::SolveFailure, "ill-conditioned block solve", s);
    for (std::size_t i = 0; i < m; ++i) slots[i][s] = x(long(i));
  });
  std::vector<AlgebraElement> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) out.emplace_back(space, std::move(slots[i]));
  return out;
}

// solve Y (I - G2/lambda) = K per sample
std::vector<AlgebraElement> solve_block_row(double lambda, const MatrixOverAlgebra& g2,
                                            const std::vector<AlgebraElement>& k, Exec exec) {
  const std::size_t m = g2.dim();
  const SpacePtr& space = g2.space();
  std::vector<std::vector<Complex>> slots(m, std::vector<Complex>(space->size()));
  for_each_sample_checked(space->size(), exec, [&](std::size_t s) {
    DenseMatrix mtx = DenseMatrix::Identity(long(m), long(m)) - g2.eval(s) / lambda;
    Eigen::VectorXcd rhs(static_cast<long>(m));
    for (std::size_t i = 0; i < m; ++i) rhs(long(i)) = k[i].value(s);
    // row solve: y M = k  <=>  M^T y^T = k^T
    Eigen::PartialPivLU<DenseMatrix> lu(mtx.transpose().eval());
    Eigen::VectorXcd y = lu.solve(rhs);
    const double resid = (mtx.transpose() * y - rhs).norm();
    if (!y.allFinite() || resid > 1e-8 * (mtx.norm() * y.norm() + rhs.norm() + 1.0))
      throw Error(ErrorCode::SolveFailure, "ill-conditioned block solve", s);
    for (std::size_t i = 0; i < m; ++i) slots[i][s] = y(long(i));
  });
  std::vector<AlgebraElement> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) out.emplace_back(space, std::move(slots[i]));
  return out;
}

}  // namespace

BlockFactors block_decouple(double lambda, const AlgebraElement& a11,
                            const std::vector<AlgebraElement>& h, const MatrixOverAlgebra& g1,
                            const std::vector<AlgebraElement>& k, const MatrixOverAlgebra& g2,
                            const MatrixOverAlgebra& g_b1, const MatrixOverAlgebra& g_b2,
                            const AlgebraElement& a11_log, Exec exec) {
  const std::size_t m = g1.dim();
  const std::size_t n = m + 1;
  const SpacePtr& space = g1.space();
  const double log_lambda = std::log(lambda);

  const std::vector<AlgebraElement> x = solve_block_column(lambda, g1, a11, h, exec);
  const std::vector<AlgebraElement> y = solve_block_row(lambda, g2, k, exec);

  // P = [[1,0],[X,I]], Q = [[1,Y],[0,I]]; their inverses flip the sign
  MatrixOverAlgebra p = MatrixOverAlgebra::identity(n, space);
  MatrixOverAlgebra p_inv = p, q = p, q_inv = p;
  for (std::size_t i = 0; i < m; ++i) {
    p.set(i + 1, 0, x[i]);
    p_inv.set(i + 1, 0, elem_neg(x[i]));
    q.set(0, i + 1, y[i]);
    q_inv.set(0, i + 1, elem_neg(y[i]));
  }

  MatrixOverAlgebra log1(n, space);
  log1.set(0, 0, a11_log);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      AlgebraElement e = g_b1.at(i, j);
      if (i == j) e = e + AlgebraElement::constant(space, Complex(log_lambda, 0.0));
      log1.set(i + 1, j + 1, e);
    }
  MatrixOverAlgebra log2(n, space);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      AlgebraElement e = g_b2.at(i, j);
      if (i == j) e = e - AlgebraElement::constant(space, Complex(log_lambda, 0.0));
      log2.set(i + 1, j + 1, e);
    }

  return {p_inv * log1 * p, q_inv * log2 * q};
}

MatrixOverAlgebra inverse_unitriangular(const MatrixOverAlgebra& c) {
  const std::size_t n = c.dim();
  MatrixOverAlgebra nil = c - MatrixOverAlgebra::identity(n, c.space());
  MatrixOverAlgebra acc = MatrixOverAlgebra::identity(n, c.space());
  MatrixOverAlgebra power = nil;
  double sign = -1.0;
  for (std::size_t i = 1; i < n; ++i) {
    acc = acc + mat_scale(power, Complex(sign, 0.0));
    power = power * nil;
    sign = -sign;
  }
  return acc;
}

namespace {

struct RecResult {
  MatrixOverAlgebra b1;
  MatrixOverAlgebra b2;
  ReductionTrace trace;
};

RecResult factor_recursive(const MatrixOverAlgebra& a, double eps, const SearchOptions& opts);

RecResult factor_triangular_route(const MatrixOverAlgebra& a, double eps,
                                  const SearchOptions& opts) {
  const std::size_t n = a.dim();
  // determinant split: peel off exp(phi/n) I so the diagonal product is 1
  AlgebraElement phi = scalar_log_exp1(a.det(opts.exec), opts.tol);
  AlgebraElement unit = exp_pointwise(elem_scale(phi, Complex(-1.0 / double(n), 0.0)));
  MatrixOverAlgebra normalized(n, a.space());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) normalized.set(i, j, elem_mul(a.at(i, j), unit));

  TriangularFactorization tf = two_exp_triangular(normalized, eps, opts.exec);

  RecResult out{tf.b1, tf.b2, {}};
  const AlgebraElement fold = elem_scale(phi, Complex(1.0 / double(n), 0.0));
  for (std::size_t i = 0; i < n; ++i) out.b1.set(i, i, out.b1.at(i, i) + fold);
  out.trace.kind = ReductionTrace::Kind::Triangular;
  out.trace.n = n;
  out.trace.det_log = phi;
  out.trace.t_eps = tf.t_eps;
  out.trace.theta = tf.theta;
  return out;
}

RecResult factor_block_route(const MatrixOverAlgebra& a, double eps, const SearchOptions& opts) {
  const std::size_t n = a.dim();
  PivotSwap swap = pivot_swap(a);

  std::vector<AlgebraElement> col;
  col.reserve(n);
  for (std::size_t i = 0; i < n; ++i) col.push_back(swap.swapped.at(i, 0));
  MatrixOverAlgebra c = column_reduce(col, opts);
  MatrixOverAlgebra c_inv = inverse_unitriangular(c);
  MatrixOverAlgebra a2 = c * swap.swapped * c_inv;

  FirstRowBlocks blocks = clear_first_row(a2, opts.tol);
  RecResult sub = factor_recursive(blocks.g, eps, opts);
  MatrixOverAlgebra g1 = mat_exp(sub.b1, opts.exec);
  MatrixOverAlgebra g2 = mat_exp(sub.b2, opts.exec);

  const double lambda = choose_lambda(blocks.a11, g1, g2, opts.exec);
  AlgebraElement a11_log = scalar_log_exp1(blocks.a11, opts.tol);
  BlockFactors bf = block_decouple(lambda, blocks.a11, blocks.h, g1, blocks.k, g2, sub.b1,
                                   sub.b2, a11_log, opts.exec);

  // transport: A = (S C^-1) A2 (S C^-1)^-1
  MatrixOverAlgebra w = swap.conjugator * c_inv;
  MatrixOverAlgebra w_inv = c * swap.conjugator;

  RecResult out{w * bf.b1 * w_inv, w * bf.b2 * w_inv, {}};
  out.trace.kind = ReductionTrace::Kind::Block;
  out.trace.n = n;
  out.trace.pivot_col = swap.column;
  out.trace.column_c = c;
  out.trace.reduced = a2;
  out.trace.lambda = lambda;
  out.trace.a11_log = a11_log;
  out.trace.sub = std::make_unique<ReductionTrace>(std::move(sub.trace));
  return out;
}

RecResult factor_recursive(const MatrixOverAlgebra& a, double eps, const SearchOptions& opts) {
  const std::size_t n = a.dim();
  if (n == 1) {
    AlgebraElement phi = scalar_log_exp1(a.at(0, 0), opts.tol);
    MatrixOverAlgebra b1(1, a.space());
    b1.set(0, 0, phi);
    RecResult out{b1, MatrixOverAlgebra(1, a.space()), {}};
    out.trace.kind = ReductionTrace::Kind::Scalar;
    out.trace.n = 1;
    out.trace.det_log = phi;
    return out;
  }
  if (a.is_upper_triangular(kNonzeroTol) || a.is_lower_triangular(kNonzeroTol))
    return factor_triangular_route(a, eps, opts);
  return factor_block_route(a, eps, opts);
}

}  // namespace

GeneralFactorization factorize_two_exp(const MatrixOverAlgebra& a, double eps,
                                       const SearchOptions& opts) {
  const AlgebraElement det = a.det(opts.exec);
  if (!is_exp1(det, opts.tol))
    throw Error(ErrorCode::DetNotExp1,
                "determinant is not in Exp1 (vanishing or winding obstruction)");

  RecResult rec = factor_recursive(a, eps, opts);

  std::vector<SpectralClaim> claims;
  if (rec.trace.kind == ReductionTrace::Kind::Triangular && rec.trace.det_log &&
      rec.trace.det_log->max_abs() <= 1e-12) {
    claims.push_back({0, ClaimKind::EqualsSn, 0.0, false, 0.0});
    claims.push_back({1, ClaimKind::WithinNeps, eps, false, 0.0});
  }
  GeneralFactorization out{rec.b1, rec.b2,
                           verify_factorization(a, {rec.b1, rec.b2}, 1e-6, claims, opts.exec),
                           std::move(rec.trace)};
  return out;
}

std::pair<MatrixOverAlgebra, MatrixOverAlgebra> replay_trace(const MatrixOverAlgebra& a,
                                                             const ReductionTrace& trace,
                                                             Exec exec) {
  const std::size_t n = a.dim();
  if (trace.n != n) throw Error(ErrorCode::ShapeMismatch, "trace dimension mismatch");

  if (trace.kind == ReductionTrace::Kind::Scalar) {
    if (!trace.det_log) throw Error(ErrorCode::BadSpec, "scalar trace lacks its exponent");
    MatrixOverAlgebra b1(1, a.space());
    b1.set(0, 0, *trace.det_log);
    // the stored exponent must reproduce the input pointwise
    double err = 0.0;
    for (std::size_t s = 0; s < a.samples(); ++s)
      err = std::max(err, std::abs(std::exp(trace.det_log->value(s)) - a.at(0, 0).value(s)));
    if (err > 1e-9)
      throw Error(ErrorCode::VerificationFailed, "scalar exponent mismatch " + format_mag(err));
    return {b1, MatrixOverAlgebra(1, a.space())};
  }

  if (trace.kind == ReductionTrace::Kind::Triangular) {
    if (!trace.det_log) throw Error(ErrorCode::BadSpec, "triangular trace lacks the det split");
    const AlgebraElement& phi = *trace.det_log;
    AlgebraElement unit = exp_pointwise(elem_scale(phi, Complex(-1.0 / double(n), 0.0)));
    MatrixOverAlgebra normalized(n, a.space());
    bool lower = a.is_lower_triangular(kNonzeroTol) && !a.is_upper_triangular(kNonzeroTol);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) normalized.set(i, j, elem_mul(a.at(i, j), unit));

    MatrixOverAlgebra base = lower ? normalized.transpose() : normalized;
    MatrixOverAlgebra diag(n, a.space());
    for (std::size_t i = 0; i < n; ++i) diag.set(i, i, base.at(i, i));
    DiagonalFactorization df = commutator_factor_diagonal(diag, 1e-9);
    MatrixOverAlgebra at = residual_unipotent(base, Complex(trace.t_eps, 0.0), df.data);
    MatrixOverAlgebra bt = mat_log_branch(df.data.rn * at, trace.theta, exec);

    auto scale_conj = [&](const MatrixOverAlgebra& x, double t) {
      MatrixOverAlgebra out(x.dim(), x.space());
      for (std::size_t i = 0; i < x.dim(); ++i)
        for (std::size_t j = 0; j < x.dim(); ++j) {
          double f = std::pow(t, double(j) - double(i));
          out.set(i, j, elem_scale(x.at(i, j), Complex(f, 0.0)));
        }
      return out;
    };
    MatrixOverAlgebra b1 = scale_conj(df.b1, 1.0 / trace.t_eps);
    MatrixOverAlgebra b2 = scale_conj(bt, 1.0 / trace.t_eps);
    if (lower) {
      MatrixOverAlgebra tmp = b1;
      b1 = b2.transpose();
      b2 = tmp.transpose();
    }
    const AlgebraElement fold = elem_scale(phi, Complex(1.0 / double(n), 0.0));
    for (std::size_t i = 0; i < n; ++i) b1.set(i, i, b1.at(i, i) + fold);
    return {b1, b2};
  }

  // block route
  if (!trace.column_c || !trace.reduced || !trace.a11_log || !trace.sub)
    throw Error(ErrorCode::BadSpec, "block trace is incomplete");
  const std::size_t j = trace.pivot_col;
  DenseMatrix s = DenseMatrix::Identity(long(n), long(n));
  if (j != 0) {
    s(0, 0) = s(long(j), long(j)) = Complex(0.0, 0.0);
    s(0, long(j)) = s(long(j), 0) = Complex(1.0, 0.0);
  }
  MatrixOverAlgebra sm = MatrixOverAlgebra::from_constant(s, a.space());
  MatrixOverAlgebra swapped = j == 0 ? a : sm * a * sm;
  MatrixOverAlgebra c = *trace.column_c;
  MatrixOverAlgebra c_inv = inverse_unitriangular(c);
  MatrixOverAlgebra a2 = c * swapped * c_inv;
  const double drift = max_residual(a2, *trace.reduced);
  if (drift > 1e-9)
    throw Error(ErrorCode::VerificationFailed,
                "replayed reduction deviates by " + format_mag(drift));

  FirstRowBlocks blocks = clear_first_row(a2);
  auto [g_b1, g_b2] = replay_trace(blocks.g, *trace.sub, exec);
  MatrixOverAlgebra g1 = mat_exp(g_b1, exec);
  MatrixOverAlgebra g2 = mat_exp(g_b2, exec);
  BlockFactors bf = block_decouple(trace.lambda, blocks.a11, blocks.h, g1, blocks.k, g2, g_b1,
                                   g_b2, *trace.a11_log, exec);
  MatrixOverAlgebra w = sm * c_inv;
  MatrixOverAlgebra w_inv = c * sm;
  return {w * bf.b1 * w_inv, w * bf.b2 * w_inv};
}

std::vector<MatrixOverAlgebra> regroup_unitriangular(
    const std::vector<MatrixOverAlgebra>& factors) {
  const std::size_t t = factors.size();
  if (t < 2) throw Error(ErrorCode::Config, "need at least two factors");
  const std::size_t n = factors[0].dim();

  auto kind_of = [&](const MatrixOverAlgebra& m) -> int {
    bool upper = m.is_upper_triangular(1e-8);
    bool lower = m.is_lower_triangular(1e-8);
    double diag_dev = 0.0;
    for (std::size_t i = 0; i < m.dim(); ++i)
      for (std::size_t s = 0; s < m.samples(); ++s)
        diag_dev = std::max(diag_dev, std::abs(m.at(i, i).value(s) - Complex(1.0, 0.0)));
    if (diag_dev > 1e-8 || (!upper && !lower))
      throw Error(ErrorCode::NotUnitriangular, "factor is not unitriangular");
    if (upper && lower) return 2;  // identity-like, matches either slot
    return upper ? 0 : 1;
  };

  // positional alternation; identity-like factors fit either slot
  int anchor_kind = -1;
  std::size_t anchor_pos = 0;
  for (std::size_t i = 0; i < t; ++i) {
    const int k = kind_of(factors[i]);
    if (k == 2) continue;
    if (anchor_kind < 0) {
      anchor_kind = k;
      anchor_pos = i;
    } else if (k != (anchor_kind ^ int((i - anchor_pos) & 1))) {
      throw Error(ErrorCode::NotAlternating, "factors do not alternate");
    }
  }

  std::vector<MatrixOverAlgebra> out;
  MatrixOverAlgebra c = factors[0];  // running product of odd-position factors
  for (std::size_t i = 1; 2 * i <= t; ++i) {
    // term C_i A_{2i} C_i^-1 with C_i = A_1 A_3 ... A_{2i-1}; the C_i are all
    // products of one triangularity kind, so their inverses are exact
    MatrixOverAlgebra c_inv = inverse_unitriangular(c);
    out.push_back(c * factors[2 * i - 1] * c_inv);
    if (2 * i < t) c = c * factors[2 * i];
  }
  out.push_back(c);

  // product preservation and unipotence of every term
  MatrixOverAlgebra lhs = factors[0];
  for (std::size_t i = 1; i < t; ++i) lhs = lhs * factors[i];
  MatrixOverAlgebra rhs = out[0];
  for (std::size_t i = 1; i < out.size(); ++i) rhs = rhs * out[i];
  const double drift = max_residual(lhs, rhs);
  if (drift > 1e-10)
    throw Error(ErrorCode::NumericalError, "regrouped product drifted by " + format_mag(drift));
  for (const auto& f : out) {
    MatrixOverAlgebra nil = f - MatrixOverAlgebra::identity(n, f.space());
    MatrixOverAlgebra power = nil;
    for (std::size_t i = 1; i < n; ++i) power = power * nil;
    if (power.max_operator_norm() > 1e-8)
      throw Error(ErrorCode::NonUnipotentResult, "regrouped factor is not unipotent");
  }
  return out;
}

MatrixOverAlgebra single_exp_finite(const MatrixOverAlgebra& a, Exec exec) {
  if (a.space()->kind() != SpaceKind::FinitePoints)
    throw Error(ErrorCode::NotFinitePoints, "single-exponential route needs finite points");
  MatrixOverAlgebra b =
      MatrixOverAlgebra::from_sample_fn(a.dim(), a.space(), exec, [&](std::size_t p) {
        const DenseMatrix m = a.eval(p);
        const std::vector<Complex> ev = dense::eigenvalues(m);
        double min_abs = std::numeric_limits<double>::infinity();
        for (const Complex& l : ev) min_abs = std::min(min_abs, std::abs(l));
        if (!(min_abs > kDefaultInvertTol))
          throw Error(ErrorCode::NotInvertibleAtPoint, "singular at point", p);

        // each point is clopen, so it gets its own branch ray; shrink the
        // clearance requirement with the smallest eigenvalue so a ray exists
        Spectrum s;
        s.matrix_dim = a.dim();
        s.resolution = std::min(1e-3, 0.5 * min_abs);
        for (const Complex& l : ev) s.points.push_back({l, p, 1});
        const double theta = choose_branch_angle(s);
        return dense::log_branch(m, theta);
      });
  const double err = max_residual(mat_exp(b, exec), a);
  if (err > 1e-9)
    throw Error(ErrorCode::NumericalError,
                "single-exponential round trip residual " + format_mag(err));
  return b;
}

}  // namespace expfact
