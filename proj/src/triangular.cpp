#include "expfact/triangular.hpp"

#include <cmath>

#include "expfact/error.hpp"

namespace expfact {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// entrywise diagonal conjugation: (diag(d)^-1 X diag(d))_{ij} = x_ij d_j / d_i
MatrixOverAlgebra conjugate_by_diagonal(const MatrixOverAlgebra& x,
                                        const std::vector<AlgebraElement>& d,
                                        const std::vector<AlgebraElement>& d_inv) {
  MatrixOverAlgebra out(x.dim(), x.space());
  for (std::size_t i = 0; i < x.dim(); ++i)
    for (std::size_t j = 0; j < x.dim(); ++j)
      out.set(i, j, elem_mul(elem_mul(x.at(i, j), d[j]), d_inv[i]));
  return out;
}

// (Dn(t)^-1 X Dn(t))_{ij} = x_ij * t^{j-i}; with t a power of two the scale
// factors are exact
MatrixOverAlgebra scale_conjugate(const MatrixOverAlgebra& x, Complex t) {
  MatrixOverAlgebra out(x.dim(), x.space());
  for (std::size_t i = 0; i < x.dim(); ++i)
    for (std::size_t j = 0; j < x.dim(); ++j) {
      Complex f(1.0, 0.0);
      if (j >= i)
        for (std::size_t k = 0; k < j - i; ++k) f *= t;
      else
        for (std::size_t k = 0; k < i - j; ++k) f /= t;
      out.set(i, j, elem_scale(x.at(i, j), f));
    }
  return out;
}

}  // namespace

MatrixOverAlgebra cyclic_shift(std::size_t n, const SpacePtr& space) {
  if (n < 2) throw Error(ErrorCode::Config, "cyclic shift needs n >= 2");
  DenseMatrix r = DenseMatrix::Zero(long(n), long(n));
  for (std::size_t i = 0; i < n; ++i) r(long((i + 1) % n), long(i)) = Complex(1.0, 0.0);
  return MatrixOverAlgebra::from_constant(r, space);
}

MatrixOverAlgebra log_cyclic(std::size_t n, const SpacePtr& space) {
  if (n < 2) throw Error(ErrorCode::Config, "cyclic shift needs n >= 2");
  // eigenvector k of the cycle is (w^{jk})_j with eigenvalue w^{-k}; map each
  // eigenvalue angle into (-pi, pi] and assemble F diag(i*angle) F^*
  DenseMatrix l = DenseMatrix::Zero(long(n), long(n));
  std::vector<double> angle(n);
  for (std::size_t k = 0; k < n; ++k) {
    double a = -kTwoPi * double(k) / double(n);
    while (a <= -kPi) a += kTwoPi;
    while (a > kPi) a -= kTwoPi;
    angle[k] = a;
  }
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      Complex acc(0.0, 0.0);
      for (std::size_t k = 0; k < n; ++k) {
        double phase = kTwoPi * double(k) * (double(p) - double(q)) / double(n);
        acc += Complex(0.0, angle[k]) * Complex(std::cos(phase), std::sin(phase));
      }
      l(long(p), long(q)) = acc / double(n);
    }
  return MatrixOverAlgebra::from_constant(l, space);
}

DiagonalFactorization commutator_factor_diagonal(const MatrixOverAlgebra& d,
                                                 double product_tol) {
  const std::size_t n = d.dim();
  if (n < 2) throw Error(ErrorCode::Config, "need n >= 2");
  if (!d.is_diagonal(1e-8)) throw Error(ErrorCode::NotDiagonal, "input has off-diagonal mass");

  std::vector<AlgebraElement> diag, diag_inv;
  for (std::size_t i = 0; i < n; ++i) {
    diag.push_back(d.at(i, i));
    diag_inv.push_back(invert_elem(d.at(i, i)));
  }
  AlgebraElement prod = diag[0];
  for (std::size_t i = 1; i < n; ++i) prod = elem_mul(prod, diag[i]);
  double dev = 0.0;
  for (std::size_t s = 0; s < d.samples(); ++s)
    dev = std::max(dev, std::abs(prod.value(s) - Complex(1.0, 0.0)));
  if (dev > product_tol)
    throw Error(ErrorCode::ProductNotOne,
                "diagonal product deviates from 1 by " + format_mag(dev));

  DiagonalFactorization out{
      {MatrixOverAlgebra(n, d.space()), cyclic_shift(n, d.space()), log_cyclic(n, d.space())},
      MatrixOverAlgebra(n, d.space()),
      MatrixOverAlgebra(n, d.space())};

  std::vector<AlgebraElement> c(n), c_inv(n);
  c[0] = AlgebraElement::constant(d.space(), Complex(1.0, 0.0));
  c_inv[0] = c[0];
  for (std::size_t i = 1; i < n; ++i) {
    c[i] = elem_mul(c[i - 1], diag[i - 1]);
    c_inv[i] = elem_mul(c_inv[i - 1], diag_inv[i - 1]);
  }
  MatrixOverAlgebra cm(n, d.space());
  for (std::size_t i = 0; i < n; ++i) cm.set(i, i, c[i]);
  out.data.c = cm;

  out.b2 = out.data.rn_log;
  out.b1 = mat_neg(conjugate_by_diagonal(out.data.rn_log, c, c_inv));

  // construction invariant: C^-1 Rn^-1 C Rn reproduces D
  MatrixOverAlgebra recon = conjugate_by_diagonal(out.data.rn.transpose(), c, c_inv) * out.data.rn;
  const double err = max_residual(recon, d);
  if (err > 1e-10)
    throw Error(ErrorCode::NumericalError,
                "commutator identity residual " + format_mag(err));
  return out;
}

MatrixOverAlgebra scale_matrix(Complex t, std::size_t n, const SpacePtr& space) {
  if (std::abs(t) == 0.0) throw Error(ErrorCode::Config, "scale parameter must be nonzero");
  MatrixOverAlgebra out(n, space);
  Complex power(1.0, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    out.set(i, i, AlgebraElement::constant(space, power));
    power *= t;
  }
  return out;
}

MatrixOverAlgebra residual_unipotent(const MatrixOverAlgebra& a, Complex t,
                                     const CommutatorData& cd) {
  if (std::abs(t) == 0.0) throw Error(ErrorCode::Config, "t must be nonzero");
  const std::size_t n = a.dim();
  if (!a.is_upper_triangular(1e-8))
    throw Error(ErrorCode::NotTriangular, "residual needs an upper triangular input");

  // Rn^-1 C^-1 Rn C, the inverse of the commutator, times the t-conjugated A
  std::vector<AlgebraElement> c(n), c_inv(n);
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = cd.c.at(i, i);
    c_inv[i] = invert_elem(cd.c.at(i, i));
  }
  MatrixOverAlgebra inv_comm =
      cd.rn.transpose() * conjugate_by_diagonal(cd.rn, c, c_inv);
  MatrixOverAlgebra at = inv_comm * scale_conjugate(a, t);

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      AlgebraElement e = at.at(i, j);
      if (i == j) e = e - AlgebraElement::constant(a.space(), Complex(1.0, 0.0));
      const double mag = e.max_abs();
      if (i >= j && mag > 1e-8)
        throw Error(ErrorCode::NonUnipotentResult,
                    "residual is not unipotent triangular (entry " + std::to_string(i) +
                        "," + std::to_string(j) + " = " + format_mag(mag) + ")");
    }
  return at;
}

double choose_t(const MatrixOverAlgebra& a, double eps, const CommutatorData& cd, Exec exec) {
  const std::size_t n = a.dim();
  if (!(eps > 0.0 && eps < std::sin(kPi / double(n))))
    throw Error(ErrorCode::Config,
                "eps must lie in (0, sin(pi/n)) so the disks around the roots "
                "stay disjoint and clear of 0");
  const EpsNeighborhood neigh{n, eps};
  double t = 1.0;
  for (int k = 0; k <= 60; ++k) {
    MatrixOverAlgebra shifted = cd.rn * residual_unipotent(a, Complex(t, 0.0), cd);
    if (in_eps_neighborhood(spectrum(shifted, exec), neigh)) return t;
    t *= 0.5;
  }
  throw Error(ErrorCode::ScheduleExhausted, "no admissible t within 60 halvings");
}

TriangularFactorization two_exp_triangular(const MatrixOverAlgebra& a, double eps, Exec exec) {
  const std::size_t n = a.dim();
  if (n < 2) throw Error(ErrorCode::Config, "need n >= 2");

  if (!a.is_upper_triangular(1e-8)) {
    if (!a.is_lower_triangular(1e-8))
      throw Error(ErrorCode::NotTriangular, "input is neither upper nor lower triangular");
    // factor the transpose and swap: A = exp(B2~^T) exp(B1~^T)
    TriangularFactorization up = two_exp_triangular(a.transpose(), eps, exec);
    TriangularFactorization out;
    out.b1 = up.b2.transpose();
    out.b2 = up.b1.transpose();
    out.t_eps = up.t_eps;
    out.theta = up.theta;
    out.certificate = verify_factorization(
        a, {out.b1, out.b2}, 1e-7,
        {{0, ClaimKind::WithinNeps, eps, false, 0.0}, {1, ClaimKind::EqualsSn, 0.0, false, 0.0}},
        exec);
    return out;
  }

  // diagonal part, invertibility, and the product-one requirement
  MatrixOverAlgebra diag(n, a.space());
  AlgebraElement prod = a.at(0, 0);
  for (std::size_t i = 0; i < n; ++i) {
    diag.set(i, i, a.at(i, i));
    if (i > 0) prod = elem_mul(prod, a.at(i, i));
  }
  double dev = 0.0;
  for (std::size_t s = 0; s < a.samples(); ++s)
    dev = std::max(dev, std::abs(prod.value(s) - Complex(1.0, 0.0)));
  if (dev > 1e-9)
    throw Error(ErrorCode::ProductNotOne,
                "diagonal product deviates from 1 by " + format_mag(dev));

  DiagonalFactorization df = commutator_factor_diagonal(diag, 1e-9);
  const double t = choose_t(a, eps, df.data, exec);
  MatrixOverAlgebra at = residual_unipotent(a, Complex(t, 0.0), df.data);
  MatrixOverAlgebra shifted = df.data.rn * at;

  const Spectrum s = spectrum(shifted, exec);
  const double theta = choose_branch_angle(s);
  MatrixOverAlgebra bt = mat_log_branch(shifted, theta, exec);

  TriangularFactorization out;
  out.t_eps = t;
  out.theta = theta;
  // conjugate both factors by Dn(t): powers of the halving schedule are
  // powers of two, so this scaling is exact
  out.b1 = scale_conjugate(df.b1, Complex(1.0, 0.0) / t);
  out.b2 = scale_conjugate(bt, Complex(1.0, 0.0) / t);
  out.certificate = verify_factorization(
      a, {out.b1, out.b2}, 1e-7,
      {{0, ClaimKind::EqualsSn, 0.0, false, 0.0}, {1, ClaimKind::WithinNeps, eps, false, 0.0}},
      exec);
  return out;
}

}  // namespace expfact
