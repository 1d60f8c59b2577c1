#include "expfact/dense.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "expfact/error.hpp"

namespace expfact::dense {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Eigen::VectorXd balance(Matrix& a) {
  const long n = a.rows();
  Eigen::VectorXd d = Eigen::VectorXd::Ones(n);
  if (n < 2) return d;
  bool converged = false;
  int sweeps = 0;
  while (!converged && sweeps++ < 32) {
    converged = true;
    for (long i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (long j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double f = 1.0;
      const double s = c + r;
      while (c < r / 2.0) {
        c *= 2.0;
        r /= 2.0;
        f *= 2.0;
      }
      while (c >= r * 2.0) {
        c /= 2.0;
        r *= 2.0;
        f /= 2.0;
      }
      if (c + r < 0.95 * s) {
        converged = false;
        d(i) *= f;
        // A <- D^-1 A D restricted to index i: row i scaled by 1/f, col i by f
        for (long j = 0; j < n; ++j) a(i, j) /= f;
        for (long j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
  return d;
}

std::vector<Complex> eigenvalues(const Matrix& a) {
  Matrix b = a;
  balance(b);
  Eigen::ComplexSchur<Matrix> schur(b, /*computeU=*/false);
  if (schur.info() != Eigen::Success)
    throw Error(ErrorCode::NumericalError, "complex Schur iteration failed");
  std::vector<Complex> ev(std::size_t(a.rows()));
  for (long i = 0; i < a.rows(); ++i) ev[std::size_t(i)] = schur.matrixT()(i, i);
  std::sort(ev.begin(), ev.end(), [](Complex x, Complex y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  return ev;
}

namespace {

// diagonal Pade orders and the corresponding 1-norm thresholds
const double kExpTheta[5] = {1.495585217958292e-2, 2.539398330063230e-1,
                             9.504178996162932e-1, 2.097847961257068,
                             5.371920351148152};

Matrix pade_exp(const Matrix& a, int order) {
  const long n = a.rows();
  const Matrix id = Matrix::Identity(n, n);
  auto ratio = [&](const Matrix& u, const Matrix& v) {
    // (v - u)^-1 (v + u)
    return (v - u).partialPivLu().solve(v + u).eval();
  };
  const Matrix a2 = a * a;
  if (order == 3) {
    const double b[] = {120, 60, 12, 1};
    Matrix u = a * (b[3] * a2 + b[1] * id);
    Matrix v = b[2] * a2 + b[0] * id;
    return ratio(u, v);
  }
  if (order == 5) {
    const double b[] = {30240, 15120, 3360, 420, 30, 1};
    const Matrix a4 = a2 * a2;
    Matrix u = a * (b[5] * a4 + b[3] * a2 + b[1] * id);
    Matrix v = b[4] * a4 + b[2] * a2 + b[0] * id;
    return ratio(u, v);
  }
  if (order == 7) {
    const double b[] = {17297280, 8648640, 1995840, 277200, 25200, 1512, 56, 1};
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a4 * a2;
    Matrix u = a * (b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
    Matrix v = b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
    return ratio(u, v);
  }
  if (order == 9) {
    const double b[] = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                        30270240.0,    2162160.0,    110880.0,     3960.0,
                        90.0,          1.0};
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a4 * a2;
    const Matrix a8 = a6 * a2;
    Matrix u = a * (b[9] * a8 + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
    Matrix v = b[8] * a8 + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
    return ratio(u, v);
  }
  // order 13
  const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                      1187353796428800.0,  129060195264000.0,   10559470521600.0,
                      670442572800.0,      33522128640.0,       1323241920.0,
                      40840800.0,          960960.0,            16380.0,
                      182.0,               1.0};
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  Matrix u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                  b[3] * a2 + b[1] * id);
  Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
             b[2] * a2 + b[0] * id;
  return ratio(u, v);
}

double norm1(const Matrix& a) {
  double best = 0.0;
  for (long j = 0; j < a.cols(); ++j) {
    double c = 0.0;
    for (long i = 0; i < a.rows(); ++i) c += std::abs(a(i, j));
    best = std::max(best, c);
  }
  return best;
}

}  // namespace

Matrix exp(const Matrix& a) {
  Matrix b = a;
  Eigen::VectorXd d = balance(b);
  const double nrm = norm1(b);
  Matrix e;
  if (nrm <= kExpTheta[0]) {
    e = pade_exp(b, 3);
  } else if (nrm <= kExpTheta[1]) {
    e = pade_exp(b, 5);
  } else if (nrm <= kExpTheta[2]) {
    e = pade_exp(b, 7);
  } else if (nrm <= kExpTheta[3]) {
    e = pade_exp(b, 9);
  } else {
    int s = std::max(0, int(std::ceil(std::log2(nrm / kExpTheta[4]))));
    if (s > 1021) throw Error(ErrorCode::NumericalError, "exp argument too large to scale");
    Matrix scaled = b / std::exp2(double(s));
    e = pade_exp(scaled, 13);
    for (int k = 0; k < s; ++k) e = e * e;
  }
  if (!e.allFinite()) throw Error(ErrorCode::NumericalError, "overflow in matrix exponential");
  // undo balancing: exp(D B D^-1) = D exp(B) D^-1, exact for power-of-two D
  for (long i = 0; i < e.rows(); ++i)
    for (long j = 0; j < e.cols(); ++j) e(i, j) *= d(i) / d(j);
  return e;
}

double ray_distance(Complex p, double theta) {
  const Complex dir(std::cos(theta), std::sin(theta));
  const Complex w = p * std::conj(dir);  // rotate ray onto positive real axis
  if (w.real() >= 0.0) return std::abs(w.imag());
  return std::abs(w);
}

namespace {

// principal square root of an upper triangular matrix
Matrix sqrt_triangular(const Matrix& t) {
  const long n = t.rows();
  Matrix u = Matrix::Zero(n, n);
  for (long i = 0; i < n; ++i) u(i, i) = std::sqrt(t(i, i));
  for (long gap = 1; gap < n; ++gap) {
    for (long i = 0; i + gap < n; ++i) {
      const long j = i + gap;
      Complex s = t(i, j);
      for (long k = i + 1; k < j; ++k) s -= u(i, k) * u(k, j);
      const Complex den = u(i, i) + u(j, j);
      // principal sqrts live in the right half plane, so the denominator can
      // only degenerate when eigenvalues straddle the cut
      if (std::abs(den) < 1e-12 * (std::abs(u(i, i)) + std::abs(u(j, j)) + 1.0))
        throw Error(ErrorCode::BranchViolation, "eigenvalues straddle the branch cut");
      u(i, j) = s / den;
    }
  }
  return u;
}

struct GaussLegendre {
  std::vector<double> nodes;    // on [0,1]
  std::vector<double> weights;  // sum to 1
};

// nodes/weights of the m-point rule on [-1,1] by Newton on the Legendre
// polynomial, shifted to [0,1]
GaussLegendre gauss_legendre(int m) {
  GaussLegendre g;
  g.nodes.resize(std::size_t(m));
  g.weights.resize(std::size_t(m));
  for (int i = 0; i < m; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (m + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = m * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= m; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = m * (x * p1 - p0) / (x * x - 1.0);
    g.nodes[std::size_t(i)] = 0.5 * (x + 1.0);
    g.weights[std::size_t(i)] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return g;
}

// log(I + X) for triangular X of small norm, via the diagonal Pade
// approximant in partial fraction form
Matrix pade_log_triangular(const Matrix& x) {
  static const GaussLegendre g = gauss_legendre(9);
  const long n = x.rows();
  Matrix acc = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    Matrix den = Matrix::Identity(n, n) + g.nodes[i] * x;
    acc += g.weights[i] * den.triangularView<Eigen::Upper>().solve(x);
  }
  return acc;
}

Matrix log_triangular(Matrix t, long max_sqrts = 64) {
  const long n = t.rows();
  long k = 0;
  while (norm1(t - Matrix::Identity(n, n)) > 0.2) {
    if (++k > max_sqrts)
      throw Error(ErrorCode::NumericalError, "inverse scaling did not contract");
    t = sqrt_triangular(t);
  }
  return std::exp2(double(k)) * pade_log_triangular(t - Matrix::Identity(n, n));
}

}  // namespace

Matrix log_branch(const Matrix& a, double cut_angle) {
  // rotate the cut onto the negative real axis, take the principal log there,
  // then add the rotation back: log_cut(A) = log_p(e^{-i phi} A) + i phi I
  const double phi = cut_angle - kPi;
  const Complex rot = std::polar(1.0, -phi);

  Matrix b = a * rot;
  Eigen::VectorXd d = balance(b);
  Eigen::ComplexSchur<Matrix> schur(b, /*computeU=*/true);
  if (schur.info() != Eigen::Success)
    throw Error(ErrorCode::NumericalError, "complex Schur iteration failed");
  const Matrix& t = schur.matrixT();
  for (long i = 0; i < t.rows(); ++i) {
    if (std::abs(t(i, i)) == 0.0)
      throw Error(ErrorCode::BranchViolation, "zero eigenvalue has no logarithm");
  }
  Matrix lt = log_triangular(t);
  Matrix l = schur.matrixU() * lt * schur.matrixU().adjoint();
  for (long i = 0; i < l.rows(); ++i)
    for (long j = 0; j < l.cols(); ++j) l(i, j) *= d(i) / d(j);
  l += Complex(0.0, phi) * Matrix::Identity(l.rows(), l.cols());
  return l;
}

}  // namespace expfact::dense
