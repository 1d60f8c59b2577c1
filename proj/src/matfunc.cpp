#include "expfact/matfunc.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "expfact/dense.hpp"
#include "expfact/error.hpp"

namespace expfact {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
}  // namespace

MatrixOverAlgebra mat_exp(const MatrixOverAlgebra& b, Exec exec) {
  return MatrixOverAlgebra::from_sample_fn(
      b.dim(), b.space(), exec, [&](std::size_t s) { return dense::exp(b.eval(s)); });
}

double choose_branch_angle(const Spectrum& s) {
  const std::vector<Complex> pts = s.values();
  if (pts.empty()) return kPi;
  const double rho = s.resolution;

  struct Candidate {
    double theta;
    double clearance;
    double angular;
  };
  std::vector<Candidate> cands;
  cands.reserve(720);
  for (int k = -359; k <= 360; ++k) {
    const double theta = double(k) * kPi / 360.0;
    double angular = std::numeric_limits<double>::infinity();
    for (const Complex& p : pts) {
      double d = std::remainder(std::arg(p) - theta, kTwoPi);
      angular = std::min(angular, std::abs(d));
    }
    cands.push_back({theta, ray_clearance(pts, theta), angular});
  }

  const Candidate* best = nullptr;
  for (const Candidate& c : cands) {
    if (!best) {
      best = &c;
      continue;
    }
    const double tol = 1e-9 * std::max(1.0, std::abs(best->clearance));
    if (c.clearance > best->clearance + tol) {
      best = &c;
    } else if (std::abs(c.clearance - best->clearance) <= tol) {
      if (c.angular > best->angular + 1e-12) {
        best = &c;
      } else if (std::abs(c.angular - best->angular) <= 1e-12) {
        if (std::abs(c.theta) < std::abs(best->theta) - 1e-15 ||
            (std::abs(std::abs(c.theta) - std::abs(best->theta)) <= 1e-15 &&
             c.theta > best->theta)) {
          best = &c;
        }
      }
    }
  }
  if (!best || best->clearance < rho)
    throw Error(ErrorCode::NoRayFound, "no ray clears the spectrum at its resolution");
  return best->theta;
}

namespace {

void check_log_roundtrip(const MatrixOverAlgebra& a, const MatrixOverAlgebra& l, Exec exec) {
  std::vector<double> errs(a.samples(), 0.0);
  for_each_sample_checked(a.samples(), exec, [&](std::size_t s) {
    errs[s] = (dense::exp(l.eval(s)) - a.eval(s)).operatorNorm();
  });
  for (std::size_t s = 0; s < a.samples(); ++s) {
    const double allow = 1e-8 + 1e-12 * a.eval(s).operatorNorm();
    if (!(errs[s] <= allow))
      throw Error(ErrorCode::NumericalError,
                  "log round-trip residual " + format_mag(errs[s]), s);
  }
}

}  // namespace

MatrixOverAlgebra mat_log_branch(const MatrixOverAlgebra& a, double theta, Exec exec) {
  MatrixOverAlgebra l =
      MatrixOverAlgebra::from_sample_fn(a.dim(), a.space(), exec, [&](std::size_t s) {
        const DenseMatrix m = a.eval(s);
        for (const Complex& ev : dense::eigenvalues(m)) {
          if (dense::ray_distance(ev, theta) < 1e-12 * (1.0 + std::abs(ev)))
            throw Error(ErrorCode::BranchViolation, "eigenvalue touches the cut ray", s);
        }
        return dense::log_branch(m, theta);
      });
  check_log_roundtrip(a, l, exec);
  return l;
}

namespace detail {

std::vector<Complex> polyline_cut(const std::vector<Complex>& points, double rho) {
  double min_x = 0.0, max_x = 0.0, min_y = 0.0, max_y = 0.0;
  for (const Complex& p : points) {
    min_x = std::min(min_x, p.real());
    max_x = std::max(max_x, p.real());
    min_y = std::min(min_y, p.imag());
    max_y = std::max(max_y, p.imag());
  }
  const double pad = 3.0 * rho;
  min_x -= pad;
  min_y -= pad;
  max_x += pad;
  max_y += pad;
  const double h = rho / 2.0;
  const long nx = long(std::ceil((max_x - min_x) / h)) + 1;
  const long ny = long(std::ceil((max_y - min_y) / h)) + 1;
  if (nx <= 0 || ny <= 0 || nx * ny > 16'000'000)
    throw Error(ErrorCode::Ambiguous, "raster too large at this resolution");

  std::vector<char> blocked(std::size_t(nx * ny), 0);
  for (long cy = 0; cy < ny; ++cy)
    for (long cx = 0; cx < nx; ++cx) {
      const Complex center(min_x + (cx + 0.5) * h, min_y + (cy + 0.5) * h);
      for (const Complex& p : points)
        if (std::abs(p - center) <= rho) {
          blocked[std::size_t(cy * nx + cx)] = 1;
          break;
        }
    }

  auto cell_of = [&](Complex p) {
    long cx = std::clamp(long((p.real() - min_x) / h), 0L, nx - 1);
    long cy = std::clamp(long((p.imag() - min_y) / h), 0L, ny - 1);
    return std::pair<long, long>(cx, cy);
  };
  auto [zx, zy] = cell_of(Complex(0.0, 0.0));
  blocked[std::size_t(zy * nx + zx)] = 0;

  // BFS from the zero cell to any border cell through free cells
  std::vector<long> parent(std::size_t(nx * ny), -1);
  std::deque<long> queue;
  const long start = zy * nx + zx;
  parent[std::size_t(start)] = start;
  queue.push_back(start);
  long exit_cell = -1;
  while (!queue.empty() && exit_cell < 0) {
    const long cur = queue.front();
    queue.pop_front();
    const long cx = cur % nx, cy = cur / nx;
    if (cx == 0 || cy == 0 || cx == nx - 1 || cy == ny - 1) {
      exit_cell = cur;
      break;
    }
    const long nbr[4] = {cur + 1, cur - 1, cur + nx, cur - nx};
    for (long nb : nbr) {
      if (nb < 0 || nb >= nx * ny) continue;
      const long bx = nb % nx;
      if (std::abs(bx - cx) > 1) continue;  // row wrap guard
      if (parent[std::size_t(nb)] >= 0 || blocked[std::size_t(nb)]) continue;
      parent[std::size_t(nb)] = cur;
      queue.push_back(nb);
    }
  }
  if (exit_cell < 0)
    throw Error(ErrorCode::NotInSigmaN, "no free path from 0 to the far field");

  std::vector<Complex> path;
  for (long c = exit_cell;; c = parent[std::size_t(c)]) {
    const long cx = c % nx, cy = c / nx;
    path.emplace_back(min_x + (cx + 0.5) * h, min_y + (cy + 0.5) * h);
    if (parent[std::size_t(c)] == c) break;
  }
  std::reverse(path.begin(), path.end());
  path.front() = Complex(0.0, 0.0);  // anchor the cut at the branch point

  // extend the last leg radially well past every spectrum point
  double extent = 0.0;
  for (const Complex& p : points) extent = std::max(extent, std::abs(p));
  Complex dir = path.back() - (path.size() > 1 ? path[path.size() - 2] : Complex(0, 0));
  if (std::abs(dir) == 0.0) dir = Complex(1.0, 0.0);
  dir /= std::abs(dir);
  path.push_back(path.back() + dir * (10.0 * extent + 10.0 * rho + 10.0));
  return path;
}

Complex log_along_cut(Complex z, const std::vector<Complex>& cut) {
  // The branch equals the principal log plus 2*pi*i times a locally constant
  // integer that jumps across the cut but not across the principal ray. That
  // integer is (minus) the winding around z of the closed curve made of the
  // principal ray coming in from far away, the cut polyline going out, and a
  // far counterclockwise arc joining the two ends. Growing the arc radius
  // with |z| never changes the winding, so evaluations stay consistent.
  double far = 10.0;
  for (const Complex& q : cut) far = std::max(far, 2.0 * std::abs(q));
  far = std::max(far, 2.0 * std::abs(z));

  std::vector<Complex> poly;
  poly.reserve(cut.size() + 20);
  poly.emplace_back(-far, 0.0);
  for (const Complex& q : cut) poly.push_back(q);
  const double alpha = std::arg(poly.back());
  const int arc_steps = std::max(1, int(std::ceil((kPi - alpha) / (kPi / 8.0))));
  for (int k = 1; k <= arc_steps; ++k) {
    const double ang = alpha + (kPi - alpha) * double(k) / double(arc_steps);
    poly.push_back(std::polar(far, ang));
  }
  poly.emplace_back(-far, 0.0);

  // nudge axis-bound points off the principal-ray leg, matching the
  // arg -> +pi convention there (and force +0.0 imag so std::log agrees)
  Complex zq = z;
  if (zq.imag() == 0.0 && zq.real() < 0.0) {
    z = Complex(z.real(), +0.0);
    zq = z + Complex(0.0, 1e-14 * (1.0 + std::abs(z)));
  }

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < poly.size(); ++i)
    total += std::arg((poly[i + 1] - zq) / (poly[i] - zq));
  const long w = std::lround(total / kTwoPi);
  return std::log(z) + Complex(0.0, -kTwoPi * double(w));
}

}  // namespace detail

DirectLogResult direct_log(const MatrixOverAlgebra& a, Exec exec) {
  const Spectrum s = spectrum(a, exec);
  if (!zero_in_unbounded_component(s))
    throw Error(ErrorCode::NotInSigmaN,
                "0 is enclosed by the spectrum; no functional-calculus logarithm");

  DirectLogResult out;
  try {
    out.theta = choose_branch_angle(s);
    out.used_ray = true;
    out.log = mat_log_branch(a, out.theta, exec);
    return out;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoRayFound) throw;
  }

  // No single ray clears: thread a cut through the free cells instead and
  // take the logarithm eigenvalue-wise along that branch.
  out.used_ray = false;
  out.cut = detail::polyline_cut(s.values(), s.resolution);
  out.log = MatrixOverAlgebra::from_sample_fn(a.dim(), a.space(), exec, [&](std::size_t smp) {
    const DenseMatrix m = a.eval(smp);
    Eigen::ComplexEigenSolver<DenseMatrix> es(m, /*computeEigenvectors=*/true);
    if (es.info() != Eigen::Success)
      throw Error(ErrorCode::NumericalError, "eigendecomposition failed", smp);
    DenseMatrix v = es.eigenvectors();
    Eigen::VectorXcd lam = es.eigenvalues();
    for (long i = 0; i < lam.size(); ++i)
      lam(i) = detail::log_along_cut(lam(i), out.cut);
    DenseMatrix l = v * lam.asDiagonal() * v.partialPivLu().inverse();
    const double err = (dense::exp(l) - m).operatorNorm();
    if (!(err <= 1e-8 + 1e-10 * m.operatorNorm()))
      throw Error(ErrorCode::NoRayFound,
                  "polyline-cut logarithm failed verification (defective sample?)", smp);
    return l;
  });
  return out;
}

MatrixOverAlgebra log_unipotent(const MatrixOverAlgebra& a) {
  const std::size_t n = a.dim();
  const MatrixOverAlgebra nil = a - MatrixOverAlgebra::identity(n, a.space());
  MatrixOverAlgebra power = nil;
  for (std::size_t i = 1; i < n; ++i) power = power * nil;  // nil^n
  const double defect = power.max_operator_norm();
  if (!(defect <= 1e-8))
    throw Error(ErrorCode::NotUnipotent,
                "(A - I)^n has norm " + format_mag(defect));

  MatrixOverAlgebra acc = nil;  // i = 1 term
  MatrixOverAlgebra pw = nil;
  for (std::size_t i = 2; i < n; ++i) {
    pw = pw * nil;
    const double coeff = (i % 2 == 0 ? -1.0 : 1.0) / double(i);
    acc = acc + mat_scale(pw, Complex(coeff, 0.0));
  }
  return acc;
}

AlgebraElement scalar_log_exp1(const AlgebraElement& a, double tol) {
  if (!is_exp1(a, tol))
    throw Error(ErrorCode::NotExp1, "element is not in the exponential subgroup");
  const SpacePtr& sp = a.space();
  const std::size_t count = sp->size();
  std::vector<Complex> out(count);

  auto unwrap_step = [](Complex prev_log, Complex prev_val, Complex val) {
    return prev_log + std::log(val / prev_val);
  };

  switch (sp->kind()) {
    case SpaceKind::FinitePoints:
      for (std::size_t i = 0; i < count; ++i) out[i] = std::log(a.value(i));
      break;
    case SpaceKind::IntervalPath:
    case SpaceKind::CirclePath:
      out[0] = std::log(a.value(0));
      for (std::size_t i = 1; i < count; ++i)
        out[i] = unwrap_step(out[i - 1], a.value(i - 1), a.value(i));
      break;
    case SpaceKind::DiskGrid: {
      const std::size_t b = sp->boundary_count();
      out[0] = std::log(a.value(0));
      for (std::size_t j = 1; j < b; ++j)
        out[j] = unwrap_step(out[j - 1], a.value(j - 1), a.value(j));
      // rings are aligned in angle with the boundary; unwrap each radial
      // chain inward from its boundary sample
      const std::size_t interior = count - b;          // center + rings
      const std::size_t rings = interior == 0 ? 0 : (interior - 1) / b;
      for (std::size_t j = 0; j < b; ++j) {
        std::size_t prev = j;
        for (std::size_t k = rings; k >= 1; --k) {
          const std::size_t idx = b + 1 + (k - 1) * b + j;
          out[idx] = unwrap_step(out[prev], a.value(prev), a.value(idx));
          prev = idx;
        }
        if (j == 0) out[b] = unwrap_step(out[prev], a.value(prev), a.value(b));
      }
      break;
    }
  }
  return AlgebraElement(sp, std::move(out));
}

}  // namespace expfact
