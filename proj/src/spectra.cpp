#include "expfact/spectra.hpp"

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
constexpr double kResolutionFloor = 1e-3;
}  // namespace

Spectrum spectrum(const MatrixOverAlgebra& a, Exec exec) {
  const std::size_t count = a.samples();
  const std::size_t n = a.dim();
  std::vector<std::vector<Complex>> per_sample(count);
  for_each_sample_checked(count, exec, [&](std::size_t s) {
    try {
      per_sample[s] = dense::eigenvalues(a.eval(s));
    } catch (const Error& e) {
      throw Error(e.code(), "eigenvalue solve failed", s);
    }
  });

  Spectrum out;
  out.matrix_dim = n;
  out.points.reserve(count * n);
  for (std::size_t s = 0; s < count; ++s)
    for (const Complex& v : per_sample[s]) out.points.push_back({v, s, 1});

  double max_gap = 0.0;
  for (const auto& [p, q] : a.space()->adjacency())
    max_gap = std::max(max_gap, hausdorff_distance(per_sample[p], per_sample[q]));
  out.resolution = std::max(2.0 * max_gap, kResolutionFloor);
  return out;
}

std::vector<Complex> roots_of_unity(std::size_t n) {
  std::vector<Complex> r(n);
  for (std::size_t k = 0; k < n; ++k) {
    double t = kTwoPi * double(k) / double(n);
    r[k] = Complex(std::cos(t), std::sin(t));
  }
  return r;
}

double distance_to_roots(Complex z, std::size_t n) {
  double best = std::numeric_limits<double>::infinity();
  for (const Complex& r : roots_of_unity(n)) best = std::min(best, std::abs(z - r));
  return best;
}

double hausdorff_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  auto one_sided = [](const std::vector<Complex>& x, const std::vector<Complex>& y) {
    double worst = 0.0;
    for (const Complex& p : x) {
      double best = std::numeric_limits<double>::infinity();
      for (const Complex& q : y) best = std::min(best, std::abs(p - q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

double ray_clearance(const std::vector<Complex>& points, double theta) {
  double best = std::numeric_limits<double>::infinity();
  for (const Complex& p : points) best = std::min(best, dense::ray_distance(p, theta));
  return best;
}

bool in_eps_neighborhood(const Spectrum& s, const EpsNeighborhood& n) {
  for (const auto& p : s.points)
    if (distance_to_roots(p.value, n.order) > n.eps) return false;
  return true;
}

WindingResult winding_number(const std::vector<Complex>& values, bool closed) {
  if (values.size() < 2) throw Error(ErrorCode::Undersampled, "need at least two samples");
  for (std::size_t i = 0; i < values.size(); ++i)
    if (std::abs(values[i]) == 0.0)
      throw Error(ErrorCode::ZeroOnPath, "value vanishes on the path", i);

  const std::size_t steps = closed ? values.size() : values.size() - 1;
  double total = 0.0;
  for (std::size_t i = 0; i < steps; ++i) {
    const Complex a = values[i];
    const Complex b = values[(i + 1) % values.size()];
    const double inc = std::arg(b / a);
    if (std::abs(inc) >= kPi * (1.0 - 1e-9))
      throw Error(ErrorCode::Undersampled, "phase increment reaches pi", i);
    total += inc;
  }

  WindingResult r;
  r.turns = total / kTwoPi;
  r.closed = closed;
  if (closed) {
    r.integer = std::lround(r.turns);
    r.residual = std::abs(r.turns - double(r.integer));
  }
  return r;
}

namespace detail {

bool flood_reaches_zero(const std::vector<Complex>& points, double rho) {
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
    throw Error(ErrorCode::Ambiguous,
                "raster too large at this resolution; refine the spectrum");

  // hash points into cells so the blocking test only scans nearby ones
  std::vector<std::vector<std::size_t>> buckets(std::size_t(nx * ny));
  auto cell_of = [&](Complex p) {
    long cx = std::clamp(long((p.real() - min_x) / h), 0L, nx - 1);
    long cy = std::clamp(long((p.imag() - min_y) / h), 0L, ny - 1);
    return std::pair<long, long>(cx, cy);
  };
  for (std::size_t k = 0; k < points.size(); ++k) {
    auto [cx, cy] = cell_of(points[k]);
    buckets[std::size_t(cy * nx + cx)].push_back(k);
  }

  const long reach = long(std::ceil(rho / h)) + 1;
  std::vector<char> blocked(std::size_t(nx * ny), 0);
  for (long cy = 0; cy < ny; ++cy) {
    for (long cx = 0; cx < nx; ++cx) {
      const Complex center(min_x + (cx + 0.5) * h, min_y + (cy + 0.5) * h);
      bool hit = false;
      for (long by = std::max(0L, cy - reach); by <= std::min(ny - 1, cy + reach) && !hit; ++by)
        for (long bx = std::max(0L, cx - reach); bx <= std::min(nx - 1, cx + reach) && !hit; ++bx)
          for (std::size_t k : buckets[std::size_t(by * nx + bx)])
            if (std::abs(points[k] - center) <= rho) {
              hit = true;
              break;
            }
      blocked[std::size_t(cy * nx + cx)] = hit ? 1 : 0;
    }
  }

  // the cell holding 0 is kept free: the caller guarantees 0 itself clears
  // the disks, only the cell-center test may disagree
  auto [zx, zy] = cell_of(Complex(0.0, 0.0));
  blocked[std::size_t(zy * nx + zx)] = 0;

  std::vector<char> seen(std::size_t(nx * ny), 0);
  std::deque<std::pair<long, long>> queue;
  auto push = [&](long cx, long cy) {
    if (cx < 0 || cy < 0 || cx >= nx || cy >= ny) return;
    std::size_t idx = std::size_t(cy * nx + cx);
    if (seen[idx] || blocked[idx]) return;
    seen[idx] = 1;
    queue.emplace_back(cx, cy);
  };
  for (long cx = 0; cx < nx; ++cx) {
    push(cx, 0);
    push(cx, ny - 1);
  }
  for (long cy = 0; cy < ny; ++cy) {
    push(0, cy);
    push(nx - 1, cy);
  }
  while (!queue.empty()) {
    auto [cx, cy] = queue.front();
    queue.pop_front();
    push(cx + 1, cy);
    push(cx - 1, cy);
    push(cx, cy + 1);
    push(cx, cy - 1);
  }
  return seen[std::size_t(zy * nx + zx)] != 0;
}

}  // namespace detail

bool zero_in_unbounded_component(const Spectrum& s) {
  const std::vector<Complex> pts = s.values();
  if (pts.empty()) return true;
  const double rho = s.resolution;

  double dist0 = std::numeric_limits<double>::infinity();
  for (const Complex& p : pts) dist0 = std::min(dist0, std::abs(p));
  if (dist0 <= rho)
    throw Error(ErrorCode::Ambiguous,
                "0 within one resolution radius of the spectrum; refine or reject");

  // a ray through the disk union's complement connects 0 to infinity
  for (int k = 0; k < 720; ++k) {
    const double theta = -kPi + kTwoPi * double(k) / 720.0;
    if (ray_clearance(pts, theta) > rho) return true;
  }
  return detail::flood_reaches_zero(pts, rho);
}

}  // namespace expfact
