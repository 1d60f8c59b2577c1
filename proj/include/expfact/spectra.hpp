#pragma once

#include <cstddef>
#include <vector>

#include "expfact/matrix.hpp"

namespace expfact {

struct SpectrumPoint {
  Complex value;
  std::size_t sample;
  int multiplicity;
};

// Pointwise spectrum of a matrix over the algebra: the eigenvalues of every
// sample evaluation, with provenance, plus a covering-disk radius used by
// the topology tests. The radius defaults to twice the largest eigenvalue
// movement between adjacent samples (floor 1e-3): eigenvalues of a
// continuous family move continuously, so adjacent gaps estimate how thick
// the sampled spectral curve is.
struct Spectrum {
  std::vector<SpectrumPoint> points;
  double resolution = 1e-3;
  std::size_t matrix_dim = 0;

  std::vector<Complex> values() const {
    std::vector<Complex> v;
    v.reserve(points.size());
    for (const auto& p : points) v.push_back(p.value);
    return v;
  }
};

// Closed eps-neighborhood of the n-th roots of unity.
struct EpsNeighborhood {
  std::size_t order;
  double eps;
};

struct WindingResult {
  double turns = 0.0;    // total phase change / 2*pi
  bool closed = false;
  long integer = 0;      // rounded turn count (closed paths)
  double residual = 0.0; // |turns - integer| for closed paths
};

Spectrum spectrum(const MatrixOverAlgebra& a, Exec exec = Exec::Parallel);

// Whether 0 lies in the unbounded connected component of the complement of
// the union of resolution-radius disks around the spectrum points. Fast path:
// a ray from 0 clearing every disk settles the question; otherwise the disk
// union is rasterized at half the resolution and flood filled from far away.
// Throws Ambiguous when 0 is within one resolution radius of the spectrum.
bool zero_in_unbounded_component(const Spectrum& s);

bool in_eps_neighborhood(const Spectrum& s, const EpsNeighborhood& n);

// Winding of a nonvanishing sample sequence: principal phase increments
// summed along the path (plus the wrap step when closed). Adjacent
// increments must stay below pi, otherwise Undersampled.
WindingResult winding_number(const std::vector<Complex>& values, bool closed);

std::vector<Complex> roots_of_unity(std::size_t n);
double distance_to_roots(Complex z, std::size_t n);
double hausdorff_distance(const std::vector<Complex>& a, const std::vector<Complex>& b);

// min over spectrum points of the distance to the theta-ray from 0
double ray_clearance(const std::vector<Complex>& points, double theta);

namespace detail {
// exposed for direct testing of the rasterized topology fallback
bool flood_reaches_zero(const std::vector<Complex>& points, double rho);
}

}  // namespace expfact
