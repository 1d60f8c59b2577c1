#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "expfact/space.hpp"

namespace expfact {

// One algebra element: a complex value per sample point, optionally backed
// by polynomial coefficients (DiskGrid only, degree <= degree_cap). Samples
// are the source of truth; the payload rides along through ring operations
// while degrees stay under the cap and is dropped (with a global truncation
// notice) otherwise.
class AlgebraElement {
 public:
  AlgebraElement() = default;
  AlgebraElement(SpacePtr space, std::vector<Complex> values);

  static AlgebraElement constant(const SpacePtr& space, Complex c);
  static AlgebraElement coordinate(const SpacePtr& space);
  static AlgebraElement from_poly(const SpacePtr& space, std::vector<Complex> coeffs);

  const SpacePtr& space() const { return space_; }
  std::size_t size() const { return values_.size(); }
  Complex value(std::size_t i) const { return values_[i]; }
  const std::vector<Complex>& values() const { return values_; }

  bool has_poly() const { return poly_.has_value(); }
  const std::vector<Complex>& poly() const { return *poly_; }

  double max_abs() const;
  double min_abs() const;

  friend AlgebraElement elem_add(const AlgebraElement& a, const AlgebraElement& b);
  friend AlgebraElement elem_sub(const AlgebraElement& a, const AlgebraElement& b);
  friend AlgebraElement elem_mul(const AlgebraElement& a, const AlgebraElement& b);
  friend AlgebraElement elem_neg(const AlgebraElement& a);
  friend AlgebraElement elem_scale(const AlgebraElement& a, Complex c);

 private:
  SpacePtr space_;
  std::vector<Complex> values_;
  std::optional<std::vector<Complex>> poly_;
};

AlgebraElement elem_add(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement elem_sub(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement elem_mul(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement elem_neg(const AlgebraElement& a);
AlgebraElement elem_scale(const AlgebraElement& a, Complex c);

inline AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) { return elem_add(a, b); }
inline AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) { return elem_sub(a, b); }
inline AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) { return elem_mul(a, b); }
inline AlgebraElement operator-(const AlgebraElement& a) { return elem_neg(a); }

constexpr double kDefaultInvertTol = 1e-10;
constexpr double kDefaultZeroTol = 1e-8;

// Pointwise reciprocal; rejects elements that come within `tol` of zero at
// any sample.
AlgebraElement invert_elem(const AlgebraElement& a, double tol = kDefaultInvertTol);

// Sample indices where |a| <= tol.
std::vector<std::size_t> zero_locus(const AlgebraElement& a, double tol = kDefaultZeroTol);

// Membership in the exponential subgroup of the invertibles. On contractible
// backends nonvanishing suffices; on CirclePath the winding number along the
// path must vanish; on DiskGrid the winding along the boundary circle must
// vanish (a nonzero boundary winding means a zero hides inside the disk).
// Returns false instead of throwing.
bool is_exp1(const AlgebraElement& a, double tol = kDefaultZeroTol);

// Max over interior DiskGrid samples of the gap between the stored value and
// the boundary Cauchy-integral reconstruction (trapezoid rule).
double holomorphy_residual(const AlgebraElement& a);

// Pointwise scalar exponential (generator/test helper).
AlgebraElement exp_pointwise(const AlgebraElement& a);

// Number of polynomial payloads dropped because a result exceeded the
// backend degree cap.
std::uint64_t poly_truncation_count();

}  // namespace expfact
