#include "expfact/element.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "expfact/error.hpp"
#include "expfact/spectra.hpp"

namespace expfact {

namespace {

std::atomic<std::uint64_t> g_poly_truncations{0};

std::vector<Complex> eval_poly(const SpacePtr& space, const std::vector<Complex>& coeffs) {
  std::vector<Complex> out(space->size());
  for (std::size_t i = 0; i < space->size(); ++i) {
    Complex z = space->coordinate(i);
    Complex acc(0.0, 0.0);
    for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * z + coeffs[k];
    out[i] = acc;
  }
  return out;
}

std::optional<std::vector<Complex>> keep_poly(const SpacePtr& space,
                                              std::vector<Complex> coeffs) {
  if (space->kind() != SpaceKind::DiskGrid) return std::nullopt;
  while (!coeffs.empty() && std::abs(coeffs.back()) == 0.0) coeffs.pop_back();
  if (coeffs.empty()) coeffs.push_back(Complex(0.0, 0.0));
  if (coeffs.size() > space->degree_cap() + 1) {
    g_poly_truncations.fetch_add(1, std::memory_order_relaxed);
    return std::nullopt;
  }
  return coeffs;
}

}  // namespace

AlgebraElement::AlgebraElement(SpacePtr space, std::vector<Complex> values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (!space_ || values_.size() != space_->size())
    throw Error(ErrorCode::ShapeMismatch, "element values do not match space size");
}

AlgebraElement AlgebraElement::constant(const SpacePtr& space, Complex c) {
  AlgebraElement e(space, std::vector<Complex>(space->size(), c));
  e.poly_ = keep_poly(space, {c});
  return e;
}

AlgebraElement AlgebraElement::coordinate(const SpacePtr& space) {
  AlgebraElement e(space, space->coordinates());
  e.poly_ = keep_poly(space, {Complex(0.0, 0.0), Complex(1.0, 0.0)});
  return e;
}

AlgebraElement AlgebraElement::from_poly(const SpacePtr& space, std::vector<Complex> coeffs) {
  if (coeffs.empty()) coeffs.push_back(Complex(0.0, 0.0));
  AlgebraElement e(space, eval_poly(space, coeffs));
  e.poly_ = keep_poly(space, std::move(coeffs));
  return e;
}

double AlgebraElement::max_abs() const {
  double m = 0.0;
  for (const Complex& v : values_) m = std::max(m, std::abs(v));
  return m;
}

double AlgebraElement::min_abs() const {
  double m = values_.empty() ? 0.0 : std::abs(values_[0]);
  for (const Complex& v : values_) m = std::min(m, std::abs(v));
  return m;
}

AlgebraElement elem_add(const AlgebraElement& a, const AlgebraElement& b) {
  require_same_space(a.space_, b.space_);
  std::vector<Complex> out(a.values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values_[i] + b.values_[i];
  AlgebraElement r(a.space_, std::move(out));
  if (a.poly_ && b.poly_) {
    std::vector<Complex> c(std::max(a.poly_->size(), b.poly_->size()), Complex(0, 0));
    for (std::size_t k = 0; k < a.poly_->size(); ++k) c[k] += (*a.poly_)[k];
    for (std::size_t k = 0; k < b.poly_->size(); ++k) c[k] += (*b.poly_)[k];
    r.poly_ = keep_poly(a.space_, std::move(c));
  }
  return r;
}

AlgebraElement elem_sub(const AlgebraElement& a, const AlgebraElement& b) {
  return elem_add(a, elem_neg(b));
}

AlgebraElement elem_mul(const AlgebraElement& a, const AlgebraElement& b) {
  require_same_space(a.space_, b.space_);
  std::vector<Complex> out(a.values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values_[i] * b.values_[i];
  AlgebraElement r(a.space_, std::move(out));
  if (a.poly_ && b.poly_) {
    std::vector<Complex> c(a.poly_->size() + b.poly_->size() - 1, Complex(0, 0));
    for (std::size_t i = 0; i < a.poly_->size(); ++i)
      for (std::size_t j = 0; j < b.poly_->size(); ++j) c[i + j] += (*a.poly_)[i] * (*b.poly_)[j];
    r.poly_ = keep_poly(a.space_, std::move(c));
  }
  return r;
}

AlgebraElement elem_neg(const AlgebraElement& a) { return elem_scale(a, Complex(-1.0, 0.0)); }

AlgebraElement elem_scale(const AlgebraElement& a, Complex c) {
  std::vector<Complex> out(a.values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * a.values_[i];
  AlgebraElement r(a.space_, std::move(out));
  if (a.poly_) {
    std::vector<Complex> p = *a.poly_;
    for (Complex& x : p) x *= c;
    r.poly_ = keep_poly(a.space_, std::move(p));
  }
  return r;
}

AlgebraElement invert_elem(const AlgebraElement& a, double tol) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    double m = std::abs(a.value(i));
    if (!(m > tol))
      throw Error(ErrorCode::NotInvertible,
                  "sample magnitude " + format_mag(m) + " <= tol", i);
  }
  std::vector<Complex> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = Complex(1.0, 0.0) / a.value(i);
  AlgebraElement r(a.space(), std::move(out));
  // reciprocal of a nonzero constant stays polynomial, everything else does not
  if (a.has_poly() && a.poly().size() == 1) {
    return AlgebraElement::from_poly(a.space(), {Complex(1.0, 0.0) / a.poly()[0]});
  }
  return r;
}

std::vector<std::size_t> zero_locus(const AlgebraElement& a, double tol) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a.value(i)) <= tol) out.push_back(i);
  return out;
}

bool is_exp1(const AlgebraElement& a, double tol) {
  if (!(a.min_abs() > tol)) return false;
  const SpacePtr& sp = a.space();
  try {
    if (sp->kind() == SpaceKind::CirclePath) {
      return winding_number(a.values(), /*closed=*/true).integer == 0;
    }
    if (sp->kind() == SpaceKind::DiskGrid) {
      std::vector<Complex> boundary(a.values().begin(),
                                    a.values().begin() + sp->boundary_count());
      return winding_number(boundary, /*closed=*/true).integer == 0;
    }
  } catch (const Error&) {
    return false;  // undersampled winding: no membership claim
  }
  return true;
}

double holomorphy_residual(const AlgebraElement& a) {
  const SpacePtr& sp = a.space();
  if (sp->kind() != SpaceKind::DiskGrid)
    throw Error(ErrorCode::UnsupportedBackend, "holomorphy residual needs a disk grid");
  const std::size_t b = sp->boundary_count();
  double worst = 0.0;
  for (std::size_t i = b; i < sp->size(); ++i) {
    Complex z = sp->coordinate(i);
    Complex acc(0.0, 0.0);
    for (std::size_t j = 0; j < b; ++j) {
      Complex zeta = sp->coordinate(j);
      acc += a.value(j) * zeta / (zeta - z);
    }
    acc /= double(b);
    worst = std::max(worst, std::abs(a.value(i) - acc));
  }
  return worst;
}

AlgebraElement exp_pointwise(const AlgebraElement& a) {
  std::vector<Complex> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::exp(a.value(i));
  return AlgebraElement(a.space(), std::move(out));
}

std::uint64_t poly_truncation_count() {
  return g_poly_truncations.load(std::memory_order_relaxed);
}

}  // namespace expfact
