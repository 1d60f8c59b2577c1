#include "expfact/space.hpp"

#include <cmath>
#include <cstdio>

#include "expfact/error.hpp"

namespace expfact {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Config: return "Config";
    case ErrorCode::SpaceMismatch: return "SpaceMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::UnsupportedBackend: return "UnsupportedBackend";
    case ErrorCode::BadSpec: return "BadSpec";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::NotInvertibleAtPoint: return "NotInvertibleAtPoint";
    case ErrorCode::NumericalError: return "NumericalError";
    case ErrorCode::Undersampled: return "Undersampled";
    case ErrorCode::ZeroOnPath: return "ZeroOnPath";
    case ErrorCode::Ambiguous: return "Ambiguous";
    case ErrorCode::NoRayFound: return "NoRayFound";
    case ErrorCode::BranchViolation: return "BranchViolation";
    case ErrorCode::NotInSigmaN: return "NotInSigmaN";
    case ErrorCode::NotUnipotent: return "NotUnipotent";
    case ErrorCode::NotDiagonal: return "NotDiagonal";
    case ErrorCode::NotTriangular: return "NotTriangular";
    case ErrorCode::ProductNotOne: return "ProductNotOne";
    case ErrorCode::NonUnipotentResult: return "NonUnipotentResult";
    case ErrorCode::ScheduleExhausted: return "ScheduleExhausted";
    case ErrorCode::SearchExhausted: return "SearchExhausted";
    case ErrorCode::CommonZero: return "CommonZero";
    case ErrorCode::NotLeftInvertible: return "NotLeftInvertible";
    case ErrorCode::AllLowerEntriesZero: return "AllLowerEntriesZero";
    case ErrorCode::NoLowerEntry: return "NoLowerEntry";
    case ErrorCode::TopLeftNotExp1: return "TopLeftNotExp1";
    case ErrorCode::SolveFailure: return "SolveFailure";
    case ErrorCode::DetNotExp1: return "DetNotExp1";
    case ErrorCode::NotExp1: return "NotExp1";
    case ErrorCode::NotAlternating: return "NotAlternating";
    case ErrorCode::NotUnitriangular: return "NotUnitriangular";
    case ErrorCode::NotFinitePoints: return "NotFinitePoints";
    case ErrorCode::VerificationFailed: return "VerificationFailed";
  }
  return "Unknown";
}


std::string format_mag(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", value);
  return buf;
}

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

std::shared_ptr<const SampleSpace> SampleSpace::finite_points(std::size_t count) {
  if (count < 1) throw Error(ErrorCode::Config, "finite_points needs count >= 1");
  auto s = std::shared_ptr<SampleSpace>(new SampleSpace());
  s->kind_ = SpaceKind::FinitePoints;
  s->points_.reserve(count);
  for (std::size_t j = 0; j < count; ++j) s->points_.emplace_back(double(j), 0.0);
  return s;
}

std::shared_ptr<const SampleSpace> SampleSpace::interval_path(std::size_t samples) {
  if (samples < 2) throw Error(ErrorCode::Config, "interval_path needs >= 2 samples");
  auto s = std::shared_ptr<SampleSpace>(new SampleSpace());
  s->kind_ = SpaceKind::IntervalPath;
  s->points_.reserve(samples);
  for (std::size_t j = 0; j < samples; ++j)
    s->points_.emplace_back(double(j) / double(samples - 1), 0.0);
  for (std::size_t j = 0; j + 1 < samples; ++j) s->adjacency_.emplace_back(j, j + 1);
  return s;
}

std::shared_ptr<const SampleSpace> SampleSpace::circle_path(std::size_t samples) {
  if (samples < 3) throw Error(ErrorCode::Config, "circle_path needs >= 3 samples");
  auto s = std::shared_ptr<SampleSpace>(new SampleSpace());
  s->kind_ = SpaceKind::CirclePath;
  s->points_.reserve(samples);
  for (std::size_t j = 0; j < samples; ++j) {
    double t = kTwoPi * double(j) / double(samples);
    s->points_.emplace_back(std::cos(t), std::sin(t));
  }
  for (std::size_t j = 0; j < samples; ++j)
    s->adjacency_.emplace_back(j, (j + 1) % samples);
  return s;
}

std::shared_ptr<const SampleSpace> SampleSpace::disk_grid(std::size_t boundary,
                                                          std::size_t rings,
                                                          std::size_t degree_cap) {
  if (boundary < 8) throw Error(ErrorCode::Config, "disk_grid needs boundary >= 8");
  if (rings < 1) throw Error(ErrorCode::Config, "disk_grid needs rings >= 1");
  auto s = std::shared_ptr<SampleSpace>(new SampleSpace());
  s->kind_ = SpaceKind::DiskGrid;
  s->boundary_ = boundary;
  s->rings_ = rings;
  s->degree_cap_ = degree_cap;
  // all boundary samples first, then the interior (center, then rings
  // outward); interior ring k sits at radius k/rings, aligned in angle with
  // the boundary
  for (std::size_t j = 0; j < boundary; ++j) {
    double t = kTwoPi * double(j) / double(boundary);
    s->points_.emplace_back(std::cos(t), std::sin(t));
  }
  s->points_.emplace_back(0.0, 0.0);
  for (std::size_t k = 1; k < rings; ++k) {
    double radius = double(k) / double(rings);
    for (std::size_t j = 0; j < boundary; ++j) {
      double t = kTwoPi * double(j) / double(boundary);
      s->points_.emplace_back(radius * std::cos(t), radius * std::sin(t));
    }
  }
  for (std::size_t j = 0; j < boundary; ++j)
    s->adjacency_.emplace_back(j, (j + 1) % boundary);
  for (std::size_t k = 1; k < rings; ++k) {
    std::size_t base = boundary + 1 + (k - 1) * boundary;
    for (std::size_t j = 0; j < boundary; ++j)
      s->adjacency_.emplace_back(base + j, base + (j + 1) % boundary);
  }
  return s;
}

bool SampleSpace::same_as(const SampleSpace& other) const {
  if (this == &other) return true;
  return kind_ == other.kind_ && points_.size() == other.points_.size() &&
         boundary_ == other.boundary_ && rings_ == other.rings_ &&
         degree_cap_ == other.degree_cap_;
}

std::string SampleSpace::describe() const {
  switch (kind_) {
    case SpaceKind::FinitePoints:
      return "finite_points(" + std::to_string(points_.size()) + ")";
    case SpaceKind::IntervalPath:
      return "interval_path(" + std::to_string(points_.size()) + ")";
    case SpaceKind::CirclePath:
      return "circle_path(" + std::to_string(points_.size()) + ")";
    case SpaceKind::DiskGrid:
      return "disk_grid(" + std::to_string(boundary_) + "," + std::to_string(rings_) +
             "," + std::to_string(degree_cap_) + ")";
  }
  return "?";
}

void require_same_space(const SpacePtr& a, const SpacePtr& b) {
  if (!a || !b || !a->same_as(*b))
    throw Error(ErrorCode::SpaceMismatch, "operands use different sample spaces");
}

}  // namespace expfact
