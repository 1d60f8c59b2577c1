#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace expfact {

using Complex = std::complex<double>;

enum class SpaceKind { FinitePoints, IntervalPath, DiskGrid, CirclePath };

// A discretized maximal ideal space: finitely many evaluation points plus
// the metadata the topology tests need (path order, closedness,
// contractibility). Layouts are deterministic:
//   FinitePoints(k)   points labelled 0..k-1, coordinate j
//   IntervalPath(m)   x_j = j/(m-1) on [0,1], ordered open path
//   CirclePath(m)     z_j = e^{2*pi*i*j/m}, ordered closed path
//   DiskGrid(b,r,d)   b boundary points e^{2*pi*i*j/b} first, then the
//                     center, then rings at radius k/r (k=1..r-1) with b
//                     points each; polynomial payloads capped at degree d
class SampleSpace {
 public:
  static std::shared_ptr<const SampleSpace> finite_points(std::size_t count);
  static std::shared_ptr<const SampleSpace> interval_path(std::size_t samples);
  static std::shared_ptr<const SampleSpace> circle_path(std::size_t samples);
  static std::shared_ptr<const SampleSpace> disk_grid(std::size_t boundary,
                                                      std::size_t rings,
                                                      std::size_t degree_cap);

  SpaceKind kind() const { return kind_; }
  std::size_t size() const { return points_.size(); }
  Complex coordinate(std::size_t i) const { return points_[i]; }
  const std::vector<Complex>& coordinates() const { return points_; }

  bool ordered_path() const {
    return kind_ == SpaceKind::IntervalPath || kind_ == SpaceKind::CirclePath;
  }
  bool closed_path() const { return kind_ == SpaceKind::CirclePath; }
  bool contractible() const { return kind_ != SpaceKind::CirclePath; }

  std::size_t degree_cap() const { return degree_cap_; }
  std::size_t boundary_count() const { return boundary_; }
  std::size_t interior_begin() const { return boundary_; }  // DiskGrid only

  // Adjacent sample pairs along continuation paths (used to set the spectral
  // resolution radius). Empty for FinitePoints.
  const std::vector<std::pair<std::size_t, std::size_t>>& adjacency() const {
    return adjacency_;
  }

  bool same_as(const SampleSpace& other) const;
  std::string describe() const;

 private:
  SampleSpace() = default;

  SpaceKind kind_ = SpaceKind::FinitePoints;
  std::vector<Complex> points_;
  std::vector<std::pair<std::size_t, std::size_t>> adjacency_;
  std::size_t boundary_ = 0;    // DiskGrid boundary sample count
  std::size_t rings_ = 0;       // DiskGrid radial rings
  std::size_t degree_cap_ = 0;  // DiskGrid polynomial degree cap
};

using SpacePtr = std::shared_ptr<const SampleSpace>;

void require_same_space(const SpacePtr& a, const SpacePtr& b);

}  // namespace expfact
