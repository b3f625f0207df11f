#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wedgeframe/core_seq.hpp"
#include "wedgeframe/points.hpp"

namespace wedgeframe {

/// Number of sequence elements, with multiplicity, in the closed box z + [-R, R]^{2d}.
std::size_t box_count(const PointSequence& gamma, double R, std::span<const double> z);

/// Box counter that keeps the sequence sorted by its first coordinate, for
/// repeated queries.
class BoxCounter {
 public:
  explicit BoxCounter(const PointSequence& gamma);
  std::size_t count(double R, std::span<const double> z) const;

 private:
  int D_;
  std::vector<double> first_;
  std::vector<double> coords_;
};

struct DensityProfile {
  std::vector<double> radii;
  std::vector<double> lower;
  std::vector<double> upper;
  double search_grid_step = 0.0;  // 0 means R/4 per radius

  double lower_estimate() const { return lower.empty() ? 0.0 : lower.back(); }
  double upper_estimate() const { return upper.empty() ? 0.0 : upper.back(); }
};

/// Windowed inf/sup of count/(2R)^{2d} over box centers on a grid of the given
/// step (0 selects R/4), restricted to boxes inside the coverage window and
/// refined once around the extrema. Throws COVERAGE if a box does not fit.
DensityProfile density_profile(const PointSequence& gamma, const std::vector<double>& radii, double search_step = 0.0);

std::string density_profile_csv(const DensityProfile& profile);

/// Enumeration of a sequence by Z^{2d}: positions sorted by |gamma - z0|_inf
/// (stable on ties) and assigned to Z^{2d} in shell-lex order.
struct Enumeration {
  int D = 0;
  std::vector<std::size_t> order;  // order[k] = sequence position of the k-th index point
  std::vector<double> dist;        // dist[k] = |gamma_{order[k]} - z0|_inf
  int radius = 0;                  // smallest box radius holding all indices
  std::shared_ptr<const BoxIndexing> box;

  /// Sequence position for index j', or nullopt beyond the sequence.
  std::optional<std::size_t> position_of(std::span<const int> jp) const;
};

Enumeration enumerate_by_norm(const PointSequence& gamma, std::span<const double> z0);

struct DeficitBox {
  double R0 = 0.0;
  std::vector<double> z0;
  std::size_t count = 0;
};

/// First (R0, z0) on the schedule with count <= alpha2^{2d} (2 R0)^{2d}; box
/// centers are scanned on a grid of step z_step (0 selects R0/4) inside the
/// coverage window, nearest to the window center first.
std::optional<DeficitBox> deficit_box_search(const PointSequence& gamma, double alpha2,
                                             const std::vector<double>& R_schedule, double z_step = 0.0);

/// Box centers on a grid of the given step with z + [-R, R]^D inside the
/// coverage window, flattened D coordinates per center. Empty if no box fits.
std::vector<double> center_grid(const PointSequence& gamma, double R, double step);

}  // namespace wedgeframe
