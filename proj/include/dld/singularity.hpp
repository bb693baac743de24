#pragma once

// Manifold detection along 1D transects. An invariant manifold crossing shows
// up as a cusp of MD_p: for p < 1 the finite-difference derivative across it
// grows like h^{p-1} as the spacing h shrinks. Detection flags derivative
// spikes, then confirms each one by measuring that growth rate.

#include <cstdint>
#include <span>
#include <vector>

#include "dld/descriptor.hpp"
#include "dld/grid_engine.hpp"
#include "dld/map_kernel.hpp"

namespace dld {

struct Direction2 {
  double x = 1.0;
  double y = 0.0;
};

Direction2 normalized(Direction2 d);

// Samples sit at anchor + t * direction, t = (k - (samples-1)/2) * spacing.
struct TransectSpec {
  MapPoint anchor;
  Direction2 direction;
  double half_length = 0.5;
  int samples = 401;

  void validate() const;
  double spacing() const { return 2.0 * half_length / (samples - 1); }
  double position(int k) const { return (k - (samples - 1) / 2) * spacing(); }
  MapPoint point_at(double t) const {
    return {anchor.x + t * direction.x, anchor.y + t * direction.y};
  }
};

struct Crossing {
  double position = 0.0;
  double derivative_magnitude = 0.0;
  double refinement_exponent = 0.0;
};

struct TransectReport {
  std::vector<double> positions;
  std::vector<double> md_values;
  std::vector<double> derivative;
  std::vector<std::uint8_t> escaped;
  std::vector<Crossing> crossings;
};

struct DetectionOptions {
  // Spikes must exceed this multiple of the median |derivative|.
  double threshold_factor = 10.0;
  // Above-threshold samples separated by at most this many samples merge.
  int merge_gap = 2;
  // A spike is kept only if its refinement exponent is below this value.
  double max_exponent = -0.05;
  int workers = 1;
};

// Central differences, one-sided at both ends.
std::vector<double> finite_difference(std::span<const double> values, double spacing);

struct Candidate {
  std::size_t peak = 0;
  double position = 0.0;
  double magnitude = 0.0;
};

// Clusters of |derivative| above threshold_factor * median(|derivative|).
// The position is the interpolated - to + sign change of the derivative
// inside the cluster when there is one, otherwise the peak sample.
std::vector<Candidate> detect_candidates(std::span<const double> positions,
                                         std::span<const double> derivative,
                                         const DetectionOptions& options = {});

TransectReport scan_transect(const MapKernel& kernel, const TransectSpec& spec,
                             const DescriptorParams& params, const DetectionOptions& options = {});

// Slope of log(max one-sided difference quotient) against log(spacing) on a
// stencil of width spacings.front() on each side of the crossing. Spacings
// must be strictly decreasing, at least three. Throws InsufficientSignal when
// the quotients do not change monotonically with the spacing.
double refinement_exponent(const MapKernel& kernel, MapPoint crossing, Direction2 direction,
                           const DescriptorParams& params, std::span<const double> spacings);

// Angles (degrees in [0, 180), measured about `anchor`) of singular lines
// found by scanning every grid row of a field for crossings. Rows closer to
// the anchor than min_row_offset are skipped since angles there are poorly
// conditioned.
struct SingularDirection {
  double angle_deg = 0.0;
  int support = 0;
  double spread_deg = 0.0;
};

std::vector<SingularDirection> singular_directions(const FieldResult& field, MapPoint anchor,
                                                   double min_row_offset,
                                                   const DetectionOptions& options = {},
                                                   double cluster_gap_deg = 5.0);

}  // namespace dld
