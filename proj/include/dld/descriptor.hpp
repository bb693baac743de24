#pragma once

#include <optional>

#include "dld/map_kernel.hpp"

namespace dld {

// Which increment formula a given p selects.
//   SubUnit:   |dx|^p + |dy|^p            (p <= 1, boundary inclusive)
//   PNorm:     (|dx|^p + |dy|^p)^(1/p)    (p > 1)
//   Arclength: sqrt(dx^2 + dy^2)          (p == 2, same value as PNorm)
enum class NormRegime { SubUnit, PNorm, Arclength };

struct DescriptorParams {
  double p = 0.5;
  int N = 20;
  TimeIndex n0 = 0;
  // Orbits leaving the disk of this radius stop accumulating and are flagged.
  std::optional<double> escape_radius;

  NormRegime regime() const;
  void validate() const;
};

struct DescriptorValue {
  double md_total = 0.0;
  double md_plus = 0.0;
  double md_minus = 0.0;
  bool escaped_forward = false;
  bool escaped_backward = false;
  int steps_completed_forward = 0;
  int steps_completed_backward = 0;

  bool escaped() const { return escaped_forward || escaped_backward; }
};

// Per-step increment |q1 - q0| under the regime selected by p.
double step_increment(MapPoint from, MapPoint to, double p);

// MD_p over the orbit window [n0 - N, n0 + N]. Forward increments are summed
// for i = n0 .. n0+N-1, then backward increments for i = n0-1 .. n0-N, each
// in that fixed order. An iterate that leaves the escape disk (or becomes
// non-finite) ends accumulation in that direction; its increment is not
// counted. Without an escape radius a non-finite iterate throws
// NonFiniteIterate.
DescriptorValue md_point(const MapKernel& kernel, MapPoint q0, const DescriptorParams& params);

// Discretized arclength (p = 2). Bitwise identical to md_point with p = 2.
DescriptorValue md_arclength(const MapKernel& kernel, MapPoint q0, const DescriptorParams& params);

}  // namespace dld
