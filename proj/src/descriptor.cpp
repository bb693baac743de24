#include "dld/descriptor.hpp"

#include <cmath>
#include <sstream>

#include "dld/errors.hpp"

namespace dld {

NormRegime DescriptorParams::regime() const {
  if (p <= 1.0) return NormRegime::SubUnit;
  if (p == 2.0) return NormRegime::Arclength;
  return NormRegime::PNorm;
}

void DescriptorParams::validate() const {
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw Error(ErrorCode::InvalidArgument, "p must be a finite value > 0");
  }
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "N must be >= 1");
  if (escape_radius && !(*escape_radius > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "escape radius must be > 0");
  }
}

double step_increment(MapPoint from, MapPoint to, double p) {
  const double dx = std::fabs(to.x - from.x);
  const double dy = std::fabs(to.y - from.y);
  if (p <= 1.0) return std::pow(dx, p) + std::pow(dy, p);
  if (p == 2.0) return std::sqrt(dx * dx + dy * dy);
  return std::pow(std::pow(dx, p) + std::pow(dy, p), 1.0 / p);
}

namespace {

enum class Direction { Forward, Backward };

struct HalfOrbit {
  double sum = 0.0;
  int steps = 0;
  bool escaped = false;
};

template <Direction dir>
HalfOrbit accumulate(const MapKernel& kernel, MapPoint q0, const DescriptorParams& params) {
  HalfOrbit out;
  MapPoint q = q0;
  const double r2 = params.escape_radius ? *params.escape_radius * *params.escape_radius : 0.0;
  for (int k = 0; k < params.N; ++k) {
    const MapPoint next = dir == Direction::Forward ? kernel.forward(q, params.n0 + k)
                                                    : kernel.inverse(q, params.n0 - 1 - k);
    const bool finite = std::isfinite(next.x) && std::isfinite(next.y);
    if (params.escape_radius) {
      if (!finite || next.x * next.x + next.y * next.y > r2) {
        out.escaped = true;
        break;
      }
    } else if (!finite) {
      std::ostringstream os;
      os << "orbit of (" << q0.x << ", " << q0.y << ") became non-finite after " << k + 1
         << (dir == Direction::Forward ? " forward" : " backward")
         << " steps; set an escape radius for unbounded maps";
      throw Error(ErrorCode::NonFiniteIterate, os.str());
    }
    const double inc = step_increment(q, next, params.p);
    if (!std::isfinite(inc)) {
      if (params.escape_radius) {
        out.escaped = true;
        break;
      }
      throw Error(ErrorCode::NonFiniteIterate, "increment overflowed to non-finite");
    }
    out.sum += inc;
    ++out.steps;
    q = next;
  }
  return out;
}

}  // namespace

DescriptorValue md_point(const MapKernel& kernel, MapPoint q0, const DescriptorParams& params) {
  params.validate();
  const HalfOrbit fwd = accumulate<Direction::Forward>(kernel, q0, params);
  const HalfOrbit bwd = accumulate<Direction::Backward>(kernel, q0, params);
  DescriptorValue v;
  v.md_plus = fwd.sum;
  v.md_minus = bwd.sum;
  v.md_total = fwd.sum + bwd.sum;
  v.escaped_forward = fwd.escaped;
  v.escaped_backward = bwd.escaped;
  v.steps_completed_forward = fwd.steps;
  v.steps_completed_backward = bwd.steps;
  return v;
}

DescriptorValue md_arclength(const MapKernel& kernel, MapPoint q0, const DescriptorParams& params) {
  if (params.p != 2.0) throw Error(ErrorCode::InvalidArgument, "md_arclength requires p = 2");
  return md_point(kernel, q0, params);
}

}  // namespace dld
