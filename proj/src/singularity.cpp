#include "dld/singularity.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include "dld/errors.hpp"

namespace dld {

Direction2 normalized(Direction2 d) {
  const double n = std::hypot(d.x, d.y);
  if (!(n > 0.0) || !std::isfinite(n)) throw Error(ErrorCode::InvalidArgument, "zero direction");
  return {d.x / n, d.y / n};
}

void TransectSpec::validate() const {
  if (!(half_length > 0.0) || !std::isfinite(half_length)) {
    throw Error(ErrorCode::InvalidArgument, "transect half_length must be > 0");
  }
  if (samples < 3 || samples % 2 == 0) {
    throw Error(ErrorCode::InvalidArgument, "transect samples must be odd and >= 3");
  }
  if (std::fabs(std::hypot(direction.x, direction.y) - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "transect direction must be a unit vector");
  }
}

std::vector<double> finite_difference(std::span<const double> values, double spacing) {
  const std::size_t n = values.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  d.front() = (values[1] - values[0]) / spacing;
  d.back() = (values[n - 1] - values[n - 2]) / spacing;
  for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (values[k + 1] - values[k - 1]) / (2.0 * spacing);
  return d;
}

std::vector<Candidate> detect_candidates(std::span<const double> positions,
                                         std::span<const double> derivative,
                                         const DetectionOptions& options) {
  const std::size_t n = derivative.size();
  std::vector<Candidate> out;
  if (n < 3 || positions.size() != n) return out;

  std::vector<double> mag(n);
  std::transform(derivative.begin(), derivative.end(), mag.begin(), [](double v) { return std::fabs(v); });
  std::vector<double> sorted = mag;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2), sorted.end());
  const double threshold = options.threshold_factor * sorted[n / 2];

  std::vector<std::size_t> hits;
  for (std::size_t k = 0; k < n; ++k) {
    if (mag[k] > threshold) hits.push_back(k);
  }

  std::size_t a = 0;
  while (a < hits.size()) {
    std::size_t b = a;
    while (b + 1 < hits.size() &&
           hits[b + 1] - hits[b] <= static_cast<std::size_t>(options.merge_gap) + 1) {
      ++b;
    }
    const std::size_t first = hits[a];
    const std::size_t last = hits[b];
    std::size_t peak = first;
    for (std::size_t k = first; k <= last; ++k) {
      if (mag[k] > mag[peak]) peak = k;
    }

    Candidate c{peak, positions[peak], mag[peak]};
    // Nearest - to + sign change to the peak, searched one sample beyond the cluster.
    const std::size_t lo = first > 0 ? first - 1 : first;
    const std::size_t hi = std::min(last + 1, n - 1);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = lo; k < hi; ++k) {
      const double d0 = derivative[k];
      const double d1 = derivative[k + 1];
      if (d0 < 0.0 && d1 >= 0.0) {
        const double t = d0 / (d0 - d1);
        const double pos = positions[k] + t * (positions[k + 1] - positions[k]);
        const double dist = std::fabs(pos - positions[peak]);
        if (dist < best) {
          best = dist;
          c.position = pos;
        }
      }
    }
    out.push_back(c);
    a = b + 1;
  }
  return out;
}

namespace {

double md_along(const MapKernel& kernel, MapPoint origin, Direction2 dir, double t,
                const DescriptorParams& params) {
  return md_point(kernel, {origin.x + t * dir.x, origin.y + t * dir.y}, params).md_total;
}

// Golden-section search for a local minimum of MD on [a, b].
double local_minimum(const MapKernel& kernel, MapPoint origin, Direction2 dir, double a, double b,
                     const DescriptorParams& params) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = md_along(kernel, origin, dir, c, params);
  double fd = md_along(kernel, origin, dir, d, params);
  const double tol = 1e-13 * std::max(1.0, std::fabs(b - a));
  for (int it = 0; it < 200 && (b - a) > tol; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = md_along(kernel, origin, dir, c, params);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = md_along(kernel, origin, dir, d, params);
    }
  }
  return fc <= fd ? c : d;
}

}  // namespace

double refinement_exponent(const MapKernel& kernel, MapPoint crossing, Direction2 direction,
                           const DescriptorParams& params, std::span<const double> spacings) {
  if (spacings.size() < 3) throw Error(ErrorCode::InvalidArgument, "need at least three spacings");
  for (std::size_t i = 0; i < spacings.size(); ++i) {
    if (!(spacings[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "spacings must be positive");
    if (i > 0 && !(spacings[i] < spacings[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "spacings must be strictly decreasing");
    }
  }
  const Direction2 dir = normalized(direction);
  const double window = spacings.front();

  std::vector<double> log_s;
  std::vector<double> log_q;
  for (double s : spacings) {
    const int half = static_cast<int>(std::ceil(window / s - 1e-9));
    double prev = md_along(kernel, crossing, dir, -half * s, params);
    double q = 0.0;
    for (int k = -half + 1; k <= half; ++k) {
      const double cur = md_along(kernel, crossing, dir, k * s, params);
      q = std::max(q, std::fabs(cur - prev) / s);
      prev = cur;
    }
    if (!(q > 0.0) || !std::isfinite(q)) {
      throw Error(ErrorCode::InsufficientSignal, "difference quotient vanishes; no singularity");
    }
    log_s.push_back(std::log(s));
    log_q.push_back(std::log(q));
  }

  // Changes below this size in log q count as flat, not as a direction reversal.
  constexpr double kFlat = 1e-9;
  bool rising = false;
  bool falling = false;
  for (std::size_t i = 1; i < log_q.size(); ++i) {
    const double delta = log_q[i] - log_q[i - 1];
    if (delta > kFlat) rising = true;
    if (delta < -kFlat) falling = true;
  }
  if (rising && falling) {
    throw Error(ErrorCode::InsufficientSignal,
                "difference quotient is not monotone in the spacing; no singularity");
  }

  const double n = static_cast<double>(log_s.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < log_s.size(); ++i) {
    sx += log_s[i];
    sy += log_q[i];
    sxx += log_s[i] * log_s[i];
    sxy += log_s[i] * log_q[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

TransectReport scan_transect(const MapKernel& kernel, const TransectSpec& spec,
                             const DescriptorParams& params, const DetectionOptions& options) {
  spec.validate();
  params.validate();
  if (options.workers < 1) throw Error(ErrorCode::InvalidArgument, "workers must be >= 1");

  const auto n = static_cast<std::size_t>(spec.samples);
  TransectReport report;
  report.positions.resize(n);
  report.md_values.resize(n);
  report.escaped.resize(n);
  for (std::size_t k = 0; k < n; ++k) report.positions[k] = spec.position(static_cast<int>(k));

  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const DescriptorValue v = md_point(kernel, spec.point_at(report.positions[k]), params);
      report.md_values[k] = v.md_total;
      report.escaped[k] = v.escaped() ? 1 : 0;
    }
  };
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(options.workers), n);
  if (workers <= 1) {
    run(0, n);
  } else {
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> threads;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t begin = 0; begin < n; begin += chunk) {
      const std::size_t end = std::min(n, begin + chunk);
      threads.emplace_back([&, begin, end] {
        try {
          run(begin, end);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    threads.clear();
    if (failure) std::rethrow_exception(failure);
  }

  const double h = spec.spacing();
  report.derivative = finite_difference(report.md_values, h);

  const std::vector<double> spacings = {h, h / 2.0, h / 4.0, h / 8.0};
  for (const Candidate& c : detect_candidates(report.positions, report.derivative, options)) {
    const double lo = std::max(c.position - 2.0 * h, -spec.half_length);
    const double hi = std::min(c.position + 2.0 * h, spec.half_length);
    const double t = local_minimum(kernel, spec.anchor, spec.direction, lo, hi, params);
    double exponent = 0.0;
    try {
      exponent = refinement_exponent(kernel, spec.point_at(t), spec.direction, params, spacings);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InsufficientSignal) continue;
      throw;
    }
    if (exponent < options.max_exponent && exponent < 0.0) {
      report.crossings.push_back({t, c.magnitude, exponent});
    }
  }
  return report;
}

std::vector<SingularDirection> singular_directions(const FieldResult& field, MapPoint anchor,
                                                   double min_row_offset,
                                                   const DetectionOptions& options,
                                                   double cluster_gap_deg) {
  const GridSpec& g = field.grid;
  std::vector<double> xs(static_cast<std::size_t>(g.nx));
  for (int i = 0; i < g.nx; ++i) xs[static_cast<std::size_t>(i)] = g.x(i);

  std::vector<double> angles;
  std::vector<double> row(static_cast<std::size_t>(g.nx));
  for (int j = 0; j < g.ny; ++j) {
    const double y = g.y(j);
    if (std::fabs(y - anchor.y) < min_row_offset) continue;
    bool any_escaped = false;
    for (int i = 0; i < g.nx; ++i) {
      row[static_cast<std::size_t>(i)] = field.at(i, j);
      any_escaped = any_escaped || field.escaped_at(i, j);
    }
    if (any_escaped) continue;
    const auto d = finite_difference(row, g.dx());
    for (const Candidate& c : detect_candidates(xs, d, options)) {
      double deg = std::atan2(y - anchor.y, c.position - anchor.x) * 180.0 / std::numbers::pi;
      deg = std::fmod(deg + 360.0, 180.0);
      angles.push_back(deg);
    }
  }
  if (angles.empty()) return {};
  std::sort(angles.begin(), angles.end());

  // Start clustering after the widest gap on the 180-degree circle.
  const std::size_t m = angles.size();
  std::size_t start = 0;
  double widest = angles.front() + 180.0 - angles.back();
  for (std::size_t k = 1; k < m; ++k) {
    if (angles[k] - angles[k - 1] > widest) {
      widest = angles[k] - angles[k - 1];
      start = k;
    }
  }
  std::vector<double> unwrapped(m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t src = (start + k) % m;
    unwrapped[k] = angles[src] + (src < start ? 180.0 : 0.0);
  }

  std::vector<SingularDirection> out;
  std::size_t a = 0;
  while (a < m) {
    std::size_t b = a;
    while (b + 1 < m && unwrapped[b + 1] - unwrapped[b] <= cluster_gap_deg) ++b;
    double sum = 0.0;
    for (std::size_t k = a; k <= b; ++k) sum += unwrapped[k];
    const double mean = sum / static_cast<double>(b - a + 1);
    out.push_back({std::fmod(mean, 180.0), static_cast<int>(b - a + 1), unwrapped[b] - unwrapped[a]});
    a = b + 1;
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const SingularDirection& l, const SingularDirection& r) { return l.support > r.support; });
  return out;
}

}  // namespace dld
