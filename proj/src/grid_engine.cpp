#include "dld/grid_engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "dld/errors.hpp"

namespace dld {

void GridSpec::validate() const {
  if (nx < 2 || ny < 2) throw Error(ErrorCode::InvalidArgument, "grid needs nx, ny >= 2");
  if (!std::isfinite(xmin) || !std::isfinite(xmax) || !std::isfinite(ymin) || !std::isfinite(ymax)) {
    throw Error(ErrorCode::InvalidArgument, "grid bounds must be finite");
  }
  if (!(xmax > xmin) || !(ymax > ymin)) {
    throw Error(ErrorCode::InvalidArgument, "grid needs xmax > xmin and ymax > ymin");
  }
}

FieldResult evaluate_field(const MapKernel& kernel, const GridSpec& grid, const DescriptorParams& params,
                           int workers) {
  grid.validate();
  params.validate();
  if (workers < 1) throw Error(ErrorCode::InvalidArgument, "workers must be >= 1");

  const auto start = std::chrono::steady_clock::now();

  FieldResult field;
  field.grid = grid;
  field.params = params;
  field.kernel_name = kernel.name();
  field.kernel_parameters = kernel.parameters();
  field.values.assign(grid.size(), 0.0);
  field.escaped.assign(grid.size(), 0);

  auto run_rows = [&](int j_begin, int j_end) {
    for (int j = j_begin; j < j_end; ++j) {
      const double y = grid.y(j);
      for (int i = 0; i < grid.nx; ++i) {
        const DescriptorValue v = md_point(kernel, {grid.x(i), y}, params);
        const std::size_t k = grid.index(i, j);
        field.values[k] = v.md_total;
        field.escaped[k] = v.escaped() ? 1 : 0;
      }
    }
  };

  const int n_workers = std::min(workers, grid.ny);
  if (n_workers == 1) {
    run_rows(0, grid.ny);
  } else {
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> threads;
    threads.reserve(static_cast<std::size_t>(n_workers));
    const int base = grid.ny / n_workers;
    const int extra = grid.ny % n_workers;
    int j = 0;
    for (int w = 0; w < n_workers; ++w) {
      const int rows = base + (w < extra ? 1 : 0);
      const int j_begin = j;
      const int j_end = j + rows;
      j = j_end;
      threads.emplace_back([&, j_begin, j_end] {
        try {
          run_rows(j_begin, j_end);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    threads.clear();
    if (failure) std::rethrow_exception(failure);
  }

  field.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return field;
}

std::vector<Marker> min_markers(const FieldResult& field, int k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  const GridSpec& g = field.grid;

  std::vector<std::size_t> order;
  order.reserve(field.values.size());
  for (std::size_t idx = 0; idx < field.values.size(); ++idx) {
    if (!field.escaped[idx]) order.push_back(idx);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return field.values[a] < field.values[b]; });

  constexpr int kMinSeparation = 3;
  std::vector<Marker> out;
  for (std::size_t idx : order) {
    const int i = static_cast<int>(idx % static_cast<std::size_t>(g.nx));
    const int j = static_cast<int>(idx / static_cast<std::size_t>(g.nx));
    const bool clear = std::none_of(out.begin(), out.end(), [&](const Marker& m) {
      return std::max(std::abs(m.i - i), std::abs(m.j - j)) < kMinSeparation;
    });
    if (!clear) continue;
    out.push_back({{g.x(i), g.y(j)}, field.values[idx], i, j});
    if (static_cast<int>(out.size()) == k) return out;
  }
  std::ostringstream os;
  os << "only " << out.size() << " separated non-escaped nodes, requested " << k;
  throw Error(ErrorCode::FewerThanK, os.str());
}

namespace {

std::vector<double> sorted_non_escaped(const FieldResult& field) {
  std::vector<double> v;
  v.reserve(field.values.size());
  for (std::size_t k = 0; k < field.values.size(); ++k) {
    if (!field.escaped[k]) v.push_back(field.values[k]);
  }
  std::sort(v.begin(), v.end());
  return v;
}

double quantile_sorted(const std::vector<double>& v, double q) {
  if (v.empty()) throw Error(ErrorCode::InvalidArgument, "no non-escaped values");
  if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorCode::InvalidArgument, "quantile outside [0, 1]");
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double t = pos - static_cast<double>(lo);
  return v[lo] + t * (v[hi] - v[lo]);
}

}  // namespace

FieldSummary summarize(const FieldResult& field) {
  FieldSummary s;
  s.escaped = static_cast<std::size_t>(std::count(field.escaped.begin(), field.escaped.end(), 1));
  s.escape_fraction = field.values.empty()
                          ? 0.0
                          : static_cast<double>(s.escaped) / static_cast<double>(field.values.size());
  if (!field.values.empty()) {
    auto [lo, hi] = std::minmax_element(field.values.begin(), field.values.end());
    s.min = *lo;
    s.max = *hi;
    std::vector<double> all = field.values;
    std::sort(all.begin(), all.end());
    s.median = quantile_sorted(all, 0.5);
  }
  return s;
}

double percentile_non_escaped(const FieldResult& field, double q) {
  return quantile_sorted(sorted_non_escaped(field), q);
}

std::pair<int, int> nearest_node(const GridSpec& grid, MapPoint q) {
  auto clamp_index = [](double t, int n) {
    const long r = std::lround(t);
    return static_cast<int>(std::clamp<long>(r, 0, n - 1));
  };
  return {clamp_index((q.x - grid.xmin) / grid.dx(), grid.nx),
          clamp_index((q.y - grid.ymin) / grid.dy(), grid.ny)};
}

std::vector<std::uint8_t> low_value_mask(const FieldResult& field, double fraction) {
  const double cut = percentile_non_escaped(field, fraction);
  std::vector<std::uint8_t> mask(field.values.size(), 0);
  for (std::size_t k = 0; k < field.values.size(); ++k) {
    mask[k] = (!field.escaped[k] && field.values[k] <= cut) ? 1 : 0;
  }
  return mask;
}

int count_components(const std::vector<std::uint8_t>& mask, int nx, int ny) {
  if (mask.size() != static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny)) {
    throw Error(ErrorCode::InvalidArgument, "mask size does not match grid");
  }
  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::vector<std::size_t> stack;
  int components = 0;
  for (std::size_t start = 0; start < mask.size(); ++start) {
    if (!mask[start] || seen[start]) continue;
    ++components;
    seen[start] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      const int ci = static_cast<int>(cur % static_cast<std::size_t>(nx));
      const int cj = static_cast<int>(cur / static_cast<std::size_t>(nx));
      for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          const int i = ci + di;
          const int j = cj + dj;
          if (i < 0 || j < 0 || i >= nx || j >= ny) continue;
          const std::size_t nb = static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) +
                                 static_cast<std::size_t>(i);
          if (mask[nb] && !seen[nb]) {
            seen[nb] = 1;
            stack.push_back(nb);
          }
        }
      }
    }
  }
  return components;
}

}  // namespace dld
