#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dld/descriptor.hpp"
#include "dld/map_kernel.hpp"

namespace dld {

// Node-centred rectangular grid, endpoints included:
// node (i, j) sits at (xmin + i dx, ymin + j dy), dx = (xmax - xmin)/(nx - 1).
struct GridSpec {
  double xmin = -1.0;
  double xmax = 1.0;
  double ymin = -1.0;
  double ymax = 1.0;
  int nx = 2;
  int ny = 2;

  void validate() const;
  double dx() const { return (xmax - xmin) / (nx - 1); }
  double dy() const { return (ymax - ymin) / (ny - 1); }
  double x(int i) const { return i == nx - 1 ? xmax : xmin + i * dx(); }
  double y(int j) const { return j == ny - 1 ? ymax : ymin + j * dy(); }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Rows are y-lines: values[j * nx + i] holds node (i, j).
struct FieldResult {
  GridSpec grid;
  std::vector<double> values;
  std::vector<std::uint8_t> escaped;
  DescriptorParams params;
  std::string kernel_name;
  NamedParameters kernel_parameters;
  double wall_time = 0.0;

  double at(int i, int j) const { return values[grid.index(i, j)]; }
  bool escaped_at(int i, int j) const { return escaped[grid.index(i, j)] != 0; }
};

// Evaluates md_point at every node. Rows are split into contiguous chunks, one
// per worker; each node is computed independently, so the result does not
// depend on the worker count.
FieldResult evaluate_field(const MapKernel& kernel, const GridSpec& grid, const DescriptorParams& params,
                           int workers = 1);

struct Marker {
  MapPoint point;
  double value = 0.0;
  int i = 0;
  int j = 0;
};

// k lowest non-escaped nodes, pairwise at least 3 cells apart (Chebyshev
// distance in index space). Throws FewerThanK if fewer qualify.
std::vector<Marker> min_markers(const FieldResult& field, int k);

struct FieldSummary {
  double min = 0.0;
  double max = 0.0;
  double median = 0.0;
  double escape_fraction = 0.0;
  std::size_t escaped = 0;
};

FieldSummary summarize(const FieldResult& field);

// Linear-interpolated q-quantile (q in [0, 1]) of the non-escaped values.
double percentile_non_escaped(const FieldResult& field, double q);

// Node nearest to a phase-space point (clamped to the grid).
std::pair<int, int> nearest_node(const GridSpec& grid, MapPoint q);

// Mask of non-escaped nodes whose value is at or below the given quantile of
// the non-escaped values.
std::vector<std::uint8_t> low_value_mask(const FieldResult& field, double fraction);

// Number of 8-connected components of a row-major mask.
int count_components(const std::vector<std::uint8_t>& mask, int nx, int ny);

}  // namespace dld
