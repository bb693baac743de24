#pragma once

// Two-dimensional maps with explicit forward and inverse steps.
//
// Time-indexing contract shared by every kernel: forward(q, n) advances a
// point from time n to time n+1 using the parameters of index n, and
// inverse(q, n) takes a point at time n+1 back to time n using the same
// index n. Stepping backward from time n to n-1 is therefore inverse(q, n-1).
// Autonomous kernels ignore n.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace dld {

using TimeIndex = std::int64_t;

struct MapPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const MapPoint&, const MapPoint&) = default;
};

using NamedParameters = std::vector<std::pair<std::string, double>>;

class MapKernel {
 public:
  virtual ~MapKernel() = default;

  virtual MapPoint forward(MapPoint q, TimeIndex n) const = 0;
  virtual MapPoint inverse(MapPoint q, TimeIndex n) const = 0;

  virtual std::string name() const = 0;
  virtual NamedParameters parameters() const = 0;
  virtual bool autonomous() const { return true; }
};

// ---------------------------------------------------------------------------
// Parameter sets

struct LinearSaddleParams {
  double lambda = 1.1;
  void validate() const;
};

struct RotatedSaddleParams {
  double lambda = 1.1;
  void validate() const;
};

// U(s) = lambda + u2 * s, the normal-form multiplier truncated after the
// quadratic term; s = xi * eta is conserved along orbits.
struct NormalFormParams {
  double lambda = 1.1;
  double u2 = 0.0;
  void validate() const;
  double multiplier(double s) const { return lambda + u2 * s; }
};

struct HenonParams {
  double A = 9.5;
  double B = -1.0;
  double epsilon = 0.0;
  void validate() const;
  bool area_preserving() const;
  double A_at(TimeIndex n) const;
};

// lambda_n > 1 for every index n. Either a rule over all integers or a finite
// table covering [first, first + size).
class LambdaSequence {
 public:
  static LambdaSequence constant(double lambda);
  static LambdaSequence table(TimeIndex first, std::vector<double> values);
  // lambda_n = values[n mod k] for all integers n.
  static LambdaSequence periodic(std::vector<double> values);
  static LambdaSequence rule(std::function<double(TimeIndex)> fn, std::string description);

  double at(TimeIndex n) const;
  const std::string& description() const { return description_; }
  bool is_constant() const { return constant_; }

 private:
  LambdaSequence() = default;

  std::function<double(TimeIndex)> fn_;
  std::vector<double> table_;
  TimeIndex first_ = 0;
  bool finite_ = false;
  bool constant_ = false;
  std::string description_;
};

// ---------------------------------------------------------------------------
// Built-in kernels

// (x, y) -> (lambda x, y / lambda).
class LinearSaddle final : public MapKernel {
 public:
  explicit LinearSaddle(LinearSaddleParams params);
  MapPoint forward(MapPoint q, TimeIndex n) const override;
  MapPoint inverse(MapPoint q, TimeIndex n) const override;
  std::string name() const override { return "linear-saddle"; }
  NamedParameters parameters() const override;
  const LinearSaddleParams& params() const { return params_; }

 private:
  LinearSaddleParams params_;
};

// q -> A q with A = (1/(2 lambda)) [[1+l^2, 1-l^2], [1-l^2, 1+l^2]].
// A (1,1) = (1/lambda)(1,1): the diagonal y = x is the stable direction.
// A (1,-1) = lambda (1,-1): the anti-diagonal y = -x is the unstable direction.
class RotatedSaddle final : public MapKernel {
 public:
  explicit RotatedSaddle(RotatedSaddleParams params);
  MapPoint forward(MapPoint q, TimeIndex n) const override;
  MapPoint inverse(MapPoint q, TimeIndex n) const override;
  std::string name() const override { return "rotated-saddle"; }
  NamedParameters parameters() const override;
  const RotatedSaddleParams& params() const { return params_; }

 private:
  RotatedSaddleParams params_;
  double diag_;
  double off_;
};

// (xi, eta) -> (U(s) xi, eta / U(s)), s = xi eta. Throws NonPositiveMultiplier
// where U(s) <= 0.
class NormalForm final : public MapKernel {
 public:
  explicit NormalForm(NormalFormParams params);
  MapPoint forward(MapPoint q, TimeIndex n) const override;
  MapPoint inverse(MapPoint q, TimeIndex n) const override;
  std::string name() const override { return "normal-form"; }
  NamedParameters parameters() const override;
  const NormalFormParams& params() const { return params_; }

 private:
  double checked_multiplier(MapPoint q) const;
  NormalFormParams params_;
};

// (x, y) -> (lambda_n x, y / lambda_n).
class NonautonomousLinear final : public MapKernel {
 public:
  explicit NonautonomousLinear(LambdaSequence sequence);
  MapPoint forward(MapPoint q, TimeIndex n) const override;
  MapPoint inverse(MapPoint q, TimeIndex n) const override;
  std::string name() const override { return "nonautonomous-linear"; }
  NamedParameters parameters() const override;
  bool autonomous() const override { return false; }
  const LambdaSequence& sequence() const { return sequence_; }

 private:
  LambdaSequence sequence_;
};

// (x, y) -> (A_n + B y - x^2, x) with A_n = A + epsilon cos(n), n in radians.
class Henon final : public MapKernel {
 public:
  explicit Henon(HenonParams params);
  MapPoint forward(MapPoint q, TimeIndex n) const override;
  MapPoint inverse(MapPoint q, TimeIndex n) const override;
  std::string name() const override { return "henon"; }
  NamedParameters parameters() const override;
  bool autonomous() const override { return params_.epsilon == 0.0; }
  const HenonParams& params() const { return params_; }

 private:
  HenonParams params_;
};

// Rigid rotation by a fixed angle. Area preserving, no hyperbolic points;
// used as a negative control for manifold detection.
class Rotation final : public MapKernel {
 public:
  explicit Rotation(double angle);
  MapPoint forward(MapPoint q, TimeIndex n) const override;
  MapPoint inverse(MapPoint q, TimeIndex n) const override;
  std::string name() const override { return "rotation"; }
  NamedParameters parameters() const override;

 private:
  double angle_;
  double c_;
  double s_;
};

// ---------------------------------------------------------------------------
// Free functions

MapPoint linear_saddle_step(MapPoint q, const LinearSaddleParams& params);
MapPoint rotated_saddle_step(MapPoint q, const RotatedSaddleParams& params);
MapPoint normal_form_step(MapPoint q, const NormalFormParams& params);
MapPoint nonautonomous_linear_step(MapPoint q, TimeIndex n, const LambdaSequence& seq);
MapPoint henon_step(MapPoint q, TimeIndex n, const HenonParams& params);

// A_2 = (5 + 2 sqrt 5)(1 + |B|)^2 / 4: above it the Henon map carries a
// hyperbolic invariant Cantor set (chaotic saddle).
double henon_chaos_threshold(double B);

// Fixed points of the autonomous Henon map; both lie on the diagonal x = y.
// Empty when the discriminant is negative.
std::vector<MapPoint> henon_fixed_points(double A, double B);

// ---------------------------------------------------------------------------
// Registry

struct KernelSpec {
  std::string name;
  std::map<std::string, double> values;
  std::vector<double> lambda_cycle;  // nonautonomous-linear only
};

const std::vector<std::string>& kernel_names();
std::unique_ptr<MapKernel> make_kernel(const KernelSpec& spec);

}  // namespace dld
