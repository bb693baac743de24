#include "dld/map_kernel.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include "dld/errors.hpp"

namespace dld {

namespace {

void require_expanding(double lambda, const char* what) {
  if (!(lambda > 1.0) || !std::isfinite(lambda)) {
    std::ostringstream os;
    os << what << " must be a finite value > 1, got " << lambda;
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
}

double lookup(const KernelSpec& spec, const std::string& key, double fallback) {
  auto it = spec.values.find(key);
  return it == spec.values.end() ? fallback : it->second;
}

}  // namespace

void LinearSaddleParams::validate() const { require_expanding(lambda, "lambda"); }
void RotatedSaddleParams::validate() const { require_expanding(lambda, "lambda"); }

void NormalFormParams::validate() const {
  require_expanding(lambda, "lambda");
  if (!std::isfinite(u2)) throw Error(ErrorCode::InvalidArgument, "u2 must be finite");
}

void HenonParams::validate() const {
  if (!std::isfinite(A) || !std::isfinite(B) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::InvalidArgument, "Henon parameters must be finite");
  }
  if (B == 0.0) throw Error(ErrorCode::InvalidArgument, "Henon map is not invertible for B = 0");
  if (epsilon < 0.0) throw Error(ErrorCode::InvalidArgument, "epsilon must be >= 0");
}

bool HenonParams::area_preserving() const { return std::fabs(B) == 1.0; }

double HenonParams::A_at(TimeIndex n) const {
  if (epsilon == 0.0) return A;
  return A + epsilon * std::cos(static_cast<double>(n));
}

// ---------------------------------------------------------------------------
// LambdaSequence

LambdaSequence LambdaSequence::constant(double lambda) {
  require_expanding(lambda, "lambda");
  LambdaSequence seq;
  seq.fn_ = [lambda](TimeIndex) { return lambda; };
  seq.constant_ = true;
  std::ostringstream os;
  os << "constant(" << lambda << ")";
  seq.description_ = os.str();
  return seq;
}

LambdaSequence LambdaSequence::table(TimeIndex first, std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "lambda table is empty");
  for (double v : values) require_expanding(v, "lambda_n");
  LambdaSequence seq;
  seq.table_ = std::move(values);
  seq.first_ = first;
  seq.finite_ = true;
  std::ostringstream os;
  os << "table[" << first << ", " << first + static_cast<TimeIndex>(seq.table_.size()) << ")";
  seq.description_ = os.str();
  return seq;
}

LambdaSequence LambdaSequence::periodic(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "lambda cycle is empty");
  for (double v : values) require_expanding(v, "lambda_n");
  LambdaSequence seq;
  const auto k = static_cast<TimeIndex>(values.size());
  seq.constant_ = values.size() == 1;
  std::ostringstream os;
  os << "periodic(";
  for (std::size_t i = 0; i < values.size(); ++i) os << (i ? "," : "") << values[i];
  os << ")";
  seq.description_ = os.str();
  seq.fn_ = [values = std::move(values), k](TimeIndex n) {
    TimeIndex r = n % k;
    if (r < 0) r += k;
    return values[static_cast<std::size_t>(r)];
  };
  return seq;
}

LambdaSequence LambdaSequence::rule(std::function<double(TimeIndex)> fn, std::string description) {
  if (!fn) throw Error(ErrorCode::InvalidArgument, "empty lambda rule");
  LambdaSequence seq;
  seq.fn_ = std::move(fn);
  seq.description_ = std::move(description);
  return seq;
}

double LambdaSequence::at(TimeIndex n) const {
  if (finite_) {
    if (n < first_ || n >= first_ + static_cast<TimeIndex>(table_.size())) {
      std::ostringstream os;
      os << "lambda index " << n << " outside " << description_;
      throw Error(ErrorCode::IndexOutOfRange, os.str());
    }
    return table_[static_cast<std::size_t>(n - first_)];
  }
  const double v = fn_(n);
  if (!(v > 1.0)) {
    std::ostringstream os;
    os << "lambda_" << n << " = " << v << " is not > 1";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  return v;
}

// ---------------------------------------------------------------------------
// Step functions

MapPoint linear_saddle_step(MapPoint q, const LinearSaddleParams& params) {
  return {params.lambda * q.x, q.y / params.lambda};
}

MapPoint rotated_saddle_step(MapPoint q, const RotatedSaddleParams& params) {
  return RotatedSaddle(params).forward(q, 0);
}

MapPoint normal_form_step(MapPoint q, const NormalFormParams& params) {
  return NormalForm(params).forward(q, 0);
}

MapPoint nonautonomous_linear_step(MapPoint q, TimeIndex n, const LambdaSequence& seq) {
  const double lambda = seq.at(n);
  return {lambda * q.x, q.y / lambda};
}

MapPoint henon_step(MapPoint q, TimeIndex n, const HenonParams& params) {
  return {params.A_at(n) + params.B * q.y - q.x * q.x, q.x};
}

double henon_chaos_threshold(double B) {
  const double s = 1.0 + std::fabs(B);
  return (5.0 + 2.0 * std::sqrt(5.0)) * s * s / 4.0;
}

std::vector<MapPoint> henon_fixed_points(double A, double B) {
  // x = A + B x - x^2  <=>  x^2 + (1 - B) x - A = 0
  const double b = 1.0 - B;
  const double disc = b * b + 4.0 * A;
  if (disc < 0.0) return {};
  const double r = std::sqrt(disc);
  const double lo = (-b - r) / 2.0;
  const double hi = (-b + r) / 2.0;
  if (disc == 0.0) return {{lo, lo}};
  return {{lo, lo}, {hi, hi}};
}

// ---------------------------------------------------------------------------
// Kernels

LinearSaddle::LinearSaddle(LinearSaddleParams params) : params_(params) { params_.validate(); }

MapPoint LinearSaddle::forward(MapPoint q, TimeIndex) const {
  return linear_saddle_step(q, params_);
}

MapPoint LinearSaddle::inverse(MapPoint q, TimeIndex) const {
  return {q.x / params_.lambda, params_.lambda * q.y};
}

NamedParameters LinearSaddle::parameters() const { return {{"lambda", params_.lambda}}; }

RotatedSaddle::RotatedSaddle(RotatedSaddleParams params) : params_(params) {
  params_.validate();
  const double l = params_.lambda;
  diag_ = (1.0 + l * l) / (2.0 * l);
  off_ = (1.0 - l * l) / (2.0 * l);
}

MapPoint RotatedSaddle::forward(MapPoint q, TimeIndex) const {
  return {diag_ * q.x + off_ * q.y, off_ * q.x + diag_ * q.y};
}

// A^{-1} = (1/(2 lambda)) [[1+l^2, l^2-1], [l^2-1, 1+l^2]] since det A = 1.
MapPoint RotatedSaddle::inverse(MapPoint q, TimeIndex) const {
  return {diag_ * q.x - off_ * q.y, -off_ * q.x + diag_ * q.y};
}

NamedParameters RotatedSaddle::parameters() const { return {{"lambda", params_.lambda}}; }

NormalForm::NormalForm(NormalFormParams params) : params_(params) { params_.validate(); }

double NormalForm::checked_multiplier(MapPoint q) const {
  const double u = params_.multiplier(q.x * q.y);
  if (!(u > 0.0)) {
    std::ostringstream os;
    os << "U(xi*eta) = " << u << " at (" << q.x << ", " << q.y << ")";
    throw Error(ErrorCode::NonPositiveMultiplier, os.str());
  }
  return u;
}

MapPoint NormalForm::forward(MapPoint q, TimeIndex) const {
  const double u = checked_multiplier(q);
  return {u * q.x, q.y / u};
}

// xi eta is conserved, so the image carries the same multiplier as its preimage.
MapPoint NormalForm::inverse(MapPoint q, TimeIndex) const {
  const double u = checked_multiplier(q);
  return {q.x / u, u * q.y};
}

NamedParameters NormalForm::parameters() const {
  return {{"lambda", params_.lambda}, {"u2", params_.u2}};
}

NonautonomousLinear::NonautonomousLinear(LambdaSequence sequence) : sequence_(std::move(sequence)) {}

MapPoint NonautonomousLinear::forward(MapPoint q, TimeIndex n) const {
  return nonautonomous_linear_step(q, n, sequence_);
}

MapPoint NonautonomousLinear::inverse(MapPoint q, TimeIndex n) const {
  const double lambda = sequence_.at(n);
  return {q.x / lambda, lambda * q.y};
}

NamedParameters NonautonomousLinear::parameters() const { return {}; }

Henon::Henon(HenonParams params) : params_(params) {
  params_.validate();
  if (!params_.area_preserving()) {
    std::cerr << "warning: Henon map with |B| = " << std::fabs(params_.B)
              << " is not area preserving\n";
  }
}

MapPoint Henon::forward(MapPoint q, TimeIndex n) const { return henon_step(q, n, params_); }

MapPoint Henon::inverse(MapPoint q, TimeIndex n) const {
  return {q.y, (q.x - params_.A_at(n) + q.y * q.y) / params_.B};
}

NamedParameters Henon::parameters() const {
  return {{"A", params_.A}, {"B", params_.B}, {"epsilon", params_.epsilon}};
}

Rotation::Rotation(double angle) : angle_(angle), c_(std::cos(angle)), s_(std::sin(angle)) {
  if (!std::isfinite(angle)) throw Error(ErrorCode::InvalidArgument, "rotation angle must be finite");
}

MapPoint Rotation::forward(MapPoint q, TimeIndex) const {
  return {c_ * q.x - s_ * q.y, s_ * q.x + c_ * q.y};
}

MapPoint Rotation::inverse(MapPoint q, TimeIndex) const {
  return {c_ * q.x + s_ * q.y, -s_ * q.x + c_ * q.y};
}

NamedParameters Rotation::parameters() const { return {{"theta", angle_}}; }

// ---------------------------------------------------------------------------
// Registry

const std::vector<std::string>& kernel_names() {
  static const std::vector<std::string> names = {
      "linear-saddle", "rotated-saddle", "normal-form", "nonautonomous-linear", "henon", "rotation"};
  return names;
}

std::unique_ptr<MapKernel> make_kernel(const KernelSpec& spec) {
  if (spec.name == "linear-saddle") {
    return std::make_unique<LinearSaddle>(LinearSaddleParams{lookup(spec, "lambda", 1.1)});
  }
  if (spec.name == "rotated-saddle") {
    return std::make_unique<RotatedSaddle>(RotatedSaddleParams{lookup(spec, "lambda", 1.1)});
  }
  if (spec.name == "normal-form") {
    return std::make_unique<NormalForm>(
        NormalFormParams{lookup(spec, "lambda", 1.1), lookup(spec, "u2", 0.0)});
  }
  if (spec.name == "nonautonomous-linear") {
    if (!spec.lambda_cycle.empty()) {
      return std::make_unique<NonautonomousLinear>(LambdaSequence::periodic(spec.lambda_cycle));
    }
    return std::make_unique<NonautonomousLinear>(LambdaSequence::constant(lookup(spec, "lambda", 1.1)));
  }
  if (spec.name == "henon") {
    return std::make_unique<Henon>(HenonParams{
        lookup(spec, "A", 9.5), lookup(spec, "B", -1.0), lookup(spec, "epsilon", 0.0)});
  }
  if (spec.name == "rotation") {
    return std::make_unique<Rotation>(lookup(spec, "theta", 0.3));
  }
  std::ostringstream os;
  os << "unknown map '" << spec.name << "'; available:";
  for (const auto& n : kernel_names()) os << ' ' << n;
  throw Error(ErrorCode::InvalidArgument, os.str());
}

}  // namespace dld
