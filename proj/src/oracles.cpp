#include "dld/oracles.hpp"

#include <cmath>
#include <sstream>

#include "dld/errors.hpp"

namespace dld {

namespace {

constexpr double kLogOverflowGuard = 600.0;

void check_closed_form_args(double lambda, double p, int N) {
  if (!(p > 0.0)) throw Error(ErrorCode::InvalidArgument, "p must be > 0");
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "N must be >= 1");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::InvalidArgument, "rate must be finite and positive");
  }
  if (lambda == 1.0) throw Error(ErrorCode::DegenerateRate, "rate equals 1");
}

// sum_{k=0}^{N-1} r^k for r = exp(a), a != 0, without forming r^N directly.
double geometric_sum_log(double a, int N) {
  const double na = static_cast<double>(N) * a;
  if (na > kLogOverflowGuard) {
    // r^N (1 - r^{-N}) / (r - 1)
    return std::exp(na - std::log(std::expm1(a))) * -std::expm1(-na);
  }
  return std::expm1(na) / std::expm1(a);
}

}  // namespace

double f_linear(double lambda, double p, int N) {
  check_closed_form_args(lambda, p, N);
  const double a = p * std::log(lambda);
  // Expanding branch: |lambda-1|^p sum lambda^{kp}. Contracting branch:
  // |1/lambda-1|^p sum lambda^{-kp}, which never overflows.
  const double expanding = std::pow(std::fabs(lambda - 1.0), p) * geometric_sum_log(a, N);
  const double contracting = std::pow(std::fabs(1.0 / lambda - 1.0), p) * geometric_sum_log(-a, N);
  return expanding + contracting;
}

double md_linear_saddle(double x0, double y0, double lambda, double p, int N) {
  return (std::pow(std::fabs(x0), p) + std::pow(std::fabs(y0), p)) * f_linear(lambda, p, N);
}

NonautonomousCoefficients nonautonomous_coefficients(const LambdaSequence& seq, double p, int N,
                                                     TimeIndex n0) {
  if (!(p > 0.0)) throw Error(ErrorCode::InvalidArgument, "p must be > 0");
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "N must be >= 1");

  NonautonomousCoefficients c;

  // Forward half: x grows by lambda_i, y shrinks by 1/lambda_i.
  double grow = 1.0;
  double shrink = 1.0;
  for (int i = 0; i < N; ++i) {
    const double l = seq.at(n0 + i);
    if (l == 1.0) throw Error(ErrorCode::DegenerateRate, "lambda_n equals 1");
    c.x_coefficient += grow * std::pow(std::fabs(l - 1.0), p);
    c.y_coefficient += shrink * std::pow(std::fabs(1.0 / l - 1.0), p);
    grow *= std::pow(l, p);
    shrink *= std::pow(1.0 / l, p);
  }

  // Backward half: x shrinks by 1/lambda_i, y grows by lambda_i, i = -1 .. -N.
  grow = 1.0;
  shrink = 1.0;
  for (int k = 1; k <= N; ++k) {
    const double l = seq.at(n0 - k);
    if (l == 1.0) throw Error(ErrorCode::DegenerateRate, "lambda_n equals 1");
    c.x_coefficient += shrink * std::pow(std::fabs(1.0 - 1.0 / l), p);
    c.y_coefficient += grow * std::pow(std::fabs(1.0 - l), p);
    shrink *= std::pow(1.0 / l, p);
    grow *= std::pow(l, p);
  }
  return c;
}

double md_nonautonomous_linear(double x0, double y0, const LambdaSequence& seq, double p, int N,
                               TimeIndex n0) {
  const auto c = nonautonomous_coefficients(seq, p, N, n0);
  return std::pow(std::fabs(x0), p) * c.x_coefficient + std::pow(std::fabs(y0), p) * c.y_coefficient;
}

double md_normal_form(double xi0, double eta0, const NormalFormParams& params, double p, int N) {
  params.validate();
  const double u = params.multiplier(xi0 * eta0);
  if (!(u > 1.0)) {
    std::ostringstream os;
    os << "U(xi0*eta0) = " << u << " <= 1 at (" << xi0 << ", " << eta0
       << "); outside the hyperbolic neighborhood";
    throw Error(ErrorCode::DegenerateRate, os.str());
  }
  return (std::pow(std::fabs(xi0), p) + std::pow(std::fabs(eta0), p)) * f_linear(u, p, N);
}

// Numerator and denominator share the factor (l - 1), leaving
// (l^{2i+1} - 1) / (l^{2i+1} + 1) = tanh((2i+1) ln(l) / 2).
double slope_m(double lambda, int i) {
  if (!(lambda > 1.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be > 1");
  if (i < 0) throw Error(ErrorCode::InvalidArgument, "i must be >= 0");
  return std::tanh(0.5 * (2.0 * i + 1.0) * std::log(lambda));
}

double slope_reciprocal(double lambda, int i) { return 1.0 / slope_m(lambda, i); }

}  // namespace dld
