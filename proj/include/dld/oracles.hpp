#pragma once

// Closed-form values of MD_p (p <= 1) for the analytically tractable maps.
// These are evaluated without iterating any map and serve as references for
// the orbit-summing descriptor.

#include "dld/map_kernel.hpp"

namespace dld {

// Factor f(lambda, p, N) with MD_p(x0, y0) = (|x0|^p + |y0|^p) f for the
// linear saddle:
//   |lambda-1|^p (lambda^{Np}-1)/(lambda^p-1)
//     + |1/lambda-1|^p (1-lambda^{-Np})/(1-lambda^{-p}).
// Throws DegenerateRate for lambda == 1.
double f_linear(double lambda, double p, int N);

double md_linear_saddle(double x0, double y0, double lambda, double p, int N);

// Coefficients of |x0|^p and |y0|^p for the nonautonomous linear saddle,
// built from the products of lambda_n over the window [n0 - N, n0 + N - 1].
struct NonautonomousCoefficients {
  double x_coefficient = 0.0;  // f(Lambda, p, N)
  double y_coefficient = 0.0;  // g(Lambda*, p, N)
};

NonautonomousCoefficients nonautonomous_coefficients(const LambdaSequence& seq, double p, int N,
                                                     TimeIndex n0 = 0);

double md_nonautonomous_linear(double x0, double y0, const LambdaSequence& seq, double p, int N,
                               TimeIndex n0 = 0);

// (|xi0|^p + |eta0|^p) f(U, p, N) with U = lambda + u2 xi0 eta0, evaluated
// once at the initial condition. Throws DegenerateRate when U <= 1.
double md_normal_form(double xi0, double eta0, const NormalFormParams& params, double p, int N);

// Slope of the i-th singular line y0 = m x0 of the rotated saddle:
//   (l^{2(i+1)} - l^{2(i+1)-1} - l + 1) / (l^{2(i+1)} - l^{2(i+1)-1} + l - 1).
// The companion line has slope 1/m.
double slope_m(double lambda, int i);
double slope_reciprocal(double lambda, int i);

}  // namespace dld
