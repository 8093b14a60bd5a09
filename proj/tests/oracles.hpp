#pragma once

// Independent reference implementations used only by the tests.  None of
// them share code paths with the library: the matrix exponential is a
// scaled-squaring Taylor series (the library diagonalizes), the ODE
// reference is an exponential-midpoint stepper (the library uses RK4), the
// phase-insensitive distance scans a dense phase grid (the library minimizes
// analytically), and the trap averages come from Simpson quadrature and a
// closed-form integral.

#include <cmath>
#include <functional>
#include <limits>

#include "qutrit/algebra.hpp"

namespace oracle {

using qutrit::Mat3;
using qutrit::cplx;

// exp(m) by scaling-and-squaring with a plain Taylor series.
inline Mat3 expm_taylor(Mat3 m) {
  int squarings = 0;
  while (m.cwiseAbs().maxCoeff() > 0.5) {
    m /= 2;
    ++squarings;
  }
  Mat3 sum = Mat3::Identity();
  Mat3 term = Mat3::Identity();
  for (int k = 1; k <= 30; ++k) {
    term = (term * m) / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

// Reference integrator for dU/dt = G(t) U: exponential midpoint rule,
// U <- exp(h G(t + h/2)) U, with n uniform steps.
inline Mat3 integrate_midpoint(const std::function<Mat3(double)>& gen,
                               double t0, double duration, int n) {
  Mat3 u = Mat3::Identity();
  const double h = duration / n;
  for (int i = 0; i < n; ++i)
    u = expm_taylor(h * gen(t0 + (i + 0.5) * h)) * u;
  return u;
}

// min over a dense phase grid of ||u - e^{i theta} v||_F.
inline double grid_distance_mod_phase(const Mat3& u, const Mat3& v,
                                      int grid = 20000) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < grid; ++k) {
    const double th = 2 * qutrit::pi * k / grid;
    best = std::min(best, (u - std::exp(cplx(0, th)) * v).norm());
  }
  return best;
}

// Composite Simpson rule on [a, b] with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a,
                      double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3;
}

// Density-weighted mean of a quadratic-in-r^2 shift profile over the
// Thomas-Fermi distribution, in closed form:
//   <E> = edge + (center - edge) * <1 - r^2/R^2> = edge + (4/7)(center - edge)
// since <r^2/R^2> = int x^4 (1-x^2) dx / int x^2 (1-x^2) dx = 3/7.
inline double tf_mean_shift(double center, double edge) {
  return edge + (4.0 / 7.0) * (center - edge);
}

} // namespace oracle
