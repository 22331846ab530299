#pragma once

#include <span>
#include <vector>

#include "cptshape/types.hpp"

namespace cpt {

/// Piecewise-linear interpolation on strictly increasing abscissae,
/// clamped to the end values outside the table.
double interp_linear(std::span<const double> x, std::span<const double> y,
                     double at);

/// Trapezoidal integral of uniformly spaced samples.
double trapezoid(std::span<const double> y, double dx);

/// Running trapezoidal integral; out[0] == 0.
std::vector<double> cumulative_trapezoid(std::span<const double> y,
                                         double dx);

/// Second-order centred differences, one-sided at the ends.
std::vector<cplx> centered_difference(std::span<const cplx> y, double dx);
std::vector<double> centered_difference(std::span<const double> y, double dx);

std::vector<double> abs_values(std::span<const cplx> y);

/// sqrt(sum |a - b|^2) / sqrt(sum |b|^2); zero when both vanish.
double relative_l2(std::span<const cplx> a, std::span<const cplx> reference);
double relative_l2(std::span<const double> a,
                   std::span<const double> reference);

} // namespace cpt
