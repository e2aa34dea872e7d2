#pragma once

#include <vector>

namespace zenolab {

/// `count` points from lo to hi inclusive; count >= 2.
std::vector<double> lin_spaced(double lo, double hi, int count);

/// Geometric spacing; requires 0 < lo, hi.
std::vector<double> log_spaced(double lo, double hi, int count);

// Ordinary least squares y = slope * x + intercept.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace zenolab
