#pragma once

#include <array>
#include <span>

#include "geohist/histfeat.hpp"

namespace geohist {

enum class Metric { Chi2, Emd };

// Comparison weights for pyramid features. Defaults give each level equal
// total weight (1.0 vs 4 x 0.25).
struct PyramidWeights {
    double level0 = 1.0;
    std::array<double, 4> level1 = {0.25, 0.25, 0.25, 0.25};
};

// Chi-square distance: 0.5 * sum (p-q)^2/(p+q); cells with p+q = 0
// contribute 0.
double chi_square_2d(const Histogram2D& p, const Histogram2D& q);

// One-dimensional EMD with unit ground distance between adjacent bins:
// the sum of absolute cumulative differences. Unequal totals incur the
// terminal cumulative gap at every remaining step.
double emd_1d(std::span<const double> p, std::span<const double> q);
double emd_1d(const Histogram1D& p, const Histogram1D& q);

// Sum of the 1D EMDs at each intensity bin of the 2D histogram.
double emd_2d(const Histogram2D& p, const Histogram2D& q);

double histogram_distance(const Histogram2D& p, const Histogram2D& q, Metric metric);

// w0 * d(level0) + sum_c w1[c] * d(level1 cell c).
double pyramid_distance(const PyramidFeature& a, const PyramidFeature& b,
                        Metric metric, const PyramidWeights& w);

}  // namespace geohist
