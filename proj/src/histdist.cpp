#include "geohist/histdist.hpp"

#include <cmath>

namespace geohist {

double chi_square_2d(const Histogram2D& p, const Histogram2D& q) {
    require(p.same_shape(q), "histogram shapes differ");
    double acc = 0.0;
    for (size_t i = 0; i < p.mass.size(); ++i) {
        const double s = p.mass[i] + q.mass[i];
        if (s > 0.0) {
            const double d = p.mass[i] - q.mass[i];
            acc += d * d / s;
        }
    }
    return 0.5 * acc;
}

double emd_1d(std::span<const double> p, std::span<const double> q) {
    require(p.size() == q.size(), "histogram lengths differ");
    double cp = 0.0, cq = 0.0, acc = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        cp += p[i];
        cq += q[i];
        acc += std::fabs(cp - cq);
    }
    return acc;
}

double emd_1d(const Histogram1D& p, const Histogram1D& q) {
    return emd_1d(std::span<const double>(p.mass), std::span<const double>(q.mass));
}

double emd_2d(const Histogram2D& p, const Histogram2D& q) {
    require(p.same_shape(q), "histogram shapes differ");
    double acc = 0.0;
    for (int i = 0; i < p.intensity_bins; ++i) {
        const size_t off = static_cast<size_t>(i) * p.geodesic_bins;
        acc += emd_1d(std::span<const double>(p.mass.data() + off, p.geodesic_bins),
                      std::span<const double>(q.mass.data() + off, q.geodesic_bins));
    }
    return acc;
}

double histogram_distance(const Histogram2D& p, const Histogram2D& q, Metric metric) {
    return metric == Metric::Chi2 ? chi_square_2d(p, q) : emd_2d(p, q);
}

double pyramid_distance(const PyramidFeature& a, const PyramidFeature& b,
                        Metric metric, const PyramidWeights& w) {
    double d = w.level0 * histogram_distance(a.level0, b.level0, metric);
    for (int c = 0; c < 4; ++c)
        d += w.level1[c] * histogram_distance(a.level1[c], b.level1[c], metric);
    return d;
}

}  // namespace geohist
