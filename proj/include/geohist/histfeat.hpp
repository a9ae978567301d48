#pragma once

#include <array>
#include <ostream>
#include <vector>

#include "geohist/geodesic.hpp"
#include "geohist/spgraph.hpp"

namespace geohist {

// Binning range for the geodesic axis: the per-frame maximum finite distance
// (default) or a fixed upper bound for cross-frame comparability experiments.
struct GeodesicRange {
    bool per_frame_max = true;
    double fixed_upper = 0.0;  // used when per_frame_max is false; must be > 0
};

struct BinningConfig {
    int intensity_bins = 13;
    int geodesic_bins = 9;
    GeodesicRange range;
    double mu = 0.02;          // spatial decay, 1/pixels
    bool include_self = false;
};

// Joint intensity-geodesic histogram. Row-major over intensity bins:
// mass[i_bin * geodesic_bins + g_bin].
struct Histogram2D {
    int intensity_bins = 0;
    int geodesic_bins = 0;
    std::vector<double> mass;

    Histogram2D() = default;
    Histogram2D(int ib, int gb)
        : intensity_bins(ib), geodesic_bins(gb),
          mass(static_cast<size_t>(ib) * gb, 0.0) {}

    double cell(int i, int g) const { return mass[static_cast<size_t>(i) * geodesic_bins + g]; }
    double& cell(int i, int g) { return mass[static_cast<size_t>(i) * geodesic_bins + g]; }
    double total() const;
    bool same_shape(const Histogram2D& o) const {
        return intensity_bins == o.intensity_bins && geodesic_bins == o.geodesic_bins;
    }
};

struct Histogram1D {
    std::vector<double> mass;  // one entry per geodesic bin
    double total() const;
};

// Sum over the intensity axis; equals the matching Histogram1D by construction.
Histogram1D intensity_marginal(const Histogram2D& h);

// level0 covers the whole frame; level1 holds the four 2x2 frame cells in
// row-major order. Cell masses partition the level0 mass by contributor.
struct PyramidFeature {
    Histogram2D level0;
    std::array<Histogram2D, 4> level1;
};

// Voting weight of superpixel y into the histogram of x:
// (|y|/|f|) * exp(-mu * L2(centroid_x, centroid_y)).
double spatial_weight(const Superpixel& x, const Superpixel& y,
                      long long frame_area, double mu);

int intensity_bin(double intensity, int bins);
// Unreachable distances clamp to the last bin.
int geodesic_bin(double distance, double upper, int bins);

// geodesic_upper must be > 0; under per-frame-max mode callers pass the
// frame-global maximum finite distance reported by all_source_geodesics.
Histogram2D build_2d_histogram(int x, const FrameGraph& graph,
                               const GeodesicField& field,
                               const BinningConfig& cfg, double geodesic_upper);
Histogram1D build_1d_histogram(int x, const FrameGraph& graph,
                               const GeodesicField& field,
                               const BinningConfig& cfg, double geodesic_upper);
PyramidFeature build_pyramid_feature(int x, const FrameGraph& graph,
                                     const GeodesicField& field,
                                     const BinningConfig& cfg,
                                     double geodesic_upper);

// Turns the configured range into the concrete upper bound for one frame.
// A frame whose distances are all zero gets upper = 1 (everything lands in
// bin 0 regardless).
double resolve_geodesic_upper(const BinningConfig& cfg, double max_finite_distance);

struct FrameFeatures {
    std::vector<PyramidFeature> features;  // one per node
    double geodesic_upper = 0.0;
};

// Feature build for every superpixel of a frame; sources are independent,
// the parallel version distributes them across OpenMP threads.
FrameFeatures compute_frame_features(const FrameGraph& graph,
                                     const AllSourceGeodesics& all,
                                     const BinningConfig& cfg);
// Serial reference kept for tests and the benchmark.
FrameFeatures compute_frame_features_serial(const FrameGraph& graph,
                                            const AllSourceGeodesics& all,
                                            const BinningConfig& cfg);

// CSV dump: header frame,superpixel_id,level,cell,i_bin,g_bin,mass with
// masses at 9 significant digits; zero cells are omitted.
void write_features_csv_header(std::ostream& out);
void write_features_csv(std::ostream& out, int frame, const FrameFeatures& feats);

}  // namespace geohist
