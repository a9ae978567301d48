#include "geohist/histfeat.hpp"

#include <cmath>
#include <cstdio>

namespace geohist {

double Histogram2D::total() const {
    double s = 0.0;
    for (double v : mass) s += v;
    return s;
}

double Histogram1D::total() const {
    double s = 0.0;
    for (double v : mass) s += v;
    return s;
}

Histogram1D intensity_marginal(const Histogram2D& h) {
    Histogram1D m;
    m.mass.assign(h.geodesic_bins, 0.0);
    for (int i = 0; i < h.intensity_bins; ++i)
        for (int g = 0; g < h.geodesic_bins; ++g) m.mass[g] += h.cell(i, g);
    return m;
}

double spatial_weight(const Superpixel& x, const Superpixel& y,
                      long long frame_area, double mu) {
    require(frame_area > 0, "zero frame area");
    const double dx = x.centroid_x - y.centroid_x;
    const double dy = x.centroid_y - y.centroid_y;
    const double l2 = std::sqrt(dx * dx + dy * dy);
    return (static_cast<double>(y.area) / static_cast<double>(frame_area)) *
           std::exp(-mu * l2);
}

int intensity_bin(double intensity, int bins) {
    const int b = static_cast<int>(std::floor(intensity * bins));
    return b < 0 ? 0 : (b >= bins ? bins - 1 : b);
}

int geodesic_bin(double distance, double upper, int bins) {
    if (is_unreachable(distance)) return bins - 1;
    const int b = static_cast<int>(std::floor(distance / upper * bins));
    return b < 0 ? 0 : (b >= bins ? bins - 1 : b);
}

namespace {

void check_inputs(int x, const FrameGraph& graph, const GeodesicField& field,
                  const BinningConfig& cfg, double geodesic_upper) {
    require(x >= 0 && x < static_cast<int>(graph.nodes.size()), "source index out of range");
    require(field.distances.size() == graph.nodes.size(),
            "geodesic field size does not match graph");
    require(cfg.intensity_bins >= 1 && cfg.geodesic_bins >= 1, "bin counts must be >= 1");
    require(cfg.mu >= 0.0, "mu must be >= 0");
    require(geodesic_upper > 0.0, "geodesic_upper must be > 0");
}

// Shared voting loop: fn(contributor, i_bin, g_bin, weight).
template <typename Fn>
void for_each_vote(int x, const FrameGraph& graph, const GeodesicField& field,
                   const BinningConfig& cfg, double geodesic_upper, Fn&& fn) {
    const Superpixel& sx = graph.nodes[x];
    for (const Superpixel& sy : graph.nodes) {
        if (sy.id == x && !cfg.include_self) continue;
        const double w = spatial_weight(sx, sy, graph.frame_area, cfg.mu);
        const int ib = intensity_bin(sy.mean_intensity, cfg.intensity_bins);
        const int gb = geodesic_bin(field.distances[sy.id], geodesic_upper, cfg.geodesic_bins);
        fn(sy, ib, gb, w);
    }
}

}  // namespace

Histogram2D build_2d_histogram(int x, const FrameGraph& graph,
                               const GeodesicField& field,
                               const BinningConfig& cfg, double geodesic_upper) {
    check_inputs(x, graph, field, cfg, geodesic_upper);
    Histogram2D h(cfg.intensity_bins, cfg.geodesic_bins);
    for_each_vote(x, graph, field, cfg, geodesic_upper,
                  [&](const Superpixel&, int ib, int gb, double w) { h.cell(ib, gb) += w; });
    return h;
}

Histogram1D build_1d_histogram(int x, const FrameGraph& graph,
                               const GeodesicField& field,
                               const BinningConfig& cfg, double geodesic_upper) {
    check_inputs(x, graph, field, cfg, geodesic_upper);
    Histogram1D h;
    h.mass.assign(cfg.geodesic_bins, 0.0);
    for_each_vote(x, graph, field, cfg, geodesic_upper,
                  [&](const Superpixel&, int, int gb, double w) { h.mass[gb] += w; });
    return h;
}

PyramidFeature build_pyramid_feature(int x, const FrameGraph& graph,
                                     const GeodesicField& field,
                                     const BinningConfig& cfg,
                                     double geodesic_upper) {
    check_inputs(x, graph, field, cfg, geodesic_upper);
    PyramidFeature p;
    p.level0 = Histogram2D(cfg.intensity_bins, cfg.geodesic_bins);
    for (auto& c : p.level1) c = Histogram2D(cfg.intensity_bins, cfg.geodesic_bins);
    const double half_w = graph.width / 2.0;
    const double half_h = graph.height / 2.0;
    for_each_vote(x, graph, field, cfg, geodesic_upper,
                  [&](const Superpixel& sy, int ib, int gb, double w) {
                      p.level0.cell(ib, gb) += w;
                      // centroid exactly on W/2 (resp. H/2) goes right (bottom)
                      const int col = sy.centroid_x < half_w ? 0 : 1;
                      const int row = sy.centroid_y < half_h ? 0 : 1;
                      p.level1[row * 2 + col].cell(ib, gb) += w;
                  });
    return p;
}

double resolve_geodesic_upper(const BinningConfig& cfg, double max_finite_distance) {
    if (cfg.range.per_frame_max)
        return max_finite_distance > 0.0 ? max_finite_distance : 1.0;
    require(cfg.range.fixed_upper > 0.0, "fixed geodesic range must be > 0");
    return cfg.range.fixed_upper;
}

FrameFeatures compute_frame_features(const FrameGraph& graph,
                                     const AllSourceGeodesics& all,
                                     const BinningConfig& cfg) {
    require(all.fields.size() == graph.nodes.size(),
            "geodesic fields do not match graph");
    FrameFeatures out;
    out.geodesic_upper = resolve_geodesic_upper(cfg, all.max_finite_distance);
    const int n = static_cast<int>(graph.nodes.size());
    out.features.resize(n);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i)
        out.features[i] = build_pyramid_feature(i, graph, all.fields[i], cfg, out.geodesic_upper);
    return out;
}

FrameFeatures compute_frame_features_serial(const FrameGraph& graph,
                                            const AllSourceGeodesics& all,
                                            const BinningConfig& cfg) {
    require(all.fields.size() == graph.nodes.size(),
            "geodesic fields do not match graph");
    FrameFeatures out;
    out.geodesic_upper = resolve_geodesic_upper(cfg, all.max_finite_distance);
    const int n = static_cast<int>(graph.nodes.size());
    out.features.resize(n);
    for (int i = 0; i < n; ++i)
        out.features[i] = build_pyramid_feature(i, graph, all.fields[i], cfg, out.geodesic_upper);
    return out;
}

void write_features_csv_header(std::ostream& out) {
    out << "frame,superpixel_id,level,cell,i_bin,g_bin,mass\n";
}

static void write_hist_rows(std::ostream& out, int frame, int id, int level,
                            int cell, const Histogram2D& h) {
    char buf[40];
    for (int i = 0; i < h.intensity_bins; ++i) {
        for (int g = 0; g < h.geodesic_bins; ++g) {
            const double m = h.cell(i, g);
            if (m == 0.0) continue;
            std::snprintf(buf, sizeof(buf), "%.9g", m);
            out << frame << ',' << id << ',' << level << ',' << cell << ',' << i
                << ',' << g << ',' << buf << '\n';
        }
    }
}

void write_features_csv(std::ostream& out, int frame, const FrameFeatures& feats) {
    for (size_t id = 0; id < feats.features.size(); ++id) {
        const PyramidFeature& p = feats.features[id];
        write_hist_rows(out, frame, static_cast<int>(id), 0, 0, p.level0);
        for (int c = 0; c < 4; ++c)
            write_hist_rows(out, frame, static_cast<int>(id), 1, c, p.level1[c]);
    }
}

}  // namespace geohist
