// Benchmarks the OpenMP kernels against their serial reference
// implementations: all-source geodesics, per-frame feature builds, Sobel
// boundary maps, and edge distance assignment.

#include <chrono>
#include <cstdio>
#include <random>

#include "geohist/pipeline.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace geohist;

namespace {

double wtime() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

FrameGraph grid_graph(int cols, int rows, std::mt19937_64& gen) {
    FrameGraph g;
    const int n = cols * rows;
    g.width = cols;
    g.height = rows;
    g.frame_area = n;
    g.nodes.resize(n);
    g.adjacency.resize(n);
    auto uni = [&] { return (gen() >> 11) * 0x1.0p-53; };
    for (int i = 0; i < n; ++i) {
        g.nodes[i].id = i;
        g.nodes[i].label = i;
        g.nodes[i].area = 1;
        g.nodes[i].centroid_x = i % cols;
        g.nodes[i].centroid_y = i / cols;
        g.nodes[i].mean_intensity = uni();
        g.label_to_node.emplace(i, i);
    }
    auto link = [&](int a, int b) {
        const double w = uni();
        g.edges.push_back({a, b, w});
        g.adjacency[a].emplace_back(b, w);
        g.adjacency[b].emplace_back(a, w);
    };
    for (int y = 0; y < rows; ++y)
        for (int x = 0; x < cols; ++x) {
            const int i = y * cols + x;
            if (x + 1 < cols) link(i, i + 1);
            if (y + 1 < rows) link(i, i + cols);
        }
    return g;
}

void row(const char* name, double serial, double parallel) {
    std::printf("%-28s %10.3f ms %10.3f ms %8.2fx\n", name, serial * 1e3,
                parallel * 1e3, serial / parallel);
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both columns are serial\n");
#endif
    std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    std::mt19937_64 gen(42);
    const FrameGraph g = grid_graph(25, 24, gen);  // 600 nodes
    const int reps = 20;

    double sink = 0.0;
    double t0 = wtime();
    AllSourceGeodesics all;
    for (int r = 0; r < reps; ++r) {
        all = all_source_geodesics_serial(g);
        sink += all.max_finite_distance;
    }
    const double geo_serial = (wtime() - t0) / reps;
    t0 = wtime();
    for (int r = 0; r < reps; ++r) {
        all = all_source_geodesics(g);
        sink += all.max_finite_distance;
    }
    const double geo_parallel = (wtime() - t0) / reps;
    row("all_source_geodesics", geo_serial, geo_parallel);

    BinningConfig cfg;
    t0 = wtime();
    FrameFeatures feats;
    for (int r = 0; r < reps; ++r) {
        feats = compute_frame_features_serial(g, all, cfg);
        sink += feats.geodesic_upper;
    }
    const double feat_serial = (wtime() - t0) / reps;
    t0 = wtime();
    for (int r = 0; r < reps; ++r) {
        feats = compute_frame_features(g, all, cfg);
        sink += feats.geodesic_upper;
    }
    const double feat_parallel = (wtime() - t0) / reps;
    row("compute_frame_features", feat_serial, feat_parallel);

    Image frame(1024, 1024);
    for (size_t i = 0; i < frame.size(); ++i)
        frame.values[i] = (gen() >> 11) * 0x1.0p-53;
    t0 = wtime();
    for (int r = 0; r < 5; ++r) sink += sobel_boundary_map_serial(frame, 2.0).values[0];
    const double sobel_serial = (wtime() - t0) / 5;
    t0 = wtime();
    for (int r = 0; r < 5; ++r) sink += sobel_boundary_map(frame, 2.0).values[0];
    const double sobel_parallel = (wtime() - t0) / 5;
    row("sobel_boundary_map", sobel_serial, sobel_parallel);

    std::vector<FrameGraph> graphs = {g, g};
    LabeledVolume sp(25, 24, 2);
    for (int t = 0; t < 2; ++t)
        for (int y = 0; y < 24; ++y)
            for (int x = 0; x < 25; ++x) sp.label(x, y, t) = y * 25 + x;
    SpatioTemporalGraph st = build_st_graph(graphs, sp);
    std::vector<FrameFeatures> ff = {feats, feats};
    PyramidWeights w;
    t0 = wtime();
    for (int r = 0; r < reps; ++r)
        assign_edge_distances_serial(st, graphs, ff, Metric::Chi2, true, w);
    const double edges_serial = (wtime() - t0) / reps;
    t0 = wtime();
    for (int r = 0; r < reps; ++r)
        assign_edge_distances(st, graphs, ff, Metric::Chi2, true, w);
    const double edges_parallel = (wtime() - t0) / reps;
    row("assign_edge_distances", edges_serial, edges_parallel);

    std::printf("(checksum %.3f)\n", sink);
    return 0;
}
