#pragma once

#include <limits>
#include <ostream>
#include <vector>

#include "geohist/spgraph.hpp"

namespace geohist {

// Unreachable nodes carry IEEE infinity, never a large finite stand-in;
// consumers must clamp it explicitly (histfeat bins it into the last bin).
inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();
inline bool is_unreachable(double d) { return d == kUnreachable; }

// Shortest-path distances from one source superpixel to every superpixel
// of the same frame.
struct GeodesicField {
    int source = 0;
    std::vector<double> distances;
};

// Single-source shortest paths over the boundary-weighted frame graph
// (priority-queue Dijkstra, no early termination).
GeodesicField geodesic_from(const FrameGraph& graph, int source);

struct AllSourceGeodesics {
    std::vector<GeodesicField> fields;  // fields[i].source == i
    double max_finite_distance = 0.0;   // frame-global maximum finite distance
};

// One field per node. Sources are independent; the parallel version runs
// them across OpenMP threads over the shared read-only graph.
AllSourceGeodesics all_source_geodesics(const FrameGraph& graph);

// Serial reference implementation, kept for tests and the benchmark.
AllSourceGeodesics all_source_geodesics_serial(const FrameGraph& graph);

// Debug dump of the per-frame distance matrix, one CSV row per source.
// Unreachable entries print as "inf".
void write_distance_csv(std::ostream& out, const AllSourceGeodesics& all);

}  // namespace geohist
