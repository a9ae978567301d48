#include "geohist/geodesic.hpp"

#include <cstdio>
#include <queue>

namespace geohist {

GeodesicField geodesic_from(const FrameGraph& graph, int source) {
    const int n = static_cast<int>(graph.nodes.size());
    require(source >= 0 && source < n, "source index out of range");

    GeodesicField field;
    field.source = source;
    field.distances.assign(n, kUnreachable);
    field.distances[source] = 0.0;

    using Item = std::pair<double, int>;  // (distance, node)
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    pq.emplace(0.0, source);
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > field.distances[u]) continue;  // stale entry
        for (const auto& [v, w] : graph.adjacency[u]) {
            const double nd = d + w;
            if (nd < field.distances[v]) {
                field.distances[v] = nd;
                pq.emplace(nd, v);
            }
        }
    }
    return field;
}

static double max_finite(const std::vector<GeodesicField>& fields) {
    double m = 0.0;
    for (const auto& f : fields)
        for (double d : f.distances)
            if (!is_unreachable(d) && d > m) m = d;
    return m;
}

AllSourceGeodesics all_source_geodesics(const FrameGraph& graph) {
    const int n = static_cast<int>(graph.nodes.size());
    AllSourceGeodesics out;
    out.fields.resize(n);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) out.fields[i] = geodesic_from(graph, i);
    out.max_finite_distance = max_finite(out.fields);
    return out;
}

AllSourceGeodesics all_source_geodesics_serial(const FrameGraph& graph) {
    const int n = static_cast<int>(graph.nodes.size());
    AllSourceGeodesics out;
    out.fields.resize(n);
    for (int i = 0; i < n; ++i) out.fields[i] = geodesic_from(graph, i);
    out.max_finite_distance = max_finite(out.fields);
    return out;
}

void write_distance_csv(std::ostream& out, const AllSourceGeodesics& all) {
    char buf[32];
    for (const auto& field : all.fields) {
        for (size_t j = 0; j < field.distances.size(); ++j) {
            if (j) out << ',';
            if (is_unreachable(field.distances[j])) {
                out << "inf";
            } else {
                std::snprintf(buf, sizeof(buf), "%.12g", field.distances[j]);
                out << buf;
            }
        }
        out << '\n';
    }
}

}  // namespace geohist
