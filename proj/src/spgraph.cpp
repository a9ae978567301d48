#include "geohist/spgraph.hpp"

#include <algorithm>
#include <map>

namespace geohist {

FrameGraph build_frame_graph(const LabeledVolume& labels, int frame,
                             const Image& intensity, const Image& boundary) {
    require(frame >= 0 && frame < labels.num_frames, "frame index out of range");
    require(labels.width == intensity.width && labels.height == intensity.height,
            "intensity dimensions do not match label map");
    require(labels.width == boundary.width && labels.height == boundary.height,
            "boundary dimensions do not match label map");
    require(labels.width > 0 && labels.height > 0, "empty frame");

    const int w = labels.width, h = labels.height;
    const auto lab = labels.frame(frame);

    FrameGraph g;
    g.frame = frame;
    g.width = w;
    g.height = h;
    g.frame_area = static_cast<long long>(w) * h;

    // Node per distinct label, ordered by ascending label id.
    std::map<int32_t, int> order;
    for (int32_t v : lab) {
        require(v >= 0, "negative label id");
        order.emplace(v, 0);
    }
    int next = 0;
    for (auto& [label, idx] : order) idx = next++;
    g.nodes.resize(order.size());
    for (const auto& [label, idx] : order) {
        g.nodes[idx].id = idx;
        g.nodes[idx].frame = frame;
        g.nodes[idx].label = label;
        g.label_to_node.emplace(label, idx);
    }

    std::vector<double> sum_x(g.nodes.size(), 0.0), sum_y(g.nodes.size(), 0.0);
    std::vector<double> sum_i(g.nodes.size(), 0.0);
    std::map<std::pair<int, int>, std::pair<double, long long>> border;  // (a,b) -> (sum, pairs)

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const size_t p = static_cast<size_t>(y) * w + x;
            const int n0 = order[lab[p]];
            g.nodes[n0].area++;
            sum_x[n0] += x;
            sum_y[n0] += y;
            sum_i[n0] += intensity.values[p];
            // 4-connectivity: right and down neighbors cover every pair once
            if (x + 1 < w) {
                const size_t q = p + 1;
                const int n1 = order[lab[q]];
                if (n1 != n0) {
                    auto key = std::minmax(n0, n1);
                    auto& acc = border[{key.first, key.second}];
                    acc.first += (boundary.values[p] + boundary.values[q]) / 2.0;
                    acc.second++;
                }
            }
            if (y + 1 < h) {
                const size_t q = p + w;
                const int n1 = order[lab[q]];
                if (n1 != n0) {
                    auto key = std::minmax(n0, n1);
                    auto& acc = border[{key.first, key.second}];
                    acc.first += (boundary.values[p] + boundary.values[q]) / 2.0;
                    acc.second++;
                }
            }
        }
    }

    for (auto& node : g.nodes) {
        node.centroid_x = sum_x[node.id] / static_cast<double>(node.area);
        node.centroid_y = sum_y[node.id] / static_cast<double>(node.area);
        node.mean_intensity = sum_i[node.id] / static_cast<double>(node.area);
    }

    g.adjacency.resize(g.nodes.size());
    g.edges.reserve(border.size());
    for (const auto& [key, acc] : border) {
        const double weight = acc.first / static_cast<double>(acc.second);
        g.edges.push_back({key.first, key.second, weight});
        g.adjacency[key.first].emplace_back(key.second, weight);
        g.adjacency[key.second].emplace_back(key.first, weight);
    }
    return g;
}

Image combine_boundary_maps(const Image& spatial, const Image* motion,
                            BoundaryCombine mode) {
    if (mode == BoundaryCombine::SpatialOnly) return spatial;
    require(motion != nullptr, "motion map required for this combination mode");
    require(spatial.same_shape(*motion), "boundary map dimensions do not match");
    Image out(spatial.width, spatial.height);
    if (mode == BoundaryCombine::Average) {
        for (size_t i = 0; i < out.size(); ++i)
            out.values[i] = (spatial.values[i] + motion->values[i]) / 2.0;
    } else {
        for (size_t i = 0; i < out.size(); ++i)
            out.values[i] = std::max(spatial.values[i], motion->values[i]);
    }
    return out;
}

}  // namespace geohist
