#pragma once

#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "geohist/image.hpp"

namespace geohist {

// One node of a frame graph.
struct Superpixel {
    int id = 0;           // node index within the frame graph
    int frame = 0;
    int32_t label = 0;    // original label id in the map
    long long area = 0;   // pixel count |y|
    double centroid_x = 0.0;
    double centroid_y = 0.0;
    double mean_intensity = 0.0;
};

struct FrameGraphEdge {
    int a = 0;
    int b = 0;          // a < b
    double weight = 0;  // mean boundary strength across the shared border
};

// Undirected boundary-weighted adjacency over one frame's superpixels.
struct FrameGraph {
    int frame = 0;
    int width = 0;
    int height = 0;
    long long frame_area = 0;  // |f| = width*height
    std::vector<Superpixel> nodes;
    std::vector<FrameGraphEdge> edges;
    std::vector<std::vector<std::pair<int, double>>> adjacency;  // node -> (neighbor, weight)
    std::unordered_map<int32_t, int> label_to_node;

    int node_of_label(int32_t label) const {
        auto it = label_to_node.find(label);
        return it == label_to_node.end() ? -1 : it->second;
    }
};

// Builds the superpixel graph of one frame: one node per distinct label,
// an edge for every pair of labels adjacent under 4-connectivity, edge
// weight = mean over adjacent cross-label pixel pairs (p,q) of
// (boundary(p)+boundary(q))/2. Nodes are ordered by ascending label id.
FrameGraph build_frame_graph(const LabeledVolume& labels, int frame,
                             const Image& intensity, const Image& boundary);

enum class BoundaryCombine { SpatialOnly, Average, Max };

// Pixelwise combination of a spatial boundary map with an optional motion
// boundary map. motion may be null for SpatialOnly.
Image combine_boundary_maps(const Image& spatial, const Image* motion,
                            BoundaryCombine mode);

}  // namespace geohist
