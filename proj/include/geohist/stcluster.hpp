#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "geohist/histdist.hpp"
#include "geohist/spgraph.hpp"

namespace geohist {

enum class StEdgeKind { Spatial, Temporal };

struct StEdge {
    int a = 0;
    int b = 0;  // global node indices, a < b
    StEdgeKind kind = StEdgeKind::Spatial;
    double feature_distance = 0.0;
    double baseline_distance = 0.0;
};

// All superpixels across frames under a single global index. Spatial edges
// come from the per-frame graphs; temporal edges link superpixels of
// consecutive frames that overlap in at least one pixel position.
struct SpatioTemporalGraph {
    int num_nodes = 0;
    std::vector<int> frame_offset;  // size num_frames+1; last entry == num_nodes
    std::vector<StEdge> edges;

    int global_index(int frame, int local) const { return frame_offset[frame] + local; }
    int num_frames() const { return static_cast<int>(frame_offset.size()) - 1; }
};

SpatioTemporalGraph build_st_graph(const std::vector<FrameGraph>& graphs,
                                   const LabeledVolume& superpixels);

// Fills per-edge feature and baseline distances. Feature distance compares
// the endpoints' pyramid features (level0 only when pyramid is off);
// baseline distance is |mean intensity difference|. Edges are independent;
// the loop runs across OpenMP threads.
void assign_edge_distances(SpatioTemporalGraph& st,
                           const std::vector<FrameGraph>& graphs,
                           const std::vector<FrameFeatures>& features,
                           Metric metric, bool pyramid, const PyramidWeights& w);
// Serial reference kept for tests and the benchmark.
void assign_edge_distances_serial(SpatioTemporalGraph& st,
                                  const std::vector<FrameGraph>& graphs,
                                  const std::vector<FrameFeatures>& features,
                                  Metric metric, bool pyramid,
                                  const PyramidWeights& w);

// exp(-gamma*d), in (0,1].
double feature_affinity(double distance, double gamma);

// Weighted geometric mean base^(1-alpha) * geo^alpha.
double combine_affinities(double base, double geo, double alpha);

// Median of the strictly positive entries; 0 when there are none. Used for
// the self-tuning kernel scale gamma = 1/median.
double median_positive(std::vector<double> values);

struct AffinityEntry {
    int i = 0;
    int j = 0;  // i < j; symmetric counterpart implied
    double value = 0.0;
};

// Sparse symmetric non-negative affinity matrix with zero diagonal.
struct AffinityMatrix {
    int n = 0;
    std::vector<AffinityEntry> entries;
};

AffinityMatrix build_affinity_matrix(const SpatioTemporalGraph& st,
                                     double gamma_feature, double gamma_baseline,
                                     double alpha);

// Matrix Market coordinate format, symmetric, 1-based lower triangle.
void write_matrix_market(std::ostream& out, const AffinityMatrix& A);

// Normalized-cut spectral clustering: L = I - D^{-1/2} A D^{-1/2} (isolated
// nodes get degree 1), k eigenvectors of smallest eigenvalues, rows scaled
// to unit length (zero rows stay zero), then seeded k-means++ / Lloyd with
// at most 300 iterations. Deterministic for a fixed seed.
std::vector<int> spectral_cluster(const AffinityMatrix& A, int k, uint64_t seed);

// Paints every pixel with its superpixel's cluster id.
LabeledVolume labels_to_volume(const std::vector<int>& node_clusters,
                               const std::vector<FrameGraph>& graphs,
                               const LabeledVolume& superpixels);

}  // namespace geohist
