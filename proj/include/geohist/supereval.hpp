#pragma once

#include <string>

#include "geohist/image.hpp"

namespace geohist {

struct MetricsReport {
    double ac3d = 0.0;
    double ue3d = 0.0;
    double br3d = 0.0;
    double bp3d = 0.0;
    double mean_temporal_length = 0.0;
    long long num_supervoxels = 0;
};

// 3D segmentation accuracy: per ground-truth segment g, the fraction of |g|
// covered by supervoxels whose overlap with g strictly exceeds half their
// own volume; averaged over ground-truth segments.
double accuracy_3d(const LabeledVolume& seg, const LabeledVolume& gt);

// Per g: (sum of |s| over supervoxels touching g, minus |g|) / |g|; averaged.
double undersegmentation_error_3d(const LabeledVolume& seg, const LabeledVolume& gt);

// Boundary voxels are voxels with a differing 6-neighbor inside the (x,y,t)
// volume; volume borders are not boundaries. Recall is the fraction of gt
// boundary voxels with a seg boundary voxel within Chebyshev distance tol in
// the same frame's plane; precision swaps the roles. An empty query boundary
// set scores 1.0.
double boundary_recall_3d(const LabeledVolume& seg, const LabeledVolume& gt, int tol = 2);
double boundary_precision_3d(const LabeledVolume& seg, const LabeledVolume& gt, int tol = 2);

// Mean over supervoxels of the number of distinct frames each one touches.
double mean_temporal_length(const LabeledVolume& seg);

long long count_labels(const LabeledVolume& vol);

MetricsReport evaluate_supervoxels(const LabeledVolume& seg, const LabeledVolume& gt,
                                   int tol = 2);

// Fixed key order, scores at 6 decimal places; no trailing newline.
std::string metrics_to_json(const MetricsReport& r);

}  // namespace geohist
