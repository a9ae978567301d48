#pragma once

#include <optional>
#include <string>
#include <vector>

#include "geohist/histdist.hpp"
#include "geohist/histfeat.hpp"
#include "geohist/stcluster.hpp"
#include "geohist/supereval.hpp"
#include "geohist/synth.hpp"

namespace geohist {

// Everything but paths; defaults mirror the CLI flags.
struct PipelineOptions {
    BinningConfig binning;
    BoundaryCombine boundary_mode = BoundaryCombine::SpatialOnly;
    double boundary_sigma = 1.0;
    Metric metric = Metric::Chi2;
    bool pyramid = true;
    PyramidWeights weights;
    double alpha = 0.5;
    bool gamma_auto = true;    // gamma = 1/median(positive distances) per video
    double gamma_value = 1.0;  // used when gamma_auto is false
    int clusters = 2;
    uint64_t seed = 0;
    int eval_tolerance = 2;
};

struct PipelineData {
    std::vector<Image> frames;
    LabeledVolume superpixels;
    std::optional<LabeledVolume> ground_truth;
    std::optional<std::vector<Image>> spatial_boundaries;  // replaces Sobel maps
};

// Per-frame intermediate products of the feature stage.
struct VideoAnalysis {
    std::vector<Image> boundaries;
    std::vector<FrameGraph> graphs;
    std::vector<AllSourceGeodesics> geodesics;
    std::vector<FrameFeatures> features;
};

// Boundary maps, frame graphs, all-source geodesics, and pyramid features
// for every frame; frames are processed in parallel. spatial_maps, when
// given, replaces the built-in Sobel estimator (one map per frame).
VideoAnalysis analyze_video(const std::vector<Image>& frames,
                            const LabeledVolume& superpixels,
                            BoundaryCombine boundary_mode, double boundary_sigma,
                            const BinningConfig& binning,
                            const std::vector<Image>* spatial_maps = nullptr);

struct PipelineResult {
    LabeledVolume supervoxels;
    MetricsReport metrics;   // valid iff has_metrics
    bool has_metrics = false;
    double gamma_feature = 0.0;
    double gamma_baseline = 0.0;
};

// In-memory end-to-end run: features -> spatio-temporal graph -> affinity ->
// spectral clustering -> (optional) evaluation. Deterministic for a fixed
// seed.
PipelineResult run_pipeline(const PipelineData& data, const PipelineOptions& opt);

// File-level configuration; all dimension checks happen before any compute.
struct PipelineConfig {
    PipelineOptions options;
    std::string frames_dir;
    std::string superpixels_dir;
    std::string gt_dir;        // empty = no evaluation
    std::string boundary_dir;  // 16-bit PGM spatial boundary maps; empty = Sobel
    std::string output_dir;    // empty = do not write outputs
    bool dump_features = false;
    bool dump_affinity = false;
    bool dump_distances = false;
};

// Loads inputs, runs the pipeline, writes per-frame supervoxel label maps,
// metrics.json (when ground truth is given), and a run manifest capturing
// every resolved parameter.
PipelineResult run_pipeline(const PipelineConfig& cfg);

// Per-frame PPM overlays: deterministic per-label color (hash of label id)
// blended 50/50 with the intensity frame.
void render_overlays(const LabeledVolume& volume, const std::vector<Image>& frames,
                     const std::string& out_dir);

// 24-bit color for a label id (splitmix64 hash).
void label_color(int32_t label, uint8_t& r, uint8_t& g, uint8_t& b);

// Parses a JSON config (kebab-case keys, see README); missing keys keep the
// passed-in defaults.
void apply_config_json(const std::string& text, PipelineConfig& cfg);

std::string pipeline_manifest_json(const PipelineConfig& cfg, const PipelineResult& res,
                                   const PipelineData& data);

}  // namespace geohist
