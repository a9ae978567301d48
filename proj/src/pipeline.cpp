#include "geohist/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "geohist/pnm_io.hpp"

namespace geohist {

namespace fs = std::filesystem;

VideoAnalysis analyze_video(const std::vector<Image>& frames,
                            const LabeledVolume& superpixels,
                            BoundaryCombine boundary_mode, double boundary_sigma,
                            const BinningConfig& binning,
                            const std::vector<Image>* spatial_maps) {
    const int T = static_cast<int>(frames.size());
    require(T > 0, "no frames");
    require(superpixels.num_frames == T, "superpixel volume frame count differs");
    for (int t = 0; t < T; ++t)
        require(frames[t].width == superpixels.width &&
                    frames[t].height == superpixels.height,
                "frame dimensions differ from superpixel maps");
    if (spatial_maps) {
        require(static_cast<int>(spatial_maps->size()) == T,
                "boundary map count differs from frame count");
        for (const Image& b : *spatial_maps)
            require(b.width == superpixels.width && b.height == superpixels.height,
                    "boundary map dimensions differ from frames");
    }

    VideoAnalysis va;
    va.boundaries.resize(T);
    va.graphs.resize(T);
    va.geodesics.resize(T);
    va.features.resize(T);

#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < T; ++t) {
        Image spatial = spatial_maps
                            ? (*spatial_maps)[t]
                            : sobel_boundary_map_serial(frames[t], boundary_sigma);
        if (boundary_mode == BoundaryCombine::SpatialOnly) {
            va.boundaries[t] = std::move(spatial);
        } else {
            // last frame reuses the previous pair; single-frame videos get
            // a zero motion map
            Image motion(frames[t].width, frames[t].height, 0.0);
            if (T > 1) {
                const int a = t + 1 < T ? t : t - 1;
                motion = motion_boundary_map(frames[a], frames[a + 1], boundary_sigma);
            }
            va.boundaries[t] = combine_boundary_maps(spatial, &motion, boundary_mode);
        }
        va.graphs[t] = build_frame_graph(superpixels, t, frames[t], va.boundaries[t]);
        va.geodesics[t] = all_source_geodesics_serial(va.graphs[t]);
        va.features[t] = compute_frame_features_serial(va.graphs[t], va.geodesics[t], binning);
    }
    return va;
}

PipelineResult run_pipeline(const PipelineData& data, const PipelineOptions& opt) {
    require(opt.clusters >= 1, "cluster count must be >= 1");
    if (data.ground_truth)
        require(data.ground_truth->same_shape(data.superpixels),
                "ground truth dimensions differ from superpixel maps");

    VideoAnalysis va = analyze_video(
        data.frames, data.superpixels, opt.boundary_mode, opt.boundary_sigma,
        opt.binning, data.spatial_boundaries ? &*data.spatial_boundaries : nullptr);

    SpatioTemporalGraph st = build_st_graph(va.graphs, data.superpixels);
    assign_edge_distances(st, va.graphs, va.features, opt.metric, opt.pyramid,
                          opt.weights);

    PipelineResult res;
    if (opt.gamma_auto) {
        std::vector<double> feat, base;
        feat.reserve(st.edges.size());
        base.reserve(st.edges.size());
        for (const auto& e : st.edges) {
            feat.push_back(e.feature_distance);
            base.push_back(e.baseline_distance);
        }
        const double mf = median_positive(feat);
        const double mb = median_positive(base);
        res.gamma_feature = mf > 0.0 ? 1.0 / mf : 1.0;
        res.gamma_baseline = mb > 0.0 ? 1.0 / mb : 1.0;
    } else {
        require(opt.gamma_value > 0.0, "gamma must be > 0");
        res.gamma_feature = res.gamma_baseline = opt.gamma_value;
    }

    AffinityMatrix A = build_affinity_matrix(st, res.gamma_feature, res.gamma_baseline,
                                             opt.alpha);
    std::vector<int> clusters = spectral_cluster(A, opt.clusters, opt.seed);
    res.supervoxels = labels_to_volume(clusters, va.graphs, data.superpixels);

    if (data.ground_truth) {
        res.metrics = evaluate_supervoxels(res.supervoxels, *data.ground_truth,
                                           opt.eval_tolerance);
        res.has_metrics = true;
    }
    return res;
}

namespace {

const char* boundary_mode_name(BoundaryCombine m) {
    switch (m) {
        case BoundaryCombine::SpatialOnly: return "spatial-only";
        case BoundaryCombine::Average: return "average";
        default: return "max";
    }
}

}  // namespace

std::string pipeline_manifest_json(const PipelineConfig& cfg, const PipelineResult& res,
                                   const PipelineData& data) {
    nlohmann::ordered_json j;
    j["format_version"] = 1;
    j["tool"] = "geohist";
    j["frames_dir"] = cfg.frames_dir;
    j["superpixels_dir"] = cfg.superpixels_dir;
    j["gt_dir"] = cfg.gt_dir;
    j["boundary_dir"] = cfg.boundary_dir;
    j["output_dir"] = cfg.output_dir;
    const PipelineOptions& o = cfg.options;
    j["intensity_bins"] = o.binning.intensity_bins;
    j["geodesic_bins"] = o.binning.geodesic_bins;
    if (o.binning.range.per_frame_max)
        j["geodesic_range"] = "per-frame-max";
    else
        j["geodesic_range"] = o.binning.range.fixed_upper;
    j["mu"] = o.binning.mu;
    j["include_self"] = o.binning.include_self;
    j["boundary_mode"] = boundary_mode_name(o.boundary_mode);
    j["boundary_sigma"] = o.boundary_sigma;
    j["metric"] = o.metric == Metric::Chi2 ? "chi2" : "emd";
    j["pyramid"] = o.pyramid;
    j["pyramid_weight_level0"] = o.weights.level0;
    j["pyramid_weight_level1"] = o.weights.level1;
    j["alpha"] = o.alpha;
    j["gamma_mode"] = o.gamma_auto ? "median" : "fixed";
    if (!o.gamma_auto) j["gamma_value"] = o.gamma_value;
    j["resolved_gamma_feature"] = res.gamma_feature;
    j["resolved_gamma_baseline"] = res.gamma_baseline;
    j["clusters"] = o.clusters;
    j["seed"] = o.seed;
    j["eval_tolerance"] = o.eval_tolerance;
    j["num_frames"] = static_cast<int>(data.frames.size());
    j["width"] = data.superpixels.width;
    j["height"] = data.superpixels.height;
    return j.dump(2);
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
    PipelineData data;
    data.frames = read_frame_dir(cfg.frames_dir);
    data.superpixels = read_label_dir(cfg.superpixels_dir);
    if (!cfg.gt_dir.empty()) data.ground_truth = read_label_dir(cfg.gt_dir);
    if (!cfg.boundary_dir.empty()) {
        std::vector<Image> maps;
        for (const auto& f : list_pgm_files(cfg.boundary_dir))
            maps.push_back(read_pgm16_unit(f));
        if (maps.empty()) throw IoError("no .pgm boundary maps in " + cfg.boundary_dir);
        data.spatial_boundaries = std::move(maps);
    }

    PipelineResult res = run_pipeline(data, cfg.options);

    if (!cfg.output_dir.empty()) {
        std::error_code ec;
        fs::create_directories(cfg.output_dir, ec);
        write_label_dir((fs::path(cfg.output_dir) / "supervoxels").string(),
                        res.supervoxels, "sv_");
        if (res.has_metrics) {
            std::ofstream mout(fs::path(cfg.output_dir) / "metrics.json");
            if (!mout) throw IoError("cannot write metrics.json");
            mout << metrics_to_json(res.metrics) << '\n';
        }
        std::ofstream man(fs::path(cfg.output_dir) / "manifest.json");
        if (!man) throw IoError("cannot write manifest.json");
        man << pipeline_manifest_json(cfg, res, data) << '\n';

        if (cfg.dump_features || cfg.dump_affinity || cfg.dump_distances) {
            VideoAnalysis va = analyze_video(
                data.frames, data.superpixels, cfg.options.boundary_mode,
                cfg.options.boundary_sigma, cfg.options.binning,
                data.spatial_boundaries ? &*data.spatial_boundaries : nullptr);
            if (cfg.dump_features) {
                std::ofstream f(fs::path(cfg.output_dir) / "features.csv");
                write_features_csv_header(f);
                for (size_t t = 0; t < va.features.size(); ++t)
                    write_features_csv(f, static_cast<int>(t), va.features[t]);
            }
            if (cfg.dump_distances) {
                char name[64];
                for (size_t t = 0; t < va.geodesics.size(); ++t) {
                    std::snprintf(name, sizeof(name), "distances_%04zu.csv", t);
                    std::ofstream f(fs::path(cfg.output_dir) / name);
                    write_distance_csv(f, va.geodesics[t]);
                }
            }
            if (cfg.dump_affinity) {
                SpatioTemporalGraph st = build_st_graph(va.graphs, data.superpixels);
                assign_edge_distances(st, va.graphs, va.features, cfg.options.metric,
                                      cfg.options.pyramid, cfg.options.weights);
                AffinityMatrix A = build_affinity_matrix(st, res.gamma_feature,
                                                         res.gamma_baseline,
                                                         cfg.options.alpha);
                std::ofstream f(fs::path(cfg.output_dir) / "affinity.mtx");
                write_matrix_market(f, A);
            }
        }
    }
    return res;
}

void label_color(int32_t label, uint8_t& r, uint8_t& g, uint8_t& b) {
    uint64_t x = static_cast<uint64_t>(label) + 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    x = x ^ (x >> 31);
    r = static_cast<uint8_t>(x & 0xff);
    g = static_cast<uint8_t>((x >> 8) & 0xff);
    b = static_cast<uint8_t>((x >> 16) & 0xff);
}

void render_overlays(const LabeledVolume& volume, const std::vector<Image>& frames,
                     const std::string& out_dir) {
    require(static_cast<int>(frames.size()) == volume.num_frames,
            "frame count differs from label volume");
    for (const auto& f : frames)
        require(f.width == volume.width && f.height == volume.height,
                "frame dimensions differ from label volume");
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    char name[64];
    for (int t = 0; t < volume.num_frames; ++t) {
        std::vector<uint8_t> rgb(static_cast<size_t>(volume.width) * volume.height * 3);
        const auto lab = volume.frame(t);
        for (size_t i = 0; i < lab.size(); ++i) {
            uint8_t r, g, b;
            label_color(lab[i], r, g, b);
            const double gray = frames[t].values[i] * 255.0;
            rgb[3 * i + 0] = static_cast<uint8_t>(std::lround(0.5 * gray + 0.5 * r));
            rgb[3 * i + 1] = static_cast<uint8_t>(std::lround(0.5 * gray + 0.5 * g));
            rgb[3 * i + 2] = static_cast<uint8_t>(std::lround(0.5 * gray + 0.5 * b));
        }
        std::snprintf(name, sizeof(name), "overlay_%04d.ppm", t);
        write_ppm((fs::path(out_dir) / name).string(), volume.width, volume.height, rgb);
    }
}

void apply_config_json(const std::string& text, PipelineConfig& cfg) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad config JSON: ") + e.what());
    }
    try {
        cfg.frames_dir = j.value("frames-dir", cfg.frames_dir);
        cfg.superpixels_dir = j.value("superpixels-dir", cfg.superpixels_dir);
        cfg.gt_dir = j.value("gt-dir", cfg.gt_dir);
        cfg.boundary_dir = j.value("boundary-dir", cfg.boundary_dir);
        cfg.output_dir = j.value("out-dir", cfg.output_dir);
        PipelineOptions& o = cfg.options;
        o.binning.intensity_bins = j.value("intensity-bins", o.binning.intensity_bins);
        o.binning.geodesic_bins = j.value("geodesic-bins", o.binning.geodesic_bins);
        if (j.contains("geodesic-range")) {
            const auto& r = j["geodesic-range"];
            if (r.is_string()) {
                if (r.get<std::string>() != "per-frame-max")
                    throw std::invalid_argument("geodesic-range must be "
                                                "\"per-frame-max\" or a number");
                o.binning.range = {true, 0.0};
            } else {
                o.binning.range = {false, r.get<double>()};
            }
        }
        o.binning.mu = j.value("mu", o.binning.mu);
        o.binning.include_self = j.value("include-self", o.binning.include_self);
        if (j.contains("boundary-mode")) {
            const std::string m = j["boundary-mode"].get<std::string>();
            if (m == "spatial-only") o.boundary_mode = BoundaryCombine::SpatialOnly;
            else if (m == "average") o.boundary_mode = BoundaryCombine::Average;
            else if (m == "max") o.boundary_mode = BoundaryCombine::Max;
            else throw std::invalid_argument("unknown boundary-mode: " + m);
        }
        o.boundary_sigma = j.value("boundary-sigma", o.boundary_sigma);
        if (j.contains("metric")) {
            const std::string m = j["metric"].get<std::string>();
            if (m == "chi2") o.metric = Metric::Chi2;
            else if (m == "emd") o.metric = Metric::Emd;
            else throw std::invalid_argument("unknown metric: " + m);
        }
        o.pyramid = j.value("pyramid", o.pyramid);
        o.alpha = j.value("alpha", o.alpha);
        if (j.contains("gamma")) {
            const auto& g = j["gamma"];
            if (g.is_string()) {
                if (g.get<std::string>() != "median")
                    throw std::invalid_argument("gamma must be \"median\" or a number");
                o.gamma_auto = true;
            } else {
                o.gamma_auto = false;
                o.gamma_value = g.get<double>();
            }
        }
        o.clusters = j.value("clusters", o.clusters);
        o.seed = j.value("seed", o.seed);
        o.eval_tolerance = j.value("eval-tolerance", o.eval_tolerance);
        cfg.dump_features = j.value("dump-features", cfg.dump_features);
        cfg.dump_affinity = j.value("dump-affinity", cfg.dump_affinity);
        cfg.dump_distances = j.value("dump-distances", cfg.dump_distances);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad config JSON: ") + e.what());
    }
}

}  // namespace geohist
