// Pipeline CLI: synthetic scene generation, feature extraction, supervoxel
// segmentation, benchmark evaluation, and overlay rendering.
//
// Exit codes: 0 success, 2 validation failure, 3 I/O failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "geohist/pipeline.hpp"
#include "geohist/pnm_io.hpp"

using namespace geohist;
namespace fs = std::filesystem;

namespace {

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

BoundaryCombine parse_boundary_mode(const std::string& s) {
    if (s == "spatial-only") return BoundaryCombine::SpatialOnly;
    if (s == "average") return BoundaryCombine::Average;
    if (s == "max") return BoundaryCombine::Max;
    throw std::invalid_argument("unknown boundary mode: " + s);
}

Metric parse_metric(const std::string& s) {
    if (s == "chi2") return Metric::Chi2;
    if (s == "emd") return Metric::Emd;
    throw std::invalid_argument("unknown metric: " + s);
}

void parse_gamma(const std::string& s, PipelineOptions& o) {
    if (s == "median") {
        o.gamma_auto = true;
        return;
    }
    try {
        o.gamma_value = std::stod(s);
    } catch (const std::exception&) {
        throw std::invalid_argument("gamma must be \"median\" or a number");
    }
    o.gamma_auto = false;
}

void parse_range(const std::string& s, BinningConfig& b) {
    if (s == "per-frame-max") {
        b.range = {true, 0.0};
        return;
    }
    try {
        b.range = {false, std::stod(s)};
    } catch (const std::exception&) {
        throw std::invalid_argument("geodesic-range must be \"per-frame-max\" or a number");
    }
}

// Flags shared by the feature-consuming subcommands. Strings buffer the
// enum-like options so config-file values survive when a flag is absent.
struct OptionStrings {
    std::string boundary_mode, metric, gamma, range;
};

void add_feature_flags(CLI::App* cmd, PipelineConfig& cfg, OptionStrings& strs) {
    cmd->add_option("--intensity-bins", cfg.options.binning.intensity_bins,
                    "intensity bins (default 13)");
    cmd->add_option("--geodesic-bins", cfg.options.binning.geodesic_bins,
                    "geodesic bins (default 9)");
    cmd->add_option("--geodesic-range", strs.range,
                    "\"per-frame-max\" or a fixed upper bound");
    cmd->add_option("--mu", cfg.options.binning.mu,
                    "spatial decay of the voting weight (default 0.02)");
    cmd->add_flag("--include-self", cfg.options.binning.include_self,
                  "let a superpixel vote into its own histogram");
    cmd->add_option("--boundary-mode", strs.boundary_mode,
                    "spatial-only | average | max");
    cmd->add_option("--boundary-sigma", cfg.options.boundary_sigma,
                    "Gaussian smoothing of boundary maps (default 1.0)");
    cmd->add_option("--boundary-dir", cfg.boundary_dir,
                    "precomputed spatial boundary maps (16-bit PGM) instead of Sobel");
}

void add_cluster_flags(CLI::App* cmd, PipelineConfig& cfg, OptionStrings& strs) {
    cmd->add_option("--metric", strs.metric, "chi2 | emd (default chi2)");
    cmd->add_flag("--pyramid,!--no-pyramid", cfg.options.pyramid,
                  "compare spatial-pyramid features (default on)");
    cmd->add_option("--alpha", cfg.options.alpha,
                    "geodesic-feature share of the combined affinity [0,1]");
    cmd->add_option("--gamma", strs.gamma, "\"median\" or a fixed kernel scale");
    cmd->add_option("--clusters", cfg.options.clusters, "supervoxel count");
    cmd->add_option("--seed", cfg.options.seed, "clustering RNG seed");
    cmd->add_flag("--dump-features", cfg.dump_features, "write features.csv");
    cmd->add_flag("--dump-affinity", cfg.dump_affinity, "write affinity.mtx");
    cmd->add_flag("--dump-distances", cfg.dump_distances,
                  "write per-frame geodesic distance CSVs");
}

void finish_option_strings(const OptionStrings& strs, PipelineConfig& cfg) {
    if (!strs.boundary_mode.empty())
        cfg.options.boundary_mode = parse_boundary_mode(strs.boundary_mode);
    if (!strs.metric.empty()) cfg.options.metric = parse_metric(strs.metric);
    if (!strs.gamma.empty()) parse_gamma(strs.gamma, cfg.options);
    if (!strs.range.empty()) parse_range(strs.range, cfg.options.binning);
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir,
              int superpixel_cell, bool respect_gt) {
    const SceneSpec spec = scene_spec_from_json(read_text_file(spec_path));
    const Scene scene = generate_scene(spec);
    write_scene(out_dir, spec, scene);
    if (superpixel_cell > 0) {
        const LabeledVolume sp =
            grid_superpixels(scene.ground_truth, superpixel_cell, respect_gt);
        write_label_dir((fs::path(out_dir) / "superpixels").string(), sp, "sp_");
    }
    std::cout << "wrote scene (" << spec.num_frames << " frames, " << spec.width
              << "x" << spec.height << ") to " << out_dir << "\n";
    return 0;
}

int cmd_features(const PipelineConfig& cfg, const std::string& out_csv,
                 const std::string& distances_dir) {
    const std::vector<Image> frames = read_frame_dir(cfg.frames_dir);
    const LabeledVolume sp = read_label_dir(cfg.superpixels_dir);
    std::vector<Image> boundary_maps;
    if (!cfg.boundary_dir.empty())
        for (const auto& f : list_pgm_files(cfg.boundary_dir))
            boundary_maps.push_back(read_pgm16_unit(f));
    const VideoAnalysis va =
        analyze_video(frames, sp, cfg.options.boundary_mode,
                      cfg.options.boundary_sigma, cfg.options.binning,
                      boundary_maps.empty() ? nullptr : &boundary_maps);
    std::ofstream out(out_csv);
    if (!out) throw IoError("cannot write " + out_csv);
    write_features_csv_header(out);
    for (size_t t = 0; t < va.features.size(); ++t)
        write_features_csv(out, static_cast<int>(t), va.features[t]);
    if (!distances_dir.empty()) {
        std::error_code ec;
        fs::create_directories(distances_dir, ec);
        char name[64];
        for (size_t t = 0; t < va.geodesics.size(); ++t) {
            std::snprintf(name, sizeof(name), "distances_%04zu.csv", t);
            std::ofstream d(fs::path(distances_dir) / name);
            write_distance_csv(d, va.geodesics[t]);
        }
    }
    std::cout << "wrote features for " << frames.size() << " frames to " << out_csv
              << "\n";
    return 0;
}

int cmd_run(const PipelineConfig& cfg) {
    const PipelineResult res = run_pipeline(cfg);
    if (res.has_metrics) std::cout << metrics_to_json(res.metrics) << "\n";
    else
        std::cout << "wrote " << res.supervoxels.num_frames
                  << " supervoxel label maps to " << cfg.output_dir << "\n";
    return 0;
}

int cmd_eval(const std::string& seg_dir, const std::string& gt_dir, int tol,
             const std::string& out_path) {
    const LabeledVolume seg = read_label_dir(seg_dir);
    const LabeledVolume gt = read_label_dir(gt_dir);
    const MetricsReport r = evaluate_supervoxels(seg, gt, tol);
    std::cout << metrics_to_json(r) << "\n";
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw IoError("cannot write " + out_path);
        out << metrics_to_json(r) << '\n';
    }
    return 0;
}

int cmd_render(const std::string& labels_dir, const std::string& frames_dir,
               const std::string& out_dir) {
    const LabeledVolume labels = read_label_dir(labels_dir);
    const std::vector<Image> frames = read_frame_dir(frames_dir);
    render_overlays(labels, frames, out_dir);
    std::cout << "wrote " << labels.num_frames << " overlays to " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"geodesic distance histogram features for video segmentation"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "render a synthetic scene from a JSON spec");
    std::string spec_path, synth_out;
    int sp_cell = 0;
    bool respect_gt = false;
    synth->add_option("--spec", spec_path, "scene spec JSON")->required();
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--superpixel-cell", sp_cell,
                      "also write grid superpixels with this cell size");
    synth->add_flag("--respect-gt", respect_gt,
                    "split grid cells along ground-truth boundaries");

    PipelineConfig cfg;
    OptionStrings strs;
    std::string config_path;

    // features
    auto* features = app.add_subcommand("features", "extract histogram features to CSV");
    std::string features_out, distances_dir;
    features->add_option("--frames", cfg.frames_dir, "frame directory (8-bit PGM)")
        ->required();
    features->add_option("--superpixels", cfg.superpixels_dir,
                         "superpixel label maps (16-bit PGM)")
        ->required();
    features->add_option("--out", features_out, "output CSV path")->required();
    features->add_option("--distances-dir", distances_dir,
                         "also dump per-frame geodesic distance matrices");
    add_feature_flags(features, cfg, strs);

    // segment
    auto* segment = app.add_subcommand("segment", "cluster superpixels into supervoxels");
    segment->add_option("--frames", cfg.frames_dir, "frame directory")->required();
    segment->add_option("--superpixels", cfg.superpixels_dir, "superpixel label maps")
        ->required();
    segment->add_option("--out", cfg.output_dir, "output directory")->required();
    add_feature_flags(segment, cfg, strs);
    add_cluster_flags(segment, cfg, strs);

    // eval
    auto* eval = app.add_subcommand("eval", "3D supervoxel benchmark metrics");
    std::string seg_dir, gt_dir, eval_out;
    int tol = 2;
    eval->add_option("--seg", seg_dir, "segmentation label maps")->required();
    eval->add_option("--gt", gt_dir, "ground-truth label maps")->required();
    eval->add_option("--tol", tol, "boundary matching tolerance in pixels (default 2)");
    eval->add_option("--out", eval_out, "also write metrics JSON here");

    // pipeline
    auto* pipeline =
        app.add_subcommand("pipeline", "features + segmentation + evaluation");
    pipeline->add_option("--config", config_path, "JSON config (flags override it)");
    pipeline->add_option("--frames", cfg.frames_dir, "frame directory");
    pipeline->add_option("--superpixels", cfg.superpixels_dir, "superpixel label maps");
    pipeline->add_option("--gt", cfg.gt_dir, "ground-truth label maps (enables metrics)");
    pipeline->add_option("--out", cfg.output_dir, "output directory");
    pipeline->add_option("--eval-tolerance", cfg.options.eval_tolerance,
                         "boundary matching tolerance (default 2)");
    add_feature_flags(pipeline, cfg, strs);
    add_cluster_flags(pipeline, cfg, strs);

    // render
    auto* render = app.add_subcommand("render", "blend label maps over frames as PPM");
    std::string render_labels, render_frames, render_out;
    render->add_option("--labels", render_labels, "label map directory")->required();
    render->add_option("--frames", render_frames, "frame directory")->required();
    render->add_option("--out", render_out, "output directory")->required();

    // config file applies first so explicit flags override it
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
    try {
        if (!config_path.empty()) apply_config_json(read_text_file(config_path), cfg);
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        finish_option_strings(strs, cfg);
        if (synth->parsed()) return cmd_synth(spec_path, synth_out, sp_cell, respect_gt);
        if (features->parsed()) return cmd_features(cfg, features_out, distances_dir);
        if (segment->parsed()) return cmd_run(cfg);
        if (eval->parsed()) return cmd_eval(seg_dir, gt_dir, tol, eval_out);
        if (pipeline->parsed()) {
            if (cfg.frames_dir.empty() || cfg.superpixels_dir.empty())
                throw std::invalid_argument(
                    "frames and superpixels directories are required (flag or config)");
            return cmd_run(cfg);
        }
        if (render->parsed()) return cmd_render(render_labels, render_frames, render_out);
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
