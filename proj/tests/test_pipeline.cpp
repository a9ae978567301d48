#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "geohist/pipeline.hpp"
#include "geohist/pnm_io.hpp"

using namespace geohist;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

SceneSpec static_scene() {
    SceneSpec s;
    s.width = 32;
    s.height = 32;
    s.num_frames = 4;
    s.background_intensity = 0.4;
    ObjectSpec o;
    o.size_x = 12;
    o.size_y = 12;
    o.intensity = 0.9;
    o.start_x = 16.0;
    o.start_y = 16.0;
    s.objects.push_back(o);
    return s;
}

PipelineData make_data(const SceneSpec& spec, int cell, bool respect_gt) {
    const Scene scene = generate_scene(spec);
    PipelineData data;
    data.frames = scene.frames;
    data.superpixels = grid_superpixels(scene.ground_truth, cell, respect_gt);
    data.ground_truth = scene.ground_truth;
    return data;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("static scene with gt-respecting superpixels segments exactly") {
    const PipelineData data = make_data(static_scene(), 8, true);
    PipelineOptions opt;
    opt.clusters = 2;  // background + object
    opt.seed = 1;
    const PipelineResult res = run_pipeline(data, opt);
    REQUIRE(res.has_metrics);
    CHECK(res.metrics.ac3d == doctest::Approx(1.0));
    CHECK(res.metrics.ue3d == doctest::Approx(0.0));
    CHECK(res.metrics.br3d == doctest::Approx(1.0));
    CHECK(res.metrics.bp3d == doctest::Approx(1.0));
    CHECK(res.metrics.num_supervoxels == 2);
    CHECK(res.gamma_feature > 0.0);
}

TEST_CASE("k=1 merges everything into one supervoxel") {
    const PipelineData data = make_data(static_scene(), 8, true);
    PipelineOptions opt;
    opt.clusters = 1;
    const PipelineResult res = run_pipeline(data, opt);
    CHECK(res.metrics.num_supervoxels == 1);
    CHECK(res.metrics.mean_temporal_length == doctest::Approx(4.0));
}

TEST_CASE("identical seeds give byte-identical metrics json") {
    const PipelineData data = make_data(static_scene(), 8, true);
    PipelineOptions opt;
    opt.clusters = 2;
    opt.seed = 99;
    const PipelineResult a = run_pipeline(data, opt);
    const PipelineResult b = run_pipeline(data, opt);
    CHECK(metrics_to_json(a.metrics) == metrics_to_json(b.metrics));
    CHECK(a.supervoxels.labels == b.supervoxels.labels);
}

TEST_CASE("cluster count exceeding superpixels is a validation error") {
    const PipelineData data = make_data(static_scene(), 16, false);  // 4 tiles/frame
    PipelineOptions opt;
    opt.clusters = 1000;
    CHECK_THROWS_AS(run_pipeline(data, opt), std::invalid_argument);
}

TEST_CASE("file pipeline writes supervoxels, metrics, and manifest") {
    const fs::path dir = fs::temp_directory_path() / "geohist_pipe_test";
    fs::remove_all(dir);
    const SceneSpec spec = static_scene();
    const Scene scene = generate_scene(spec);
    write_scene((dir / "scene").string(), spec, scene);
    write_label_dir((dir / "scene" / "superpixels").string(),
                    grid_superpixels(scene.ground_truth, 8, true), "sp_");

    PipelineConfig cfg;
    cfg.frames_dir = (dir / "scene" / "frames").string();
    cfg.superpixels_dir = (dir / "scene" / "superpixels").string();
    cfg.gt_dir = (dir / "scene" / "gt").string();
    cfg.output_dir = (dir / "out").string();
    cfg.options.clusters = 2;
    cfg.options.seed = 7;
    cfg.dump_features = true;
    cfg.dump_affinity = true;
    cfg.dump_distances = true;

    const PipelineResult res = run_pipeline(cfg);
    CHECK(res.metrics.ac3d == doctest::Approx(1.0));
    CHECK(fs::exists(dir / "out" / "supervoxels" / "sv_0000.pgm"));
    CHECK(fs::exists(dir / "out" / "metrics.json"));
    CHECK(fs::exists(dir / "out" / "manifest.json"));
    CHECK(fs::exists(dir / "out" / "features.csv"));
    CHECK(fs::exists(dir / "out" / "affinity.mtx"));
    CHECK(fs::exists(dir / "out" / "distances_0000.csv"));

    const std::string manifest = slurp(dir / "out" / "manifest.json");
    // every default that influenced the run shows up
    for (const char* key :
         {"\"intensity_bins\": 13", "\"geodesic_bins\": 9", "\"mu\": 0.02",
          "\"geodesic_range\": \"per-frame-max\"", "\"metric\": \"chi2\"",
          "\"pyramid\": true", "\"alpha\": 0.5", "\"gamma_mode\": \"median\"",
          "\"clusters\": 2", "\"seed\": 7", "\"eval_tolerance\": 2",
          "\"boundary_mode\": \"spatial-only\"", "\"boundary_sigma\": 1.0",
          "\"resolved_gamma_feature\":", "\"include_self\": false"})
        CHECK(manifest.find(key) != std::string::npos);

    SUBCASE("rerunning over existing outputs yields identical artifacts") {
        const std::string metrics1 = slurp(dir / "out" / "metrics.json");
        const std::string sv1 = slurp(dir / "out" / "supervoxels" / "sv_0000.pgm");
        run_pipeline(cfg);
        CHECK(slurp(dir / "out" / "metrics.json") == metrics1);
        CHECK(slurp(dir / "out" / "manifest.json") == manifest);
        CHECK(slurp(dir / "out" / "supervoxels" / "sv_0000.pgm") == sv1);
    }
}

TEST_CASE("missing inputs raise io errors, bad dimensions validation errors") {
    PipelineConfig cfg;
    cfg.frames_dir = "/nonexistent/frames";
    cfg.superpixels_dir = "/nonexistent/sp";
    CHECK_THROWS_AS(run_pipeline(cfg), IoError);

    // dimension inconsistency aborts before compute
    PipelineData data = make_data(static_scene(), 8, true);
    data.superpixels = LabeledVolume(16, 16, 4, 0);
    PipelineOptions opt;
    CHECK_THROWS_AS(run_pipeline(data, opt), std::invalid_argument);

    PipelineData data2 = make_data(static_scene(), 8, true);
    data2.ground_truth = LabeledVolume(32, 32, 3, 0);  // frame count off
    CHECK_THROWS_AS(run_pipeline(data2, opt), std::invalid_argument);
}

TEST_CASE("precomputed boundary maps replace the sobel estimator") {
    PipelineData data = make_data(static_scene(), 8, true);
    PipelineOptions opt;
    opt.clusters = 2;

    // maps identical to the built-in estimator must reproduce the run
    std::vector<Image> sobel;
    for (const auto& f : data.frames)
        sobel.push_back(sobel_boundary_map(f, opt.boundary_sigma));
    const PipelineResult plain = run_pipeline(data, opt);
    data.spatial_boundaries = sobel;
    const PipelineResult fed = run_pipeline(data, opt);
    CHECK(plain.supervoxels.labels == fed.supervoxels.labels);
    CHECK(plain.gamma_feature == fed.gamma_feature);

    SUBCASE("count and dimension mismatches are rejected") {
        data.spatial_boundaries->pop_back();
        CHECK_THROWS_AS(run_pipeline(data, opt), std::invalid_argument);
        data.spatial_boundaries = std::vector<Image>(4, Image(16, 16, 0.0));
        CHECK_THROWS_AS(run_pipeline(data, opt), std::invalid_argument);
    }
    SUBCASE("file-level loading goes through the 16-bit PGM format") {
        const fs::path dir = fs::temp_directory_path() / "geohist_bmap_test";
        fs::remove_all(dir);
        const SceneSpec spec = static_scene();
        const Scene scene = generate_scene(spec);
        write_scene((dir / "scene").string(), spec, scene);
        write_label_dir((dir / "scene" / "superpixels").string(),
                        grid_superpixels(scene.ground_truth, 8, true), "sp_");
        fs::create_directories(dir / "bmaps");
        for (size_t t = 0; t < sobel.size(); ++t) {
            char name[32];
            std::snprintf(name, sizeof(name), "b_%04zu.pgm", t);
            write_pgm16_unit((dir / "bmaps" / name).string(), sobel[t]);
        }
        PipelineConfig cfg;
        cfg.frames_dir = (dir / "scene" / "frames").string();
        cfg.superpixels_dir = (dir / "scene" / "superpixels").string();
        cfg.gt_dir = (dir / "scene" / "gt").string();
        cfg.boundary_dir = (dir / "bmaps").string();
        cfg.options.clusters = 2;
        const PipelineResult res = run_pipeline(cfg);
        CHECK(res.metrics.ac3d == doctest::Approx(1.0));
    }
}

TEST_CASE("config json overrides defaults and rejects junk") {
    PipelineConfig cfg;
    apply_config_json(R"({
        "frames-dir": "f", "superpixels-dir": "s", "gt-dir": "g", "out-dir": "o",
        "intensity-bins": 7, "geodesic-bins": 5, "geodesic-range": 2.5,
        "mu": 0.1, "include-self": true, "boundary-mode": "average",
        "boundary-sigma": 2.0, "metric": "emd", "pyramid": false,
        "alpha": 0.25, "gamma": 3.0, "clusters": 4, "seed": 11,
        "eval-tolerance": 1, "dump-features": true
    })", cfg);
    CHECK(cfg.frames_dir == "f");
    CHECK(cfg.options.binning.intensity_bins == 7);
    CHECK(cfg.options.binning.geodesic_bins == 5);
    CHECK(cfg.options.binning.range.per_frame_max == false);
    CHECK(cfg.options.binning.range.fixed_upper == 2.5);
    CHECK(cfg.options.binning.mu == 0.1);
    CHECK(cfg.options.binning.include_self == true);
    CHECK(cfg.options.boundary_mode == BoundaryCombine::Average);
    CHECK(cfg.options.metric == Metric::Emd);
    CHECK(cfg.options.pyramid == false);
    CHECK(cfg.options.alpha == 0.25);
    CHECK(cfg.options.gamma_auto == false);
    CHECK(cfg.options.gamma_value == 3.0);
    CHECK(cfg.options.clusters == 4);
    CHECK(cfg.options.seed == 11);
    CHECK(cfg.dump_features == true);

    PipelineConfig cfg2;
    apply_config_json(R"({"gamma": "median", "geodesic-range": "per-frame-max"})", cfg2);
    CHECK(cfg2.options.gamma_auto == true);
    CHECK(cfg2.options.binning.range.per_frame_max == true);

    CHECK_THROWS_AS(apply_config_json("{bad", cfg2), std::invalid_argument);
    CHECK_THROWS_AS(apply_config_json(R"({"metric": "cosine"})", cfg2),
                    std::invalid_argument);
    CHECK_THROWS_AS(apply_config_json(R"({"boundary-mode": "warp"})", cfg2),
                    std::invalid_argument);
    CHECK_THROWS_AS(apply_config_json(R"({"gamma": "auto"})", cfg2),
                    std::invalid_argument);
}

TEST_CASE("overlay rendering") {
    const fs::path dir = fs::temp_directory_path() / "geohist_render_test";
    fs::remove_all(dir);
    LabeledVolume vol(4, 2, 2, 3);  // constant label 3
    std::vector<Image> frames(2, Image(4, 2, 0.5));
    render_overlays(vol, frames, dir.string());
    REQUIRE(fs::exists(dir / "overlay_0000.ppm"));
    REQUIRE(fs::exists(dir / "overlay_0001.ppm"));

    const std::string ppm = slurp(dir / "overlay_0000.ppm");
    const std::string header = "P6\n4 2\n255\n";
    REQUIRE(ppm.rfind(header, 0) == 0);
    REQUIRE(ppm.size() == header.size() + 4 * 2 * 3);

    uint8_t r, g, b;
    label_color(3, r, g, b);
    const auto px = reinterpret_cast<const uint8_t*>(ppm.data() + header.size());
    // 50% blend of gray 0.5 (=127.5) with the label color, rounded
    const uint8_t er = static_cast<uint8_t>(std::lround(0.5 * 127.5 + 0.5 * r));
    const uint8_t eg = static_cast<uint8_t>(std::lround(0.5 * 127.5 + 0.5 * g));
    const uint8_t eb = static_cast<uint8_t>(std::lround(0.5 * 127.5 + 0.5 * b));
    for (int i = 0; i < 8; ++i) {  // constant labeling -> uniform tint
        CHECK(px[3 * i + 0] == er);
        CHECK(px[3 * i + 1] == eg);
        CHECK(px[3 * i + 2] == eb);
    }
    // same label set across frames -> identical colors
    const std::string ppm2 = slurp(dir / "overlay_0001.ppm");
    CHECK(ppm == ppm2);

    CHECK_THROWS_AS(render_overlays(vol, {Image(4, 2, 0.0)}, dir.string()),
                    std::invalid_argument);
}

}  // TEST_SUITE
