#include "geohist/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include <json.hpp>

#include "geohist/pnm_io.hpp"

namespace geohist {

namespace {

struct RectPx {
    int x0, y0, x1, y1;  // half-open
};

RectPx rect_pixels(const ObjectSpec& o, double cx, double cy) {
    const int w = static_cast<int>(std::lround(o.size_x));
    const int h = static_cast<int>(std::lround(o.size_y));
    const int x0 = static_cast<int>(std::lround(cx - o.size_x / 2.0));
    const int y0 = static_cast<int>(std::lround(cy - o.size_y / 2.0));
    return {x0, y0, x0 + w, y0 + h};
}

void check_bounds(const SceneSpec& spec) {
    for (size_t k = 0; k < spec.objects.size(); ++k) {
        const ObjectSpec& o = spec.objects[k];
        require(o.intensity >= 0.0 && o.intensity <= 1.0, "object intensity outside [0,1]");
        require(o.size_x > 0.0, "object size must be positive");
        for (int t = 0; t < spec.num_frames; ++t) {
            const double cx = o.start_x + t * o.vel_x;
            const double cy = o.start_y + t * o.vel_y;
            bool ok;
            if (o.shape == ShapeKind::Rectangle) {
                const RectPx r = rect_pixels(o, cx, cy);
                ok = r.x0 >= 0 && r.y0 >= 0 && r.x1 <= spec.width && r.y1 <= spec.height;
            } else {
                const double r = o.size_x;
                ok = cx - r >= 0.0 && cy - r >= 0.0 && cx + r <= spec.width - 1 &&
                     cy + r <= spec.height - 1;
            }
            if (!ok)
                throw std::invalid_argument("object " + std::to_string(k) +
                                            " leaves the frame at frame " + std::to_string(t));
        }
    }
}

}  // namespace

Scene generate_scene(const SceneSpec& spec) {
    require(spec.width > 0 && spec.height > 0 && spec.num_frames > 0,
            "scene dimensions must be positive");
    require(spec.background_intensity >= 0.0 && spec.background_intensity <= 1.0,
            "background intensity outside [0,1]");
    require(spec.noise_sigma >= 0.0, "noise sigma must be >= 0");
    check_bounds(spec);

    Scene scene;
    scene.ground_truth = LabeledVolume(spec.width, spec.height, spec.num_frames, 0);
    scene.frames.reserve(spec.num_frames);

    const double two_pi = 2.0 * M_PI;
    SeededRng rng(spec.seed);

    for (int t = 0; t < spec.num_frames; ++t) {
        Image frame(spec.width, spec.height);
        for (int y = 0; y < spec.height; ++y) {
            for (int x = 0; x < spec.width; ++x) {
                double v = spec.background_intensity;
                if (spec.texture_amplitude != 0.0) {
                    v += spec.texture_amplitude *
                         std::sin(two_pi * x / spec.texture_wavelength) *
                         std::sin(two_pi * y / spec.texture_wavelength);
                }
                frame.at(x, y) = std::clamp(v, 0.0, 1.0);
            }
        }
        // occlusion order = object list order (later objects on top)
        for (size_t k = 0; k < spec.objects.size(); ++k) {
            const ObjectSpec& o = spec.objects[k];
            const double cx = o.start_x + t * o.vel_x;
            const double cy = o.start_y + t * o.vel_y;
            const int32_t label = static_cast<int32_t>(k) + 1;
            if (o.shape == ShapeKind::Rectangle) {
                const RectPx r = rect_pixels(o, cx, cy);
                for (int y = r.y0; y < r.y1; ++y)
                    for (int x = r.x0; x < r.x1; ++x) {
                        frame.at(x, y) = o.intensity;
                        scene.ground_truth.label(x, y, t) = label;
                    }
            } else {
                const double rr = o.size_x * o.size_x;
                const int y0 = static_cast<int>(std::ceil(cy - o.size_x));
                const int y1 = static_cast<int>(std::floor(cy + o.size_x));
                for (int y = y0; y <= y1; ++y) {
                    for (int x = static_cast<int>(std::ceil(cx - o.size_x));
                         x <= static_cast<int>(std::floor(cx + o.size_x)); ++x) {
                        const double dx = x - cx, dy = y - cy;
                        if (dx * dx + dy * dy <= rr) {
                            frame.at(x, y) = o.intensity;
                            scene.ground_truth.label(x, y, t) = label;
                        }
                    }
                }
            }
        }
        if (spec.noise_sigma > 0.0) {
            for (double& v : frame.values)
                v = std::clamp(v + spec.noise_sigma * rng.gaussian(), 0.0, 1.0);
        }
        scene.frames.push_back(std::move(frame));
    }
    return scene;
}

LabeledVolume grid_superpixels(const LabeledVolume& gt, int cell, bool respect_gt) {
    require(cell >= 1, "cell size must be >= 1");
    LabeledVolume out(gt.width, gt.height, gt.num_frames);
    const int tiles_x = (gt.width + cell - 1) / cell;
    for (int t = 0; t < gt.num_frames; ++t) {
        std::map<std::pair<int32_t, int32_t>, int32_t> split;  // (tile, gt label) -> id
        for (int y = 0; y < gt.height; ++y) {
            for (int x = 0; x < gt.width; ++x) {
                const int32_t tile = (y / cell) * tiles_x + (x / cell);
                if (!respect_gt) {
                    out.label(x, y, t) = tile;
                } else {
                    auto [it, inserted] = split.emplace(
                        std::make_pair(tile, gt.label(x, y, t)),
                        static_cast<int32_t>(split.size()));
                    out.label(x, y, t) = it->second;
                }
            }
        }
    }
    return out;
}

namespace {

// Separable Gaussian blur, kernel truncated at 3 sigma, clamped borders.
Image gaussian_smooth(const Image& src, double sigma, bool parallel) {
    if (sigma <= 0.0) return src;
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += k[i + radius];
    }
    for (double& v : k) v /= sum;

    const int w = src.width, h = src.height;
    Image tmp(w, h), out(w, h);
#pragma omp parallel for if (parallel)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += k[i + radius] * src.at(std::clamp(x + i, 0, w - 1), y);
            tmp.at(x, y) = acc;
        }
    }
#pragma omp parallel for if (parallel)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += k[i + radius] * tmp.at(x, std::clamp(y + i, 0, h - 1));
            out.at(x, y) = acc;
        }
    }
    return out;
}

Image sobel_impl(const Image& frame, double sigma, bool parallel) {
    require(frame.width > 0 && frame.height > 0, "empty frame");
    const Image sm = gaussian_smooth(frame, sigma, parallel);
    const int w = sm.width, h = sm.height;
    Image mag(w, h);
    auto px = [&](int x, int y) {
        return sm.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1));
    };
#pragma omp parallel for if (parallel)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double gx = (px(x + 1, y - 1) + 2.0 * px(x + 1, y) + px(x + 1, y + 1)) -
                              (px(x - 1, y - 1) + 2.0 * px(x - 1, y) + px(x - 1, y + 1));
            const double gy = (px(x - 1, y + 1) + 2.0 * px(x, y + 1) + px(x + 1, y + 1)) -
                              (px(x - 1, y - 1) + 2.0 * px(x, y - 1) + px(x + 1, y - 1));
            mag.at(x, y) = std::sqrt(gx * gx + gy * gy);
        }
    }
    double mx = 0.0;
    for (double v : mag.values) mx = std::max(mx, v);
    if (mx > 0.0)
        for (double& v : mag.values) v /= mx;
    return mag;
}

}  // namespace

Image sobel_boundary_map(const Image& frame, double sigma) {
    return sobel_impl(frame, sigma, true);
}

Image sobel_boundary_map_serial(const Image& frame, double sigma) {
    return sobel_impl(frame, sigma, false);
}

Image motion_boundary_map(const Image& frame_a, const Image& frame_b, double sigma) {
    require(frame_a.same_shape(frame_b), "frame dimensions differ");
    Image diff(frame_a.width, frame_a.height);
    for (size_t i = 0; i < diff.size(); ++i)
        diff.values[i] = std::fabs(frame_b.values[i] - frame_a.values[i]);
    Image sm = gaussian_smooth(diff, sigma, true);
    double mx = 0.0;
    for (double v : sm.values) mx = std::max(mx, v);
    if (mx > 0.0)
        for (double& v : sm.values) v /= mx;
    return sm;
}

using nlohmann::json;

SceneSpec scene_spec_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad scene JSON: ") + e.what());
    }
    SceneSpec s;
    try {
        s.width = j.at("width").get<int>();
        s.height = j.at("height").get<int>();
        s.num_frames = j.at("num_frames").get<int>();
        s.background_intensity = j.value("background_intensity", 0.5);
        s.texture_amplitude = j.value("texture_amplitude", 0.0);
        s.texture_wavelength = j.value("texture_wavelength", 24.0);
        s.noise_sigma = j.value("noise_sigma", 0.0);
        s.seed = j.value("seed", uint64_t{0});
        for (const auto& jo : j.value("objects", json::array())) {
            ObjectSpec o;
            const std::string shape = jo.at("shape").get<std::string>();
            if (shape == "rectangle") {
                o.shape = ShapeKind::Rectangle;
                o.size_x = jo.at("size").at(0).get<double>();
                o.size_y = jo.at("size").at(1).get<double>();
            } else if (shape == "disc") {
                o.shape = ShapeKind::Disc;
                o.size_x = o.size_y = jo.at("radius").get<double>();
            } else {
                throw std::invalid_argument("unknown shape: " + shape);
            }
            o.intensity = jo.at("intensity").get<double>();
            o.start_x = jo.at("start").at(0).get<double>();
            o.start_y = jo.at("start").at(1).get<double>();
            o.vel_x = jo.value("velocity", json::array({0.0, 0.0})).at(0).get<double>();
            o.vel_y = jo.value("velocity", json::array({0.0, 0.0})).at(1).get<double>();
            s.objects.push_back(o);
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad scene JSON: ") + e.what());
    }
    return s;
}

std::string scene_spec_to_json(const SceneSpec& spec) {
    nlohmann::ordered_json j;
    j["width"] = spec.width;
    j["height"] = spec.height;
    j["num_frames"] = spec.num_frames;
    j["background_intensity"] = spec.background_intensity;
    j["texture_amplitude"] = spec.texture_amplitude;
    j["texture_wavelength"] = spec.texture_wavelength;
    j["noise_sigma"] = spec.noise_sigma;
    j["seed"] = spec.seed;
    j["objects"] = nlohmann::ordered_json::array();
    for (const auto& o : spec.objects) {
        nlohmann::ordered_json jo;
        if (o.shape == ShapeKind::Rectangle) {
            jo["shape"] = "rectangle";
            jo["size"] = {o.size_x, o.size_y};
        } else {
            jo["shape"] = "disc";
            jo["radius"] = o.size_x;
        }
        jo["intensity"] = o.intensity;
        jo["start"] = {o.start_x, o.start_y};
        jo["velocity"] = {o.vel_x, o.vel_y};
        j["objects"].push_back(jo);
    }
    return j.dump(2);
}

void write_scene(const std::string& dir, const SceneSpec& spec, const Scene& scene) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(fs::path(dir) / "frames", ec);
    fs::create_directories(fs::path(dir) / "gt", ec);
    char name[64];
    for (int t = 0; t < spec.num_frames; ++t) {
        std::snprintf(name, sizeof(name), "frame_%04d.pgm", t);
        write_pgm8((fs::path(dir) / "frames" / name).string(), scene.frames[t]);
    }
    write_label_dir((fs::path(dir) / "gt").string(), scene.ground_truth, "gt_");

    nlohmann::ordered_json j;
    j["format_version"] = 1;
    j["rng_algorithm"] = kRngAlgorithm;
    j["scene"] = nlohmann::ordered_json::parse(scene_spec_to_json(spec));
    std::ofstream out(fs::path(dir) / "scene_manifest.json");
    if (!out) throw IoError("cannot write scene manifest in " + dir);
    out << j.dump(2) << '\n';
}

}  // namespace geohist
