#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "geohist/image.hpp"

namespace geohist {

// Seeded generator used for all synthetic randomness: mt19937_64 with an
// explicit Box-Muller transform, so fixtures are bit-identical across
// platforms. The identifier goes into scene manifests.
inline constexpr const char* kRngAlgorithm = "mt19937_64/box-muller";

class SeededRng {
public:
    explicit SeededRng(uint64_t seed) : gen_(seed) {}
    uint64_t next_u64() { return gen_(); }
    double uniform01() { return (gen_() >> 11) * 0x1.0p-53; }
    double gaussian() {
        // Box-Muller; draws a fresh pair each call
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    std::mt19937_64 gen_;
};

enum class ShapeKind { Rectangle, Disc };

struct ObjectSpec {
    ShapeKind shape = ShapeKind::Rectangle;
    double size_x = 8.0;       // rectangle width; disc radius
    double size_y = 8.0;       // rectangle height; ignored for discs
    double intensity = 0.9;
    double start_x = 0.0;      // center position at frame 0
    double start_y = 0.0;
    double vel_x = 0.0;        // pixels/frame
    double vel_y = 0.0;
};

struct SceneSpec {
    int width = 64;
    int height = 64;
    int num_frames = 8;
    double background_intensity = 0.5;
    double texture_amplitude = 0.0;    // optional sinusoidal background texture
    double texture_wavelength = 24.0;  // pixels
    std::vector<ObjectSpec> objects;   // later objects occlude earlier ones
    double noise_sigma = 0.0;
    uint64_t seed = 0;
};

struct Scene {
    std::vector<Image> frames;
    LabeledVolume ground_truth;  // label 0 = background, object k -> label k+1... see below
};

// Deterministic scene render. Ground-truth label 0 is the background; the
// k-th object (1-based over the spec's object list) paints label k. Objects
// whose path leaves the frame raise an error.
Scene generate_scene(const SceneSpec& spec);

// Regular cell x cell tiling per frame. With respect_gt, pixels of one tile
// that belong to different ground-truth labels become distinct superpixels,
// so an exact segmentation exists by construction.
LabeledVolume grid_superpixels(const LabeledVolume& gt, int cell, bool respect_gt);

// Gaussian-smoothed Sobel gradient magnitude, normalized by the frame
// maximum (an all-zero gradient stays all-zero).
Image sobel_boundary_map(const Image& frame, double sigma);
Image sobel_boundary_map_serial(const Image& frame, double sigma);  // reference

// Normalized absolute temporal difference, smoothed the same way.
Image motion_boundary_map(const Image& frame_a, const Image& frame_b, double sigma);

// JSON scene description (see README for the schema).
SceneSpec scene_spec_from_json(const std::string& text);
std::string scene_spec_to_json(const SceneSpec& spec);

// Writes frames as 8-bit PGM, ground truth as 16-bit PGM label maps, and a
// manifest echoing the spec, seed, RNG algorithm, and format version.
void write_scene(const std::string& dir, const SceneSpec& spec, const Scene& scene);

}  // namespace geohist
