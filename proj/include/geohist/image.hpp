#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace geohist {

// Dense per-pixel scalar grid with values in [0,1]. Used both for intensity
// frames and for soft boundary maps. Row-major, pixel (x,y) at y*width+x.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    Image() = default;
    Image(int w, int h, double fill = 0.0)
        : width(w), height(h), values(static_cast<size_t>(w) * h, fill) {}

    double at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
    double& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }
    size_t size() const { return values.size(); }
    bool same_shape(const Image& o) const { return width == o.width && height == o.height; }
};

// Dense integer labeling of every pixel of every frame. Serves as superpixel
// maps, ground-truth segmentations, and output supervoxels alike. Label ids
// are non-negative and need not be contiguous.
struct LabeledVolume {
    int width = 0;
    int height = 0;
    int num_frames = 0;
    std::vector<int32_t> labels;  // frame-major, then row-major within a frame

    LabeledVolume() = default;
    LabeledVolume(int w, int h, int t, int32_t fill = 0)
        : width(w), height(h), num_frames(t),
          labels(static_cast<size_t>(w) * h * t, fill) {}

    size_t frame_stride() const { return static_cast<size_t>(width) * height; }

    int32_t label(int x, int y, int t) const {
        return labels[frame_stride() * t + static_cast<size_t>(y) * width + x];
    }
    int32_t& label(int x, int y, int t) {
        return labels[frame_stride() * t + static_cast<size_t>(y) * width + x];
    }
    std::span<const int32_t> frame(int t) const {
        return {labels.data() + frame_stride() * t, frame_stride()};
    }
    std::span<int32_t> frame(int t) {
        return {labels.data() + frame_stride() * t, frame_stride()};
    }
    bool same_shape(const LabeledVolume& o) const {
        return width == o.width && height == o.height && num_frames == o.num_frames;
    }
};

inline void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace geohist
