#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "geohist/image.hpp"

namespace geohist {

// File-level failures (missing file, truncated data, bad magic). Distinct
// from std::invalid_argument so the CLI can map them to a separate exit code.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// 8-bit binary PGM (P5, maxval 255); pixel value v maps to intensity v/255.
Image read_pgm8(const std::string& path);
void write_pgm8(const std::string& path, const Image& img);

// 16-bit binary PGM (P5, maxval 65535, MSB first); value v maps to v/65535.
// Used for soft boundary maps.
Image read_pgm16_unit(const std::string& path);
void write_pgm16_unit(const std::string& path, const Image& img);

// 16-bit binary PGM holding raw integer label ids (one frame of a
// LabeledVolume). Ids above 65535 do not fit the format and are rejected.
struct LabelFrame {
    int width = 0;
    int height = 0;
    std::vector<int32_t> labels;
};
LabelFrame read_pgm16_labels(const std::string& path);
void write_pgm16_labels(const std::string& path, int width, int height,
                        const int32_t* labels);

// Binary PPM (P6, maxval 255), interleaved RGB.
void write_ppm(const std::string& path, int width, int height,
               const std::vector<uint8_t>& rgb);

// Sorted list of "*.pgm" files in a directory (lexicographic by filename).
std::vector<std::string> list_pgm_files(const std::string& dir);

// Directory-level volume I/O: one numbered PGM per frame.
std::vector<Image> read_frame_dir(const std::string& dir);
LabeledVolume read_label_dir(const std::string& dir);
void write_label_dir(const std::string& dir, const LabeledVolume& vol,
                     const std::string& prefix);

}  // namespace geohist
