#include "geohist/pnm_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace geohist {

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
        } else if (!std::isspace(c)) {
            tok.push_back(static_cast<char>(c));
            while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#') {
                tok.push_back(static_cast<char>(in.get()));
            }
            return tok;
        }
    }
    return tok;
}

struct PgmData {
    int width = 0, height = 0, maxval = 0;
    std::vector<uint32_t> pixels;
};

PgmData read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    if (next_token(in) != "P5") throw IoError("not a binary PGM (P5): " + path);
    PgmData d;
    try {
        d.width = std::stoi(next_token(in));
        d.height = std::stoi(next_token(in));
        d.maxval = std::stoi(next_token(in));
    } catch (const std::exception&) {
        throw IoError("malformed PGM header: " + path);
    }
    if (d.width <= 0 || d.height <= 0 || d.maxval <= 0 || d.maxval > 65535)
        throw IoError("bad PGM dimensions/maxval: " + path);
    in.get();  // single whitespace byte after maxval
    const size_t n = static_cast<size_t>(d.width) * d.height;
    const int bytes = d.maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(n * bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<size_t>(in.gcount()) != raw.size())
        throw IoError("truncated PGM data: " + path);
    d.pixels.resize(n);
    if (bytes == 1) {
        for (size_t i = 0; i < n; ++i) d.pixels[i] = raw[i];
    } else {
        for (size_t i = 0; i < n; ++i)
            d.pixels[i] = (static_cast<uint32_t>(raw[2 * i]) << 8) | raw[2 * i + 1];
    }
    return d;
}

void write_pgm(const std::string& path, int width, int height, int maxval,
               const std::vector<uint32_t>& pixels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << "P5\n" << width << " " << height << "\n" << maxval << "\n";
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(pixels.size() * bytes);
    if (bytes == 1) {
        for (size_t i = 0; i < pixels.size(); ++i)
            raw[i] = static_cast<unsigned char>(pixels[i]);
    } else {
        for (size_t i = 0; i < pixels.size(); ++i) {
            raw[2 * i] = static_cast<unsigned char>(pixels[i] >> 8);
            raw[2 * i + 1] = static_cast<unsigned char>(pixels[i] & 0xff);
        }
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw IoError("short write: " + path);
}

}  // namespace

Image read_pgm8(const std::string& path) {
    PgmData d = read_pgm(path);
    if (d.maxval != 255) throw IoError("expected 8-bit PGM (maxval 255): " + path);
    Image img(d.width, d.height);
    for (size_t i = 0; i < d.pixels.size(); ++i) img.values[i] = d.pixels[i] / 255.0;
    return img;
}

void write_pgm8(const std::string& path, const Image& img) {
    std::vector<uint32_t> px(img.size());
    for (size_t i = 0; i < px.size(); ++i)
        px[i] = static_cast<uint32_t>(std::lround(std::clamp(img.values[i], 0.0, 1.0) * 255.0));
    write_pgm(path, img.width, img.height, 255, px);
}

Image read_pgm16_unit(const std::string& path) {
    PgmData d = read_pgm(path);
    if (d.maxval != 65535) throw IoError("expected 16-bit PGM (maxval 65535): " + path);
    Image img(d.width, d.height);
    for (size_t i = 0; i < d.pixels.size(); ++i) img.values[i] = d.pixels[i] / 65535.0;
    return img;
}

void write_pgm16_unit(const std::string& path, const Image& img) {
    std::vector<uint32_t> px(img.size());
    for (size_t i = 0; i < px.size(); ++i)
        px[i] = static_cast<uint32_t>(std::lround(std::clamp(img.values[i], 0.0, 1.0) * 65535.0));
    write_pgm(path, img.width, img.height, 65535, px);
}

LabelFrame read_pgm16_labels(const std::string& path) {
    PgmData d = read_pgm(path);
    LabelFrame f;
    f.width = d.width;
    f.height = d.height;
    f.labels.assign(d.pixels.begin(), d.pixels.end());
    return f;
}

void write_pgm16_labels(const std::string& path, int width, int height,
                        const int32_t* labels) {
    const size_t n = static_cast<size_t>(width) * height;
    std::vector<uint32_t> px(n);
    for (size_t i = 0; i < n; ++i) {
        if (labels[i] < 0 || labels[i] > 65535)
            throw std::invalid_argument("label id out of 16-bit PGM range: " +
                                        std::to_string(labels[i]));
        px[i] = static_cast<uint32_t>(labels[i]);
    }
    write_pgm(path, width, height, 65535, px);
}

void write_ppm(const std::string& path, int width, int height,
               const std::vector<uint8_t>& rgb) {
    if (rgb.size() != static_cast<size_t>(width) * height * 3)
        throw std::invalid_argument("rgb buffer size does not match dimensions");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << "P6\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
    if (!out) throw IoError("short write: " + path);
}

std::vector<std::string> list_pgm_files(const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw IoError("not a directory: " + dir);
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".pgm")
            files.push_back(e.path().string());
    }
    std::sort(files.begin(), files.end());
    return files;
}

std::vector<Image> read_frame_dir(const std::string& dir) {
    std::vector<Image> frames;
    for (const auto& f : list_pgm_files(dir)) frames.push_back(read_pgm8(f));
    if (frames.empty()) throw IoError("no .pgm frames in " + dir);
    return frames;
}

LabeledVolume read_label_dir(const std::string& dir) {
    const auto files = list_pgm_files(dir);
    if (files.empty()) throw IoError("no .pgm label maps in " + dir);
    LabeledVolume vol;
    for (size_t t = 0; t < files.size(); ++t) {
        LabelFrame f = read_pgm16_labels(files[t]);
        if (t == 0) {
            vol = LabeledVolume(f.width, f.height, static_cast<int>(files.size()));
        } else if (f.width != vol.width || f.height != vol.height) {
            throw std::invalid_argument("label map dimensions differ at frame " +
                                        std::to_string(t) + ": " + files[t]);
        }
        std::copy(f.labels.begin(), f.labels.end(), vol.frame(static_cast<int>(t)).begin());
    }
    return vol;
}

void write_label_dir(const std::string& dir, const LabeledVolume& vol,
                     const std::string& prefix) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    char name[64];
    for (int t = 0; t < vol.num_frames; ++t) {
        std::snprintf(name, sizeof(name), "%s%04d.pgm", prefix.c_str(), t);
        write_pgm16_labels((fs::path(dir) / name).string(), vol.width, vol.height,
                           vol.frame(t).data());
    }
}

}  // namespace geohist
