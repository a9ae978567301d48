#include "geohist/supereval.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_map>
#include <vector>

namespace geohist {

namespace {

// Remaps arbitrary label ids to dense [0, count).
std::vector<int> dense_remap(const LabeledVolume& v, int& count) {
    std::unordered_map<int32_t, int> ids;
    std::vector<int> out(v.labels.size());
    for (size_t i = 0; i < v.labels.size(); ++i) {
        auto [it, inserted] = ids.emplace(v.labels[i], static_cast<int>(ids.size()));
        out[i] = it->second;
    }
    count = static_cast<int>(ids.size());
    return out;
}

void check_pair(const LabeledVolume& seg, const LabeledVolume& gt) {
    require(seg.same_shape(gt), "segmentation and ground truth dimensions differ");
    require(!gt.labels.empty(), "empty ground truth");
}

struct Overlaps {
    int num_seg = 0, num_gt = 0;
    std::vector<long long> seg_size, gt_size;
    std::unordered_map<int64_t, long long> counts;  // key = seg * num_gt + gt
};

Overlaps overlap_counts(const LabeledVolume& seg, const LabeledVolume& gt) {
    Overlaps o;
    const std::vector<int> s = dense_remap(seg, o.num_seg);
    const std::vector<int> g = dense_remap(gt, o.num_gt);
    o.seg_size.assign(o.num_seg, 0);
    o.gt_size.assign(o.num_gt, 0);
    for (size_t i = 0; i < s.size(); ++i) {
        o.seg_size[s[i]]++;
        o.gt_size[g[i]]++;
        o.counts[static_cast<int64_t>(s[i]) * o.num_gt + g[i]]++;
    }
    return o;
}

// 1 where the voxel has a differing 6-neighbor inside the volume.
std::vector<uint8_t> boundary_mask(const LabeledVolume& v) {
    const int w = v.width, h = v.height, T = v.num_frames;
    std::vector<uint8_t> mask(v.labels.size(), 0);
#pragma omp parallel for
    for (int t = 0; t < T; ++t) {
        const size_t base = v.frame_stride() * t;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const size_t i = base + static_cast<size_t>(y) * w + x;
                const int32_t c = v.labels[i];
                bool b = false;
                if (x + 1 < w && v.labels[i + 1] != c) b = true;
                else if (x > 0 && v.labels[i - 1] != c) b = true;
                else if (y + 1 < h && v.labels[i + w] != c) b = true;
                else if (y > 0 && v.labels[i - w] != c) b = true;
                else if (t + 1 < T && v.labels[i + v.frame_stride()] != c) b = true;
                else if (t > 0 && v.labels[i - v.frame_stride()] != c) b = true;
                mask[i] = b ? 1 : 0;
            }
        }
    }
    return mask;
}

// Fraction of query boundary voxels with a candidate boundary voxel within
// Chebyshev distance tol in the same frame. Integral image per frame makes
// the window test O(1) for any tol.
double boundary_match_fraction(const LabeledVolume& query_vol,
                               const LabeledVolume& cand_vol, int tol) {
    require(tol >= 0, "tolerance must be >= 0");
    const auto query = boundary_mask(query_vol);
    const auto cand = boundary_mask(cand_vol);
    const int w = query_vol.width, h = query_vol.height, T = query_vol.num_frames;

    long long matched = 0, total = 0;
    std::vector<long long> integral(static_cast<size_t>(w + 1) * (h + 1));
    for (int t = 0; t < T; ++t) {
        const size_t base = query_vol.frame_stride() * t;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                integral[static_cast<size_t>(y + 1) * (w + 1) + (x + 1)] =
                    cand[base + static_cast<size_t>(y) * w + x] +
                    integral[static_cast<size_t>(y) * (w + 1) + (x + 1)] +
                    integral[static_cast<size_t>(y + 1) * (w + 1) + x] -
                    integral[static_cast<size_t>(y) * (w + 1) + x];
        auto window_any = [&](int x, int y) {
            const int x0 = std::max(0, x - tol), y0 = std::max(0, y - tol);
            const int x1 = std::min(w - 1, x + tol), y1 = std::min(h - 1, y + tol);
            const long long s = integral[static_cast<size_t>(y1 + 1) * (w + 1) + (x1 + 1)] -
                                integral[static_cast<size_t>(y0) * (w + 1) + (x1 + 1)] -
                                integral[static_cast<size_t>(y1 + 1) * (w + 1) + x0] +
                                integral[static_cast<size_t>(y0) * (w + 1) + x0];
            return s > 0;
        };
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (query[base + static_cast<size_t>(y) * w + x]) {
                    total++;
                    if (window_any(x, y)) matched++;
                }
    }
    if (total == 0) return 1.0;
    return static_cast<double>(matched) / static_cast<double>(total);
}

}  // namespace

double accuracy_3d(const LabeledVolume& seg, const LabeledVolume& gt) {
    check_pair(seg, gt);
    const Overlaps o = overlap_counts(seg, gt);
    std::vector<long long> credit(o.num_gt, 0);
    for (const auto& [key, cnt] : o.counts) {
        const int sid = static_cast<int>(key / o.num_gt);
        const int gid = static_cast<int>(key % o.num_gt);
        if (2 * cnt > o.seg_size[sid]) credit[gid] += cnt;  // strict majority
    }
    double acc = 0.0;
    for (int g = 0; g < o.num_gt; ++g)
        acc += static_cast<double>(credit[g]) / static_cast<double>(o.gt_size[g]);
    return acc / o.num_gt;
}

double undersegmentation_error_3d(const LabeledVolume& seg, const LabeledVolume& gt) {
    check_pair(seg, gt);
    const Overlaps o = overlap_counts(seg, gt);
    std::vector<long long> touched(o.num_gt, 0);
    for (const auto& [key, cnt] : o.counts) {
        const int sid = static_cast<int>(key / o.num_gt);
        const int gid = static_cast<int>(key % o.num_gt);
        touched[gid] += o.seg_size[sid];
    }
    double err = 0.0;
    for (int g = 0; g < o.num_gt; ++g)
        err += static_cast<double>(touched[g] - o.gt_size[g]) /
               static_cast<double>(o.gt_size[g]);
    return err / o.num_gt;
}

double boundary_recall_3d(const LabeledVolume& seg, const LabeledVolume& gt, int tol) {
    check_pair(seg, gt);
    return boundary_match_fraction(gt, seg, tol);
}

double boundary_precision_3d(const LabeledVolume& seg, const LabeledVolume& gt, int tol) {
    check_pair(seg, gt);
    return boundary_match_fraction(seg, gt, tol);
}

double mean_temporal_length(const LabeledVolume& seg) {
    require(!seg.labels.empty(), "empty volume");
    std::unordered_map<int32_t, std::pair<int, long long>> spans;  // label -> (last frame, count)
    for (int t = 0; t < seg.num_frames; ++t) {
        for (int32_t v : seg.frame(t)) {
            auto [it, inserted] = spans.emplace(v, std::make_pair(t, 1LL));
            if (!inserted && it->second.first != t) {
                it->second.first = t;
                it->second.second++;
            }
        }
    }
    double acc = 0.0;
    for (const auto& [label, span] : spans) acc += static_cast<double>(span.second);
    return acc / static_cast<double>(spans.size());
}

long long count_labels(const LabeledVolume& vol) {
    int count = 0;
    dense_remap(vol, count);
    return count;
}

MetricsReport evaluate_supervoxels(const LabeledVolume& seg, const LabeledVolume& gt,
                                   int tol) {
    MetricsReport r;
    r.ac3d = accuracy_3d(seg, gt);
    r.ue3d = undersegmentation_error_3d(seg, gt);
    r.br3d = boundary_recall_3d(seg, gt, tol);
    r.bp3d = boundary_precision_3d(seg, gt, tol);
    r.mean_temporal_length = mean_temporal_length(seg);
    r.num_supervoxels = count_labels(seg);
    return r;
}

std::string metrics_to_json(const MetricsReport& r) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "{\"ac3d\":%.6f,\"ue3d\":%.6f,\"br3d\":%.6f,\"bp3d\":%.6f,"
                  "\"mean_temporal_length\":%.6f,\"num_supervoxels\":%lld}",
                  r.ac3d, r.ue3d, r.br3d, r.bp3d, r.mean_temporal_length,
                  r.num_supervoxels);
    return buf;
}

}  // namespace geohist
