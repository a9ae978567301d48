#include "geohist/stcluster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>

#include <Eigen/Dense>

namespace geohist {

SpatioTemporalGraph build_st_graph(const std::vector<FrameGraph>& graphs,
                                   const LabeledVolume& superpixels) {
    require(static_cast<int>(graphs.size()) == superpixels.num_frames,
            "frame graphs do not cover the superpixel volume");
    require(!graphs.empty(), "no frames");

    SpatioTemporalGraph st;
    st.frame_offset.resize(graphs.size() + 1, 0);
    for (size_t f = 0; f < graphs.size(); ++f)
        st.frame_offset[f + 1] = st.frame_offset[f] + static_cast<int>(graphs[f].nodes.size());
    st.num_nodes = st.frame_offset.back();

    for (size_t f = 0; f < graphs.size(); ++f) {
        const int off = st.frame_offset[f];
        for (const auto& e : graphs[f].edges)
            st.edges.push_back({off + e.a, off + e.b, StEdgeKind::Spatial, 0.0, 0.0});
    }

    // Temporal edge iff two superpixels of consecutive frames share >= 1
    // pixel position.
    for (int t = 0; t + 1 < superpixels.num_frames; ++t) {
        const auto cur = superpixels.frame(t);
        const auto nxt = superpixels.frame(t + 1);
        std::set<std::pair<int, int>> links;
        for (size_t i = 0; i < cur.size(); ++i) {
            const int a = graphs[t].node_of_label(cur[i]);
            const int b = graphs[t + 1].node_of_label(nxt[i]);
            require(a >= 0 && b >= 0, "superpixel label missing from frame graph");
            links.emplace(st.global_index(t, a), st.global_index(t + 1, b));
        }
        for (const auto& [a, b] : links)
            st.edges.push_back({a, b, StEdgeKind::Temporal, 0.0, 0.0});
    }
    return st;
}

namespace {

struct NodeRef {
    int frame = 0;
    int local = 0;
};

std::vector<NodeRef> node_refs(const SpatioTemporalGraph& st) {
    std::vector<NodeRef> refs(st.num_nodes);
    for (int f = 0; f < st.num_frames(); ++f)
        for (int i = st.frame_offset[f]; i < st.frame_offset[f + 1]; ++i)
            refs[i] = {f, i - st.frame_offset[f]};
    return refs;
}

void assign_distances_impl(SpatioTemporalGraph& st,
                           const std::vector<FrameGraph>& graphs,
                           const std::vector<FrameFeatures>& features,
                           Metric metric, bool pyramid, const PyramidWeights& w,
                           bool parallel) {
    require(graphs.size() == features.size(), "features do not cover all frames");
    const auto refs = node_refs(st);
    const auto edge_distance = [&](const StEdge& e, double& feat, double& base) {
        const NodeRef ra = refs[e.a], rb = refs[e.b];
        const PyramidFeature& fa = features[ra.frame].features[ra.local];
        const PyramidFeature& fb = features[rb.frame].features[rb.local];
        feat = pyramid ? pyramid_distance(fa, fb, metric, w)
                       : histogram_distance(fa.level0, fb.level0, metric);
        base = std::fabs(graphs[ra.frame].nodes[ra.local].mean_intensity -
                         graphs[rb.frame].nodes[rb.local].mean_intensity);
    };
    const int m = static_cast<int>(st.edges.size());
#pragma omp parallel for schedule(dynamic, 64) if (parallel)
    for (int i = 0; i < m; ++i)
        edge_distance(st.edges[i], st.edges[i].feature_distance,
                      st.edges[i].baseline_distance);
}

}  // namespace

void assign_edge_distances(SpatioTemporalGraph& st,
                           const std::vector<FrameGraph>& graphs,
                           const std::vector<FrameFeatures>& features,
                           Metric metric, bool pyramid, const PyramidWeights& w) {
    assign_distances_impl(st, graphs, features, metric, pyramid, w, true);
}

void assign_edge_distances_serial(SpatioTemporalGraph& st,
                                  const std::vector<FrameGraph>& graphs,
                                  const std::vector<FrameFeatures>& features,
                                  Metric metric, bool pyramid,
                                  const PyramidWeights& w) {
    assign_distances_impl(st, graphs, features, metric, pyramid, w, false);
}

double feature_affinity(double distance, double gamma) {
    require(distance >= 0.0, "negative distance");
    require(gamma > 0.0, "gamma must be > 0");
    return std::exp(-gamma * distance);
}

double combine_affinities(double base, double geo, double alpha) {
    require(alpha >= 0.0 && alpha <= 1.0, "alpha outside [0,1]");
    return std::pow(base, 1.0 - alpha) * std::pow(geo, alpha);
}

double median_positive(std::vector<double> values) {
    values.erase(std::remove_if(values.begin(), values.end(),
                                [](double v) { return !(v > 0.0); }),
                 values.end());
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const size_t n = values.size();
    return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

AffinityMatrix build_affinity_matrix(const SpatioTemporalGraph& st,
                                     double gamma_feature, double gamma_baseline,
                                     double alpha) {
    AffinityMatrix A;
    A.n = st.num_nodes;
    A.entries.reserve(st.edges.size());
    for (const auto& e : st.edges) {
        const double geo = feature_affinity(e.feature_distance, gamma_feature);
        const double base = feature_affinity(e.baseline_distance, gamma_baseline);
        A.entries.push_back({e.a, e.b, combine_affinities(base, geo, alpha)});
    }
    return A;
}

void write_matrix_market(std::ostream& out, const AffinityMatrix& A) {
    out << "%%MatrixMarket matrix coordinate real symmetric\n";
    out << A.n << ' ' << A.n << ' ' << A.entries.size() << '\n';
    char buf[64];
    for (const auto& e : A.entries) {
        // lower triangle: row >= column
        const int r = std::max(e.i, e.j) + 1;
        const int c = std::min(e.i, e.j) + 1;
        std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", r, c, e.value);
        out << buf;
    }
}

namespace {

double uniform01(std::mt19937_64& gen) { return (gen() >> 11) * 0x1.0p-53; }

// Seeded k-means++ followed by Lloyd iterations. Ties break toward the
// lowest index so runs are reproducible.
std::vector<int> kmeans(const Eigen::MatrixXd& points, int k, uint64_t seed,
                        int max_iters) {
    const int n = static_cast<int>(points.rows());
    std::mt19937_64 gen(seed);
    Eigen::MatrixXd centers(k, points.cols());

    // k-means++ seeding
    centers.row(0) = points.row(static_cast<int>(gen() % n));
    Eigen::VectorXd d2 = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        const double total = d2.sum();
        int pick = 0;
        if (total > 0.0) {
            const double target = uniform01(gen) * total;
            double cum = 0.0;
            pick = n - 1;
            for (int i = 0; i < n; ++i) {
                cum += d2[i];
                if (cum >= target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<int>(gen() % n);  // all remaining points coincide
        }
        centers.row(c) = points.row(pick);
        d2 = d2.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }

    std::vector<int> assign(n, 0);
    std::vector<int> prev(n, -1);
    for (int iter = 0; iter < max_iters; ++iter) {
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = (points.row(i) - centers.row(0)).squaredNorm();
            for (int c = 1; c < k; ++c) {
                const double d = (points.row(i) - centers.row(c)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            assign[i] = best;
        }
        // repopulate empty clusters with the point farthest from its center
        std::vector<int> sizes(k, 0);
        for (int a : assign) sizes[a]++;
        for (int c = 0; c < k; ++c) {
            if (sizes[c] > 0) continue;
            int far = -1;
            double far_d = -1.0;
            for (int i = 0; i < n; ++i) {
                if (sizes[assign[i]] <= 1) continue;
                const double d = (points.row(i) - centers.row(assign[i])).squaredNorm();
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            if (far >= 0) {
                sizes[assign[far]]--;
                assign[far] = c;
                sizes[c] = 1;
            }
        }
        if (assign == prev) break;
        prev = assign;
        centers.setZero();
        std::vector<int> counts(k, 0);
        for (int i = 0; i < n; ++i) {
            centers.row(assign[i]) += points.row(i);
            counts[assign[i]]++;
        }
        for (int c = 0; c < k; ++c)
            if (counts[c] > 0) centers.row(c) /= counts[c];
    }
    return assign;
}

}  // namespace

std::vector<int> spectral_cluster(const AffinityMatrix& A, int k, uint64_t seed) {
    const int n = A.n;
    require(k >= 1, "k must be >= 1");
    require(k <= n, "k exceeds node count");
    if (k == 1) return std::vector<int>(n, 0);

    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : A.entries) {
        require(e.i >= 0 && e.i < n && e.j >= 0 && e.j < n, "affinity index out of range");
        if (e.i == e.j) continue;  // zero diagonal
        W(e.i, e.j) = e.value;
        W(e.j, e.i) = e.value;
    }

    Eigen::VectorXd deg = W.rowwise().sum();
    Eigen::VectorXd inv_sqrt(n);
    for (int i = 0; i < n; ++i) {
        const double d = deg[i] > 0.0 ? deg[i] : 1.0;  // isolated nodes
        inv_sqrt[i] = 1.0 / std::sqrt(d);
    }
    Eigen::MatrixXd L = -(inv_sqrt.asDiagonal() * W * inv_sqrt.asDiagonal());
    L.diagonal().array() += 1.0;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
    require(es.info() == Eigen::Success, "eigendecomposition failed");
    Eigen::MatrixXd embed = es.eigenvectors().leftCols(k);  // ascending eigenvalues

    for (int i = 0; i < n; ++i) {
        const double norm = embed.row(i).norm();
        if (norm > 0.0) embed.row(i) /= norm;
    }
    return kmeans(embed, k, seed, 300);
}

LabeledVolume labels_to_volume(const std::vector<int>& node_clusters,
                               const std::vector<FrameGraph>& graphs,
                               const LabeledVolume& superpixels) {
    require(static_cast<int>(graphs.size()) == superpixels.num_frames,
            "frame graphs do not cover the superpixel volume");
    int total = 0;
    for (const auto& g : graphs) total += static_cast<int>(g.nodes.size());
    require(static_cast<int>(node_clusters.size()) == total, "unlabeled node");

    LabeledVolume out(superpixels.width, superpixels.height, superpixels.num_frames);
    int offset = 0;
    for (int t = 0; t < superpixels.num_frames; ++t) {
        const auto src = superpixels.frame(t);
        auto dst = out.frame(t);
        for (size_t i = 0; i < src.size(); ++i) {
            const int local = graphs[t].node_of_label(src[i]);
            require(local >= 0, "superpixel label missing from frame graph");
            dst[i] = node_clusters[offset + local];
        }
        offset += static_cast<int>(graphs[t].nodes.size());
    }
    return out;
}

}  // namespace geohist
