#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "geohist/pipeline.hpp"
#include "geohist/stcluster.hpp"
#include "geohist/supereval.hpp"
#include "geohist/synth.hpp"
#include "oracles.hpp"

using namespace geohist;

namespace {

// canonical form: cluster ids renumbered by first occurrence
std::vector<int> canonical(const std::vector<int>& assign) {
    std::vector<int> out(assign.size());
    std::unordered_map<int, int> remap;
    for (size_t i = 0; i < assign.size(); ++i) {
        auto [it, inserted] = remap.emplace(assign[i], static_cast<int>(remap.size()));
        out[i] = it->second;
    }
    return out;
}

AffinityMatrix block_affinity(const std::vector<int>& block_sizes, double within,
                              std::mt19937_64* jitter = nullptr) {
    AffinityMatrix A;
    int n = 0;
    for (int s : block_sizes) n += s;
    A.n = n;
    int start = 0;
    for (int s : block_sizes) {
        for (int i = start; i < start + s; ++i)
            for (int j = i + 1; j < start + s; ++j) {
                double v = within;
                if (jitter) v = 0.5 + 0.5 * ((jitter->operator()() >> 11) * 0x1.0p-53);
                A.entries.push_back({i, j, v});
            }
        start += s;
    }
    return A;
}

std::vector<FrameGraph> graphs_for(const LabeledVolume& sp,
                                   const std::vector<Image>& frames) {
    std::vector<FrameGraph> graphs;
    for (int t = 0; t < sp.num_frames; ++t)
        graphs.push_back(build_frame_graph(sp, t, frames[t],
                                           Image(sp.width, sp.height, 0.0)));
    return graphs;
}

}  // namespace

TEST_SUITE("stcluster") {

TEST_CASE("static scene links every superpixel to its same-position successor") {
    LabeledVolume sp(8, 8, 3);
    for (int t = 0; t < 3; ++t)
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 8; ++x) sp.label(x, y, t) = (y / 4) * 2 + (x / 4);
    const std::vector<Image> frames(3, Image(8, 8, 0.5));
    const auto graphs = graphs_for(sp, frames);
    const SpatioTemporalGraph st = build_st_graph(graphs, sp);
    CHECK(st.num_nodes == 12);
    int temporal = 0;
    for (const auto& e : st.edges)
        if (e.kind == StEdgeKind::Temporal) {
            temporal++;
            // same local index in consecutive frames
            CHECK(e.b - e.a == 4);
        }
    CHECK(temporal == 8);  // 4 superpixels x 2 frame transitions
}

TEST_CASE("an object jumping beyond its extent gets no temporal self-edge") {
    // frame 0: object occupies columns 0..1; frame 1: columns 6..7
    LabeledVolume sp(8, 2, 2, 0);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 2; ++x) sp.label(x, y, 0) = 1;
    for (int y = 0; y < 2; ++y)
        for (int x = 6; x < 8; ++x) sp.label(x, y, 1) = 1;
    const std::vector<Image> frames(2, Image(8, 2, 0.5));
    const auto graphs = graphs_for(sp, frames);
    const SpatioTemporalGraph st = build_st_graph(graphs, sp);
    // object node is index 1 within each frame (labels sorted 0,1)
    const int obj0 = st.global_index(0, 1), obj1 = st.global_index(1, 1);
    for (const auto& e : st.edges)
        if (e.kind == StEdgeKind::Temporal) CHECK(!(e.a == obj0 && e.b == obj1));
}

TEST_CASE("temporal edges match the pixel-overlap oracle") {
    // 2 frames, 2 superpixels per frame, 50% overlap pattern
    LabeledVolume sp(4, 1, 2);
    const int32_t f0[] = {0, 0, 1, 1};
    const int32_t f1[] = {0, 1, 1, 1};
    std::copy(f0, f0 + 4, sp.frame(0).begin());
    std::copy(f1, f1 + 4, sp.frame(1).begin());
    const std::vector<Image> frames(2, Image(4, 1, 0.5));
    const auto graphs = graphs_for(sp, frames);
    const SpatioTemporalGraph st = build_st_graph(graphs, sp);

    // oracle: brute-force over pixel positions
    std::set<std::pair<int, int>> expected;
    for (int i = 0; i < 4; ++i)
        expected.emplace(st.global_index(0, sp.frame(0)[i]),
                         st.global_index(1, sp.frame(1)[i]));
    std::set<std::pair<int, int>> got;
    for (const auto& e : st.edges)
        if (e.kind == StEdgeKind::Temporal) got.emplace(e.a, e.b);
    CHECK(got == expected);
    CHECK(got.size() == 3);  // (0,0), (0,1), (1,1)
}

TEST_CASE("frame count mismatch is rejected") {
    LabeledVolume sp(2, 2, 2, 0);
    const std::vector<Image> frames(2, Image(2, 2, 0.5));
    auto graphs = graphs_for(sp, frames);
    graphs.pop_back();
    CHECK_THROWS_AS(build_st_graph(graphs, sp), std::invalid_argument);
}

TEST_CASE("feature affinity kernel") {
    CHECK(feature_affinity(0.0, 2.0) == doctest::Approx(1.0));
    CHECK(feature_affinity(1.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(feature_affinity(1e6, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(feature_affinity(-0.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(feature_affinity(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("affinity combination is a weighted geometric mean") {
    CHECK(combine_affinities(0.3, 0.9, 0.0) == doctest::Approx(0.3));
    CHECK(combine_affinities(0.3, 0.9, 1.0) == doctest::Approx(0.9));
    CHECK(combine_affinities(0.25, 1.0, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(combine_affinities(0.5, 0.5, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(combine_affinities(0.5, 0.5, 1.1), std::invalid_argument);
}

TEST_CASE("median of positive entries") {
    CHECK(median_positive({0.0, 3.0, 1.0, 2.0}) == doctest::Approx(2.0));
    CHECK(median_positive({4.0, 1.0, 2.0, 3.0}) == doctest::Approx(2.5));
    CHECK(median_positive({0.0, 0.0}) == 0.0);
    CHECK(median_positive({}) == 0.0);
}

TEST_CASE("block-diagonal affinities recover the blocks exactly") {
    std::mt19937_64 jitter(42);
    for (int k : {2, 3, 5}) {
        std::vector<int> sizes;
        for (int b = 0; b < k; ++b) sizes.push_back(4 + b);
        const AffinityMatrix A = block_affinity(sizes, 0.9, &jitter);
        for (uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
            const std::vector<int> got = canonical(spectral_cluster(A, k, seed));
            std::vector<int> expected;
            for (int b = 0; b < k; ++b)
                expected.insert(expected.end(), sizes[b], b);
            CHECK(got == canonical(expected));
        }
    }
}

TEST_CASE("k=1 puts every node in one cluster") {
    const AffinityMatrix A = block_affinity({3, 3}, 0.8);
    const std::vector<int> got = spectral_cluster(A, 1, 0);
    for (int c : got) CHECK(c == 0);
}

TEST_CASE("k exceeding the node count is rejected") {
    const AffinityMatrix A = block_affinity({3}, 0.8);
    CHECK_THROWS_AS(spectral_cluster(A, 4, 0), std::invalid_argument);
    CHECK_THROWS_AS(spectral_cluster(A, 0, 0), std::invalid_argument);
}

TEST_CASE("two cliques with one weak bridge split at the bridge") {
    // brute-force normalized cut over all bipartitions is the oracle
    const int na = 5, nb = 6, n = na + nb;
    std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < na; ++i)
        for (int j = i + 1; j < na; ++j) w[i][j] = w[j][i] = 1.0;
    for (int i = na; i < n; ++i)
        for (int j = i + 1; j < n; ++j) w[i][j] = w[j][i] = 1.0;
    w[0][na] = w[na][0] = 1e-6;

    AffinityMatrix A;
    A.n = n;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (w[i][j] > 0.0) A.entries.push_back({i, j, w[i][j]});

    const std::vector<int> expected = canonical(oracles::brute_force_ncut_bipartition(w));
    for (uint64_t seed : {0ull, 7ull, 99ull})
        CHECK(canonical(spectral_cluster(A, 2, seed)) == expected);
}

TEST_CASE("deterministic for a fixed seed") {
    std::mt19937_64 jitter(9);
    const AffinityMatrix A = block_affinity({6, 5, 7}, 0.9, &jitter);
    const auto a = spectral_cluster(A, 3, 1234);
    const auto b = spectral_cluster(A, 3, 1234);
    CHECK(a == b);
}

TEST_CASE("scaling distances with a matching gamma leaves affinities unchanged") {
    // exp(-gamma*d) == exp(-(gamma/c)*(c*d)); clustering must be identical
    std::mt19937_64 gen(10);
    SpatioTemporalGraph st;
    st.num_nodes = 10;
    st.frame_offset = {0, 10};
    for (int i = 0; i < 10; ++i)
        for (int j = i + 1; j < 10; ++j) {
            StEdge e;
            e.a = i;
            e.b = j;
            e.feature_distance = (gen() >> 11) * 0x1.0p-53;
            e.baseline_distance = (gen() >> 11) * 0x1.0p-53;
            st.edges.push_back(e);
        }
    const double gamma = 2.0, c = 5.0;
    const AffinityMatrix A1 = build_affinity_matrix(st, gamma, gamma, 0.5);
    SpatioTemporalGraph scaled = st;
    for (auto& e : scaled.edges) {
        e.feature_distance *= c;
        e.baseline_distance *= c;
    }
    const AffinityMatrix A2 = build_affinity_matrix(scaled, gamma / c, gamma / c, 0.5);
    REQUIRE(A1.entries.size() == A2.entries.size());
    for (size_t i = 0; i < A1.entries.size(); ++i)
        CHECK(A1.entries[i].value == doctest::Approx(A2.entries[i].value).epsilon(1e-12));
    CHECK(spectral_cluster(A1, 3, 5) == spectral_cluster(A2, 3, 5));
}

TEST_CASE("affinity symmetry survives combination") {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 100; ++trial) {
        const double base = (gen() >> 11) * 0x1.0p-53;
        const double geo = (gen() >> 11) * 0x1.0p-53;
        const double alpha = (gen() >> 11) * 0x1.0p-53;
        const double v = combine_affinities(base, geo, alpha);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0 + 1e-12);
    }
}

TEST_CASE("block-diagonal clustering reaches ac3d 1.0 against block truth") {
    // 2 frames x 6 superpixels; blocks = {frame-spanning pairs}
    LabeledVolume sp(6, 1, 2);
    for (int t = 0; t < 2; ++t)
        for (int x = 0; x < 6; ++x) sp.label(x, 0, t) = x;
    std::vector<FrameGraph> graphs =
        graphs_for(sp, std::vector<Image>(2, Image(6, 1, 0.5)));

    AffinityMatrix A;
    A.n = 12;
    // three blocks of four nodes: columns {0,1}, {2,3}, {4,5} across frames
    for (int b = 0; b < 3; ++b) {
        const int ids[4] = {2 * b, 2 * b + 1, 6 + 2 * b, 6 + 2 * b + 1};
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) A.entries.push_back({ids[i], ids[j], 1.0});
    }
    const std::vector<int> clusters = spectral_cluster(A, 3, 0);
    const LabeledVolume out = labels_to_volume(clusters, graphs, sp);
    LabeledVolume gt(6, 1, 2);
    for (int t = 0; t < 2; ++t)
        for (int x = 0; x < 6; ++x) gt.label(x, 0, t) = x / 2;
    CHECK(accuracy_3d(out, gt) == doctest::Approx(1.0));
}

TEST_CASE("labels_to_volume paints cluster ids") {
    LabeledVolume sp(4, 2, 1);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 4; ++x) sp.label(x, y, 0) = (x + y) % 2;  // checkerboard
    auto graphs = graphs_for(sp, {Image(4, 2, 0.5)});

    SUBCASE("identity clustering reproduces the superpixel structure") {
        const LabeledVolume out = labels_to_volume({0, 1}, graphs, sp);
        for (int y = 0; y < 2; ++y)
            for (int x = 0; x < 4; ++x) CHECK(out.label(x, y, 0) == sp.label(x, y, 0));
    }
    SUBCASE("k=1 gives a constant volume") {
        const LabeledVolume out = labels_to_volume({0, 0}, graphs, sp);
        for (int32_t v : out.labels) CHECK(v == 0);
    }
    SUBCASE("checkerboard repaint oracle") {
        const LabeledVolume out = labels_to_volume({5, 9}, graphs, sp);
        for (int y = 0; y < 2; ++y)
            for (int x = 0; x < 4; ++x)
                CHECK(out.label(x, y, 0) == ((x + y) % 2 ? 9 : 5));
    }
    SUBCASE("missing cluster assignment is rejected") {
        CHECK_THROWS_AS(labels_to_volume({0}, graphs, sp), std::invalid_argument);
    }
}

TEST_CASE("matrix market dump") {
    AffinityMatrix A;
    A.n = 3;
    A.entries.push_back({0, 1, 0.5});
    A.entries.push_back({1, 2, 0.25});
    std::ostringstream out;
    write_matrix_market(out, A);
    CHECK(out.str() ==
          "%%MatrixMarket matrix coordinate real symmetric\n"
          "3 3 2\n"
          "2 1 0.5\n"
          "3 2 0.25\n");
}

}  // TEST_SUITE
