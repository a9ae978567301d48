#include <doctest.h>

#include <cmath>
#include <random>

#include "geohist/histdist.hpp"
#include "oracles.hpp"

using namespace geohist;

namespace {

Histogram2D hist2(int ib, int gb, std::vector<double> mass) {
    Histogram2D h(ib, gb);
    h.mass = std::move(mass);
    return h;
}

Histogram1D hist1(std::vector<double> mass) {
    Histogram1D h;
    h.mass = std::move(mass);
    return h;
}

Histogram2D random_hist(std::mt19937_64& gen, int ib, int gb, double sparsity = 0.5) {
    Histogram2D h(ib, gb);
    auto uni = [&] { return (gen() >> 11) * 0x1.0p-53; };
    for (auto& v : h.mass)
        if (uni() > sparsity) v = uni();
    return h;
}

}  // namespace

TEST_SUITE("histdist") {

TEST_CASE("chi-square fixtures") {
    const auto a = hist2(2, 2, {0.5, 0.0, 0.0, 0.5});
    const auto b = hist2(2, 2, {0.0, 0.5, 0.5, 0.0});
    CHECK(chi_square_2d(a, a) == 0.0);
    CHECK(chi_square_2d(a, b) == doctest::Approx(1.0).epsilon(1e-12));

    const auto c = hist2(1, 2, {1.0, 0.0});
    const auto d = hist2(1, 2, {0.5, 0.5});
    CHECK(chi_square_2d(c, d) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));

    CHECK_THROWS_AS(chi_square_2d(a, c), std::invalid_argument);
}

TEST_CASE("emd fixtures") {
    CHECK(emd_1d(hist1({1, 0, 0}), hist1({0, 0, 1})) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(emd_1d(hist1({0.3, 0.4}), hist1({0.3, 0.4})) == 0.0);
    CHECK(emd_1d(hist1({0.5, 0.5, 0}), hist1({0, 0.5, 0.5})) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(emd_1d(hist1({1}), hist1({1, 0})), std::invalid_argument);

    // terminal-gap rule for unequal totals: the residual mass pays at
    // every remaining step
    CHECK(emd_1d(hist1({1, 0}), hist1({0, 0})) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("emd_2d sums per-intensity-row 1d emds") {
    const auto a = hist2(2, 3, {1, 0, 0, 1, 0, 0});
    const auto b = hist2(2, 3, {0, 0, 1, 0, 0, 1});
    CHECK(emd_2d(a, a) == 0.0);
    CHECK(emd_2d(a, b) == doctest::Approx(4.0).epsilon(1e-12));

    const auto p = hist2(1, 3, {0.5, 0.5, 0});
    const auto q = hist2(1, 3, {0, 0.5, 0.5});
    CHECK(emd_2d(p, q) == doctest::Approx(emd_1d(hist1({0.5, 0.5, 0}), hist1({0, 0.5, 0.5})))
                              .epsilon(1e-12));
    CHECK_THROWS_AS(emd_2d(a, p), std::invalid_argument);
}

TEST_CASE("emd_1d equals the transportation LP on equal-mass inputs") {
    std::mt19937_64 gen(300);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(gen() % 8);  // length <= 9
        std::vector<long long> su(n, 0), du(n, 0);
        long long total = 0;
        for (int i = 0; i < n; ++i) {
            su[i] = static_cast<long long>(gen() % 20);
            total += su[i];
        }
        if (total == 0) {
            su[0] = total = 1;
        }
        // random composition of the same total on the demand side
        for (long long ball = 0; ball < total; ++ball) du[gen() % n]++;

        std::vector<double> p(n), q(n);
        for (int i = 0; i < n; ++i) {
            p[i] = static_cast<double>(su[i]) / total;
            q[i] = static_cast<double>(du[i]) / total;
        }
        const double expected = oracles::transport_emd_1d_units(su, du) / total;
        const double got = emd_1d(std::span<const double>(p), std::span<const double>(q));
        CHECK(std::fabs(got - expected) <= 1e-9);
    }
}

TEST_CASE("symmetry and non-negativity on random histogram pairs") {
    std::mt19937_64 gen(301);
    for (int trial = 0; trial < 1000; ++trial) {
        const Histogram2D a = random_hist(gen, 4, 5);
        const Histogram2D b = random_hist(gen, 4, 5);
        const double c1 = chi_square_2d(a, b);
        const double c2 = chi_square_2d(b, a);
        CHECK(c1 >= 0.0);
        CHECK(c1 == doctest::Approx(c2).epsilon(1e-12));
        const double e1 = emd_2d(a, b);
        const double e2 = emd_2d(b, a);
        CHECK(e1 >= 0.0);
        CHECK(e1 == doctest::Approx(e2).epsilon(1e-12));
        // chi-square bounded by half the combined mass
        CHECK(c1 <= 0.5 * (a.total() + b.total()) + 1e-12);
    }
}

TEST_CASE("self distance is exactly zero") {
    std::mt19937_64 gen(302);
    for (int trial = 0; trial < 50; ++trial) {
        const Histogram2D a = random_hist(gen, 13, 9);
        CHECK(chi_square_2d(a, a) == 0.0);
        CHECK(emd_2d(a, a) == 0.0);
    }
}

TEST_CASE("pyramid distance combines level distances with weights") {
    PyramidFeature a, b;
    a.level0 = hist2(1, 2, {0.4, 0.0});
    b.level0 = hist2(1, 2, {0.0, 0.4});
    for (int c = 0; c < 4; ++c) {
        a.level1[c] = hist2(1, 2, {0.1, 0.0});
        b.level1[c] = hist2(1, 2, {0.0, 0.1});
    }
    // chi-square of [m,0] vs [0,m] is m, so per-cell distances are
    // 0.4 and 0.1,0.1,0.1,0.1
    PyramidWeights w;
    CHECK(pyramid_distance(a, b, Metric::Chi2, w) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pyramid_distance(a, a, Metric::Chi2, w) == 0.0);

    SUBCASE("all-zero level1 reduces to the level0 distance") {
        for (int c = 0; c < 4; ++c) {
            a.level1[c] = hist2(1, 2, {0.0, 0.0});
            b.level1[c] = hist2(1, 2, {0.0, 0.0});
        }
        CHECK(pyramid_distance(a, b, Metric::Chi2, w) ==
              doctest::Approx(chi_square_2d(a.level0, b.level0)).epsilon(1e-12));
    }
}

}  // TEST_SUITE
