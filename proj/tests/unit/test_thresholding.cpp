#include <doctest.h>

#include <cmath>
#include <random>

#include "bigset/errors.hpp"
#include "bigset/thresholding.hpp"
#include "support/oracles.hpp"
#include "support/threshold_fixtures.hpp"

using namespace bigset;

TEST_CASE("gamma_transform") {
    const std::vector<double> v{0.0, 0.25, 0.5, 1.0};
    CHECK(gamma_transform(v, 1.0) == v);
    CHECK(gamma_transform(std::vector<double>{0.5}, 2.0)[0] == 0.25);
    const auto g = gamma_transform(v, 3.5);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 1.0);
    CHECK(std::is_sorted(g.begin(), g.end()));
    CHECK_THROWS_AS(gamma_transform(v, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(gamma_transform(std::vector<double>{1.2}, 2.0), std::invalid_argument);
}

TEST_CASE("build_histogram uses left-closed bins with 1.0 in the last bin") {
    const Histogram h = build_histogram(std::vector<double>{0.0, 0.5, 1.0}, 2);
    CHECK(h.counts == std::vector<std::uint64_t>{1, 2});
    CHECK(h.edges == std::vector<double>{0.0, 0.5, 1.0});

    const Histogram zeros = build_histogram(std::vector<double>(7, 0.0), 5);
    CHECK(zeros.counts == std::vector<std::uint64_t>{7, 0, 0, 0, 0});

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> values(1234);
    for (double& v : values) v = u(rng);
    const Histogram r = build_histogram(values, 37);
    CHECK(r.total() == values.size());
    for (std::size_t i = 0; i < 37; ++i) CHECK(r.edges[i] < r.edges[i + 1]);

    CHECK_THROWS_AS(build_histogram(std::vector<double>{}, 4), std::invalid_argument);
    CHECK_THROWS_AS(build_histogram(values, 1), std::invalid_argument);
}

TEST_CASE("unimodal_corner on hand-checked histograms") {
    CHECK(unimodal_corner(test::histogram_of({100, 1, 1, 1, 1})) == 1);
    CHECK(oracle::brute_corner({100, 1, 1, 1, 1}) == 1);
    // Collinear descent: every distance is zero, the first candidate wins.
    CHECK(unimodal_corner(test::histogram_of({50, 40, 30, 20, 10})) == 1);
    const std::vector<std::uint64_t> c{80, 40, 8, 4, 2, 1};
    CHECK(unimodal_corner(test::histogram_of(c)) == oracle::brute_corner(c));
    // Peak need not be the first bin.
    const std::vector<std::uint64_t> shifted{3, 90, 20, 5, 2, 0, 1, 0};
    CHECK(unimodal_corner(test::histogram_of(shifted)) == oracle::brute_corner(shifted));
}

TEST_CASE("unimodal_corner agrees with the exhaustive oracle on random unimodal histograms") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 200; ++trial) {
        const auto counts = test::random_unimodal_counts(rng);
        const std::size_t got = unimodal_corner(test::histogram_of(counts));
        CHECK(got == oracle::brute_corner(counts));
        std::size_t peak = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
        CHECK(got > peak);
    }
}

TEST_CASE("unimodal_corner failure modes") {
    CHECK_THROWS_AS(unimodal_corner(test::histogram_of({5, 5, 1})), ThresholdError);
    CHECK_THROWS_AS(unimodal_corner(test::histogram_of({0, 1, 9})), ThresholdError);
    CHECK_THROWS_AS(unimodal_corner(test::histogram_of({9, 0, 0})), ThresholdError);
}

TEST_CASE("estimate_tau on a two-population distance field") {
    const auto field = test::two_population_field(200, 2.0);
    const TauEstimate est = estimate_tau_from_distances(field.relative, 2.0, 200);
    CHECK(std::abs(est.tau - 0.95) <= field.tolerance);
    CHECK(est.corner_bin > 0);

    // The same estimate through a cube whose RX distances reproduce the field.
    const TauEstimate via_cube = estimate_tau(test::cube_with_relative_distances(field.relative), 2.0, 200);
    CHECK(std::abs(via_cube.tau - 0.95) <= field.tolerance);
}

TEST_CASE("tau is rank based: back-mapping the corner recovers it on raw distances") {
    std::mt19937_64 rng(77);
    const auto field = test::two_population_field(200, 2.0);
    for (double gamma : {1.0, 1.5, 2.0, 3.0}) {
        const TauEstimate est = estimate_tau_from_distances(field.relative, gamma, 200);
        const double raw_threshold = std::pow(est.corner_value, 1.0 / gamma);
        const auto below = std::count_if(field.relative.begin(), field.relative.end(),
                                         [&](double v) { return v <= raw_threshold; });
        CHECK(static_cast<double>(below) / static_cast<double>(field.relative.size()) == est.tau);
    }
}

TEST_CASE("gamma changes tau while both searches succeed") {
    // Background spread over a decaying bulk so gamma moves the corner.
    std::mt19937_64 rng(5);
    std::exponential_distribution<double> e(12.0);
    std::vector<double> d;
    for (int i = 0; i < 3000; ++i) d.push_back(std::min(1.0, e(rng)));
    d.push_back(1.0);
    const TauEstimate g1 = estimate_tau_from_distances(d, 1.0, 200);
    const TauEstimate g2 = estimate_tau_from_distances(d, 2.0, 200);
    CHECK(g1.tau != g2.tau);
}

TEST_CASE("an all-identical cube surfaces a threshold error") {
    HsiCube cube(6, 6, 4);
    for (double& v : cube.data()) v = 0.25;
    CHECK_THROWS_AS(estimate_tau(cube), ThresholdError);
}

TEST_CASE("estimate_tau is deterministic") {
    std::mt19937_64 rng(2);
    HsiCube cube = oracle::random_cube(20, 20, 5, rng);
    cube.at(3, 3, 1) = 9.0;
    const TauEstimate a = estimate_tau(cube), b = estimate_tau(cube);
    CHECK(a.tau == b.tau);
    CHECK(a.corner_bin == b.corner_bin);
    CHECK(a.tau > 0.0);
    CHECK(a.tau <= 1.0);
}
