#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "bigset/errors.hpp"
#include "bigset/stats_rx.hpp"
#include "support/oracles.hpp"

using namespace bigset;

TEST_CASE("identical pixels give mean = pixel and zero covariance") {
    HsiCube cube(3, 3, 2);
    for (std::size_t p = 0; p < 9; ++p) {
        cube.band(0)[p] = 1.5;
        cube.band(1)[p] = -2.0;
    }
    const BackgroundStats s = background_stats(cube);
    CHECK(s.mean(0) == doctest::Approx(1.5));
    CHECK(s.mean(1) == doctest::Approx(-2.0));
    CHECK(s.covariance.isZero(0.0));
    // All distances vanish even though the covariance is singular.
    const DistanceMap d = mahalanobis_map(cube, s);
    for (double v : d.values()) CHECK(v == 0.0);
}

TEST_CASE("two-pixel single-band statistics") {
    const HsiCube cube(1, 2, 1, {0.0, 2.0});
    const BackgroundStats s = background_stats(cube, 1e-9);
    CHECK(s.mean(0) == 1.0);
    CHECK(s.covariance(0, 0) == 2.0);
}

TEST_CASE("precision inverts the ridged covariance") {
    std::mt19937_64 rng(5);
    const HsiCube cube = oracle::random_cube(50, 50, 10, rng);
    const BackgroundStats s = background_stats(cube);
    CHECK(s.ridge > 0.0);
    Eigen::MatrixXd ridged = s.covariance;
    ridged.diagonal().array() += s.ridge;
    const Eigen::MatrixXd eye = s.precision * ridged;
    CHECK((eye - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((s.covariance - s.covariance.transpose()).cwiseAbs().maxCoeff() <=
          1e-10 * s.covariance.cwiseAbs().maxCoeff());
}

TEST_CASE("scalar Mahalanobis formula") {
    // mean 1, ridged variance 2 -> pixel 3 scores (3-1)^2 / 2 = 2.
    BackgroundStats s = BackgroundStats::from_moments(Eigen::VectorXd::Constant(1, 1.0),
                                                      Eigen::MatrixXd::Constant(1, 1, 2.0 - 1e-3),
                                                      Eigen::MatrixXd::Constant(1, 1, 2.0), 1e-3);
    const DistanceMap d = mahalanobis_map(HsiCube(1, 2, 1, {3.0, 1.0}), s);
    CHECK(d[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(d[1] == 0.0);
}

TEST_CASE("mahalanobis_map matches a per-pixel loop") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g(0.0, 1.0);
    HsiCube cube(12, 9, 6);
    for (double& v : cube.data()) v = g(rng);
    const BackgroundStats s = background_stats(cube);
    const DistanceMap d = mahalanobis_map(cube, s);
    for (std::size_t p = 0; p < cube.pixels(); ++p) {
        const auto x = cube.spectrum(p);
        double acc = 0.0;
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 6; ++j)
                acc += (x[i] - s.mean(i)) * s.precision(i, j) * (x[j] - s.mean(j));
        CHECK(d[p] == doctest::Approx(acc).epsilon(1e-10));
    }
}

TEST_CASE("Mahalanobis scores are invariant under an affine band recoding") {
    std::mt19937_64 rng(21);
    const std::size_t L = 4;
    const HsiCube cube = oracle::random_cube(6, 5, L, rng);
    const BackgroundStats s = background_stats(cube, 1e-3);

    Eigen::MatrixXd A(L, L);
    A << 2, 1, 0, 0, 0, 1, 3, 0, 1, 0, 1, -1, 0, 2, 0, 1;
    Eigen::VectorXd shift(L);
    shift << 0.5, -1, 2, 0.25;
    REQUIRE(std::abs(A.determinant()) > 1e-6);

    HsiCube recoded(6, 5, L);
    for (std::size_t p = 0; p < cube.pixels(); ++p) {
        const auto x = cube.spectrum(p);
        const Eigen::VectorXd y = A * Eigen::Map<const Eigen::VectorXd>(x.data(), L) + shift;
        for (std::size_t b = 0; b < L; ++b) recoded.band(b)[p] = y(static_cast<Eigen::Index>(b));
    }
    Eigen::MatrixXd ridged = s.covariance;
    ridged.diagonal().array() += s.ridge;
    const BackgroundStats t = BackgroundStats::from_moments(A * s.mean + shift, A * s.covariance * A.transpose(),
                                                            A * ridged * A.transpose(), s.ridge);
    const DistanceMap d0 = mahalanobis_map(cube, s);
    const DistanceMap d1 = mahalanobis_map(recoded, t);
    for (std::size_t p = 0; p < cube.pixels(); ++p) CHECK(d1[p] == doctest::Approx(d0[p]).epsilon(1e-8));
}

TEST_CASE("relative_distance") {
    const DistanceMap a = relative_distance(DistanceMap(1, 3, std::vector<double>{0, 2, 4}));
    CHECK(a.values() == std::vector<double>{0, 0.5, 1.0});
    const DistanceMap z = relative_distance(DistanceMap(2, 2, 0.0));
    for (double v : z.values()) CHECK(v == 0.0);
    CHECK(relative_distance(a) == a);  // idempotent
    CHECK_THROWS_AS(relative_distance(DistanceMap{}), std::invalid_argument);
}

TEST_CASE("rx_detect flags a spike in a constant cube") {
    HsiCube cube(5, 5, 3);
    for (double& v : cube.data()) v = 0.7;
    cube.at(2, 3, 0) = 3.0;
    cube.at(2, 3, 2) = -1.0;
    const ErrorMap score = rx_detect(cube);
    const std::size_t spike = 2 * 5 + 3;
    for (std::size_t p = 0; p < score.size(); ++p) {
        if (p != spike) CHECK(score[p] < score[spike]);
    }
}

TEST_CASE("rx_detect is equivariant under pixel permutation") {
    std::mt19937_64 rng(4);
    const HsiCube cube = oracle::random_cube(7, 6, 5, rng);
    std::vector<std::size_t> perm(cube.pixels());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    HsiCube shuffled(7, 6, 5);
    for (std::size_t b = 0; b < 5; ++b)
        for (std::size_t p = 0; p < perm.size(); ++p) shuffled.band(b)[p] = cube.band(b)[perm[p]];
    const ErrorMap a = rx_detect(cube), s = rx_detect(shuffled);
    for (std::size_t p = 0; p < perm.size(); ++p) CHECK(s[p] == doctest::Approx(a[perm[p]]).epsilon(1e-9));
}

TEST_CASE("errors") {
    CHECK_THROWS_AS(background_stats(HsiCube(1, 1, 2)), std::invalid_argument);
    std::mt19937_64 rng(1);
    const BackgroundStats s = background_stats(oracle::random_cube(4, 4, 3, rng));
    CHECK_THROWS_AS(mahalanobis_map(oracle::random_cube(4, 4, 2, rng), s), DataError);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
    bad(1, 1) = -1.0;
    CHECK_THROWS_AS(BackgroundStats::from_moments(Eigen::VectorXd::Zero(2), bad, bad, 0.0), NumericError);
}
