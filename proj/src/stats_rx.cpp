#include "bigset/stats_rx.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "bigset/errors.hpp"

namespace bigset {

namespace {

Eigen::Map<const Eigen::MatrixXd> pixel_matrix(const HsiCube& cube) {
    return {cube.data().data(), static_cast<Eigen::Index>(cube.pixels()),
            static_cast<Eigen::Index>(cube.bands())};
}

}  // namespace

BackgroundStats BackgroundStats::from_moments(Eigen::VectorXd mean, Eigen::MatrixXd covariance,
                                              const Eigen::MatrixXd& regularized, double ridge) {
    Eigen::LLT<Eigen::MatrixXd> llt(regularized);
    if (llt.info() != Eigen::Success) {
        throw NumericError("ridged covariance is not positive definite (ridge " +
                           std::to_string(ridge) + " too small for degenerate data)");
    }
    const auto n = regularized.rows();
    Eigen::MatrixXd precision = llt.solve(Eigen::MatrixXd::Identity(n, n));
    precision = 0.5 * (precision + precision.transpose()).eval();
    if (!precision.allFinite()) throw NumericError("precision matrix is not finite");
    return {std::move(mean), std::move(covariance), std::move(precision), ridge};
}

double default_ridge(const Eigen::MatrixXd& covariance) {
    const double scaled = 1e-6 * covariance.trace() / static_cast<double>(covariance.rows());
    return std::max(scaled, 1e-12);
}

BackgroundStats background_stats(const HsiCube& cube, std::optional<double> ridge) {
    if (cube.pixels() < 2) throw std::invalid_argument("background statistics need at least 2 pixels");
    const auto X = pixel_matrix(cube);
    Eigen::VectorXd mean = X.colwise().mean().transpose();
    const Eigen::MatrixXd centered = X.rowwise() - mean.transpose();
    Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(cube.pixels() - 1);
    cov = 0.5 * (cov + cov.transpose()).eval();

    const double delta = ridge ? *ridge : default_ridge(cov);
    if (!(delta > 0.0)) throw std::invalid_argument("ridge must be positive");
    Eigen::MatrixXd regularized = cov;
    regularized.diagonal().array() += delta;
    return BackgroundStats::from_moments(std::move(mean), std::move(cov), regularized, delta);
}

DistanceMap mahalanobis_map(const HsiCube& cube, const BackgroundStats& stats) {
    if (cube.bands() != stats.bands()) {
        throw DataError("cube has " + std::to_string(cube.bands()) + " bands, statistics have " +
                        std::to_string(stats.bands()));
    }
    const auto X = pixel_matrix(cube);
    const Eigen::MatrixXd centered = X.rowwise() - stats.mean.transpose();
    const Eigen::MatrixXd projected = centered * stats.precision;
    DistanceMap out(cube.height(), cube.width());
    for (Eigen::Index p = 0; p < centered.rows(); ++p) {
        // Clamp round-off: P is positive definite so the exact value is >= 0.
        out[static_cast<std::size_t>(p)] = std::max(0.0, centered.row(p).dot(projected.row(p)));
    }
    return out;
}

DistanceMap relative_distance(const DistanceMap& map) {
    if (map.empty()) throw std::invalid_argument("distance map is empty");
    DistanceMap out = map;
    const double peak = *std::max_element(map.values().begin(), map.values().end());
    if (peak <= 0.0) {
        std::fill(out.values().begin(), out.values().end(), 0.0);
        return out;
    }
    for (double& v : out.values()) v /= peak;
    return out;
}

ErrorMap rx_detect(const HsiCube& cube, std::optional<double> ridge) {
    return mahalanobis_map(cube, background_stats(cube, ridge));
}

}  // namespace bigset
