#pragma once

#include <Eigen/Dense>
#include <optional>

#include "bigset/cube.hpp"

namespace bigset {

/// Global background model: mean spectrum, sample covariance and the inverse
/// of the ridged covariance.
struct BackgroundStats {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
    Eigen::MatrixXd precision;
    double ridge = 0.0;

    std::size_t bands() const noexcept { return static_cast<std::size_t>(mean.size()); }

    /// Builds stats from given moments. `regularized` is the matrix to invert
    /// (normally covariance + ridge * I). Throws NumericError when it is not
    /// symmetric positive definite.
    static BackgroundStats from_moments(Eigen::VectorXd mean, Eigen::MatrixXd covariance,
                                        const Eigen::MatrixXd& regularized, double ridge);
};

/// Default ridge: 1e-6 * trace(cov) / L, floored at 1e-12 so that a
/// constant cube still yields a defined (all-zero) distance map.
double default_ridge(const Eigen::MatrixXd& covariance);

/// Mean over all pixels, covariance with divisor H*W - 1, precision from the
/// ridged covariance via Cholesky. Uses default_ridge when `ridge` is empty.
BackgroundStats background_stats(const HsiCube& cube, std::optional<double> ridge = std::nullopt);

/// Squared Mahalanobis distance (x - mu)^T P (x - mu) for every pixel.
DistanceMap mahalanobis_map(const HsiCube& cube, const BackgroundStats& stats);

/// Divides by the maximum; an all-zero map stays all zeros.
DistanceMap relative_distance(const DistanceMap& map);

/// Global RX detector: background_stats followed by mahalanobis_map.
ErrorMap rx_detect(const HsiCube& cube, std::optional<double> ridge = std::nullopt);

}  // namespace bigset
