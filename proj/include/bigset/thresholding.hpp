#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bigset/cube.hpp"

namespace bigset {

inline constexpr double kDefaultGamma = 2.0;
inline constexpr std::size_t kDefaultBins = 200;

/// Uniform histogram over [0, 1]. Bins are left-closed, the last one also
/// includes 1.0.
struct Histogram {
    std::vector<double> edges;          // bin_count + 1 values, 0 ... 1
    std::vector<std::uint64_t> counts;  // bin_count values

    std::size_t bin_count() const noexcept { return counts.size(); }
    double center(std::size_t bin) const noexcept { return 0.5 * (edges[bin] + edges[bin + 1]); }
    std::uint64_t total() const noexcept;
};

struct TauEstimate {
    double tau = 1.0;           // fraction of samples at or left of the corner
    double corner_value = 1.0;  // right edge of the corner bin, on the transformed scale
    double gamma = kDefaultGamma;
    std::size_t corner_bin = 0;
    Histogram histogram;

    /// tau == 1 means the mask update will never flag a pixel.
    bool saturated() const noexcept { return tau >= 1.0; }
};

/// Elementwise v^gamma. Throws std::invalid_argument for gamma < 1 or a value
/// outside [0, 1].
std::vector<double> gamma_transform(std::span<const double> values, double gamma);

/// Throws std::invalid_argument for empty input or bins < 2.
Histogram build_histogram(std::span<const double> values, std::size_t bins);

/// Rosin-style corner of a unimodal histogram: the bin after the peak with the
/// largest perpendicular distance to the chord from the peak to the last
/// non-empty bin, using (bin center, count) coordinates. Ties go to the
/// smaller index. Throws ThresholdError on a tied peak or a peak with no
/// descending flank.
std::size_t unimodal_corner(const Histogram& hist);

/// Corner search on already-normalized relative distances in [0, 1].
TauEstimate estimate_tau_from_distances(std::span<const double> relative, double gamma,
                                        std::size_t bins);

/// Full pipeline: RX distances, relative scaling, gamma, histogram, corner.
TauEstimate estimate_tau(const HsiCube& cube, double gamma = kDefaultGamma,
                         std::size_t bins = kDefaultBins);

}  // namespace bigset
