#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "bigset/cube.hpp"

namespace bigset {

struct RocPoint {
    double p_f = 0.0;  // false-alarm rate
    double p_d = 0.0;  // detection probability
    std::uint64_t false_positives = 0;
    std::uint64_t true_positives = 0;
};

/// ROC curve from (0, 0) to (1, 1). Curves built by roc_curve() also carry
/// the integer counts so the area can be computed exactly.
struct RocCurve {
    std::vector<RocPoint> points;
    std::uint64_t positives = 0;
    std::uint64_t negatives = 0;

    /// Curve from rates only, e.g. a hand-built reference curve.
    static RocCurve from_rates(const std::vector<std::pair<double, double>>& pf_pd);
};

/// Sweeps a threshold over the distinct scores; a pixel is flagged when its
/// score is strictly greater than the threshold. Tied scores enter the curve
/// together. Throws DataError on a shape mismatch or single-class labels.
RocCurve roc_curve(const ErrorMap& scores, const GroundTruth& gt);

/// Trapezoidal area under P_d(P_f).
double auc(const RocCurve& curve);

/// Shorthand for auc(roc_curve(scores, gt)).
double auc(const ErrorMap& scores, const GroundTruth& gt);

/// Writes "p_f,p_d" rows with a header line.
void save_roc_csv(const RocCurve& curve, const std::filesystem::path& path);

/// Min-max scales to [0, 255] and writes an 8-bit PGM. A constant map
/// exports as all zeros.
void export_map(const ErrorMap& map, const std::filesystem::path& path);

/// The 8-bit values export_map writes.
std::vector<std::uint8_t> scale_to_bytes(const ErrorMap& map);

}  // namespace bigset
