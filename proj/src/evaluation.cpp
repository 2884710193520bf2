#include "bigset/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

#include "bigset/errors.hpp"
#include "bigset/hsi_io.hpp"
#include "binary_io.hpp"

namespace bigset {

RocCurve RocCurve::from_rates(const std::vector<std::pair<double, double>>& pf_pd) {
    RocCurve c;
    for (const auto& [pf, pd] : pf_pd) c.points.push_back({pf, pd, 0, 0});
    return c;
}

RocCurve roc_curve(const ErrorMap& scores, const GroundTruth& gt) {
    if (!scores.same_shape(gt)) {
        throw DataError("score map is " + std::to_string(scores.height()) + "x" + std::to_string(scores.width()) +
                        " but ground truth is " + std::to_string(gt.height()) + "x" + std::to_string(gt.width()));
    }
    RocCurve curve;
    curve.positives = count_ones(gt);
    curve.negatives = gt.size() - curve.positives;
    if (curve.positives == 0 || curve.negatives == 0) {
        throw DataError("ground truth must contain both anomaly and background pixels");
    }

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    const double P = static_cast<double>(curve.positives), N = static_cast<double>(curve.negatives);
    curve.points.push_back({0.0, 0.0, 0, 0});
    std::uint64_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < order.size();) {
        const double s = scores[order[i]];
        // Lowering the threshold below s flags every pixel scoring s at once.
        for (; i < order.size() && scores[order[i]] == s; ++i) {
            if (gt[order[i]]) ++tp;
            else ++fp;
        }
        curve.points.push_back({static_cast<double>(fp) / N, static_cast<double>(tp) / P, fp, tp});
    }
    return curve;
}

double auc(const RocCurve& curve) {
    const auto& pts = curve.points;
    if (pts.size() < 2) return 0.0;
    if (curve.positives > 0 && curve.negatives > 0) {
        // Exact: 2 * area * P * N is an integer.
        std::uint64_t twice = 0;
        for (std::size_t i = 1; i < pts.size(); ++i) {
            const std::uint64_t dfp = pts[i].false_positives - pts[i - 1].false_positives;
            twice += dfp * (pts[i].true_positives + pts[i - 1].true_positives);
        }
        return static_cast<double>(twice) /
               (2.0 * static_cast<double>(curve.positives) * static_cast<double>(curve.negatives));
    }
    double area = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        area += (pts[i].p_f - pts[i - 1].p_f) * (pts[i].p_d + pts[i - 1].p_d) * 0.5;
    }
    return area;
}

double auc(const ErrorMap& scores, const GroundTruth& gt) { return auc(roc_curve(scores, gt)); }

void save_roc_csv(const RocCurve& curve, const std::filesystem::path& path) {
    std::string out = "p_f,p_d\n";
    char line[64];
    for (const auto& p : curve.points) {
        std::snprintf(line, sizeof(line), "%.10g,%.10g\n", p.p_f, p.p_d);
        out += line;
    }
    detail::write_file(path, out);
}

std::vector<std::uint8_t> scale_to_bytes(const ErrorMap& map) {
    std::vector<std::uint8_t> px(map.size(), 0);
    if (map.empty()) return px;
    const auto [lo, hi] = std::minmax_element(map.values().begin(), map.values().end());
    const double range = *hi - *lo;
    if (!(range > 0.0)) return px;
    for (std::size_t i = 0; i < map.size(); ++i) {
        px[i] = static_cast<std::uint8_t>(std::lround(255.0 * (map[i] - *lo) / range));
    }
    return px;
}

void export_map(const ErrorMap& map, const std::filesystem::path& path) {
    write_pgm(path, map.height(), map.width(), scale_to_bytes(map));
}

}  // namespace bigset
