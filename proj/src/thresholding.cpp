#include "bigset/thresholding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>

#include "bigset/errors.hpp"
#include "bigset/stats_rx.hpp"

namespace bigset {

std::uint64_t Histogram::total() const noexcept {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::vector<double> gamma_transform(std::span<const double> values, double gamma) {
    if (!(gamma >= 1.0)) throw std::invalid_argument("gamma must be >= 1");
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument("gamma_transform input " + std::to_string(v) + " is outside [0, 1]");
        }
        out[i] = gamma == 1.0 ? v : std::pow(v, gamma);
    }
    return out;
}

Histogram build_histogram(std::span<const double> values, std::size_t bins) {
    if (bins < 2) throw std::invalid_argument("histogram needs at least 2 bins");
    if (values.empty()) throw std::invalid_argument("histogram input is empty");
    Histogram h;
    h.edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = static_cast<double>(i) / static_cast<double>(bins);
    h.counts.assign(bins, 0);
    for (double v : values) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument("histogram value " + std::to_string(v) + " is outside [0, 1]");
        }
        // Bin b holds edges[b] <= v < edges[b + 1]; 1.0 goes to the last bin.
        const auto it = std::upper_bound(h.edges.begin(), h.edges.end(), v);
        const auto bin = std::min<std::size_t>(static_cast<std::size_t>(it - h.edges.begin()) - 1, bins - 1);
        ++h.counts[bin];
    }
    return h;
}

std::size_t unimodal_corner(const Histogram& hist) {
    const auto& c = hist.counts;
    if (c.empty()) throw std::invalid_argument("histogram is empty");
    const std::size_t peak = static_cast<std::size_t>(std::max_element(c.begin(), c.end()) - c.begin());
    if (std::count(c.begin(), c.end(), c[peak]) > 1) {
        throw ThresholdError("histogram has several bins with the maximal count " + std::to_string(c[peak]) +
                             " (ambiguous peak)");
    }
    std::size_t last = c.size() - 1;
    while (last > peak && c[last] == 0) --last;
    if (last == peak) throw ThresholdError("histogram peak has no descending flank");

    // Bin centers are equally spaced, so with x measured from the peak in
    // units of one bin width the perpendicular distance to the chord is
    // |dq * (yp - yb) + db * (yq - yp)| / (bins * chord length): an integer
    // numerator over a common denominator, which makes ties exact.
    const auto yp = static_cast<std::int64_t>(c[peak]);
    const auto yq = static_cast<std::int64_t>(c[last]);
    const auto dq = static_cast<std::int64_t>(last - peak);
    std::size_t best = peak + 1;
    std::int64_t best_num = -1;
    for (std::size_t b = peak + 1; b <= last; ++b) {
        const auto db = static_cast<std::int64_t>(b - peak);
        const std::int64_t num = std::llabs(dq * (yp - static_cast<std::int64_t>(c[b])) + db * (yq - yp));
        if (num > best_num) {
            best_num = num;
            best = b;
        }
    }
    return best;
}

TauEstimate estimate_tau_from_distances(std::span<const double> relative, double gamma, std::size_t bins) {
    TauEstimate est;
    est.gamma = gamma;
    const std::vector<double> adjusted = gamma_transform(relative, gamma);
    est.histogram = build_histogram(adjusted, bins);
    est.corner_bin = unimodal_corner(est.histogram);
    est.corner_value = est.histogram.edges[est.corner_bin + 1];
    const auto below = std::count_if(adjusted.begin(), adjusted.end(),
                                     [&](double v) { return v <= est.corner_value; });
    est.tau = static_cast<double>(below) / static_cast<double>(adjusted.size());
    return est;
}

TauEstimate estimate_tau(const HsiCube& cube, double gamma, std::size_t bins) {
    const DistanceMap d = relative_distance(rx_detect(cube));
    return estimate_tau_from_distances(d.values(), gamma, bins);
}

}  // namespace bigset
