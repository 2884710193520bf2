#include "bigset/cube.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bigset/errors.hpp"

namespace bigset {

HsiCube::HsiCube(std::size_t height, std::size_t width, std::size_t bands)
    : height_(height), width_(width), bands_(bands), data_(height * width * bands, 0.0) {}

HsiCube::HsiCube(std::size_t height, std::size_t width, std::size_t bands, std::vector<double> data)
    : height_(height), width_(width), bands_(bands), data_(std::move(data)) {
    if (data_.size() != height_ * width_ * bands_) {
        throw DataError("cube data length " + std::to_string(data_.size()) +
                        " does not match " + std::to_string(height_) + "x" +
                        std::to_string(width_) + "x" + std::to_string(bands_));
    }
    for (double v : data_) {
        if (!std::isfinite(v)) throw DataError("cube contains a non-finite value");
    }
}

std::vector<double> HsiCube::spectrum(std::size_t pixel) const {
    std::vector<double> out(bands_);
    for (std::size_t b = 0; b < bands_; ++b) out[b] = data_[b * pixels() + pixel];
    return out;
}

template <typename T, typename Tag>
Grid<T, Tag>::Grid(std::size_t height, std::size_t width, std::vector<T> values)
    : height_(height), width_(width), values_(std::move(values)) {
    if (values_.size() != height_ * width_) {
        throw DataError("grid length " + std::to_string(values_.size()) + " does not match " +
                        std::to_string(height_) + "x" + std::to_string(width_));
    }
}

template class Grid<double, ScoreTag>;
template class Grid<std::uint8_t, MaskTag>;
template class Grid<std::uint8_t, LabelTag>;

std::size_t count_ones(const BinaryMask& mask) noexcept {
    return static_cast<std::size_t>(
        std::count_if(mask.values().begin(), mask.values().end(), [](auto v) { return v != 0; }));
}

std::size_t count_ones(const GroundTruth& gt) noexcept {
    return static_cast<std::size_t>(
        std::count_if(gt.values().begin(), gt.values().end(), [](auto v) { return v != 0; }));
}

HsiCube normalize_min_max(const HsiCube& cube) {
    HsiCube out = cube;
    if (cube.empty()) return out;
    const auto [lo, hi] = std::minmax_element(cube.data().begin(), cube.data().end());
    const double min = *lo;
    const double range = *hi - *lo;
    for (double& v : out.data()) v = range > 0.0 ? (v - min) / range : 0.0;
    return out;
}

}  // namespace bigset
