#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bigset {

/// Dense H x W x L hyperspectral image stored band-sequentially:
/// element (row, col, band) lives at band * H * W + row * W + col.
///
/// Viewed as a column-major (H*W) x L matrix, each row is one pixel's
/// spectrum, which is how the autoencoder consumes it.
class HsiCube {
public:
    HsiCube() = default;
    HsiCube(std::size_t height, std::size_t width, std::size_t bands);
    /// Throws DataError when the length does not match or a value is not finite.
    HsiCube(std::size_t height, std::size_t width, std::size_t bands, std::vector<double> data);

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t bands() const noexcept { return bands_; }
    std::size_t pixels() const noexcept { return height_ * width_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& at(std::size_t row, std::size_t col, std::size_t band) noexcept {
        return data_[band * pixels() + row * width_ + col];
    }
    double at(std::size_t row, std::size_t col, std::size_t band) const noexcept {
        return data_[band * pixels() + row * width_ + col];
    }

    std::span<double> band(std::size_t b) noexcept {
        return {data_.data() + b * pixels(), pixels()};
    }
    std::span<const double> band(std::size_t b) const noexcept {
        return {data_.data() + b * pixels(), pixels()};
    }

    /// Spectrum of the pixel at flat index row * W + col.
    std::vector<double> spectrum(std::size_t pixel) const;

    std::vector<double>& data() noexcept { return data_; }
    const std::vector<double>& data() const noexcept { return data_; }

    bool same_shape(const HsiCube& other) const noexcept {
        return height_ == other.height_ && width_ == other.width_ && bands_ == other.bands_;
    }

    friend bool operator==(const HsiCube&, const HsiCube&) = default;

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::size_t bands_ = 0;
    std::vector<double> data_;
};

/// Row-major H x W grid. The tag keeps semantically different grids
/// (scores, masks, labels) from being mixed up.
template <typename T, typename Tag>
class Grid {
public:
    using value_type = T;

    Grid() = default;
    Grid(std::size_t height, std::size_t width, T fill = T{})
        : height_(height), width_(width), values_(height * width, fill) {}
    Grid(std::size_t height, std::size_t width, std::vector<T> values);

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    T& operator[](std::size_t i) noexcept { return values_[i]; }
    const T& operator[](std::size_t i) const noexcept { return values_[i]; }
    T& at(std::size_t row, std::size_t col) noexcept { return values_[row * width_ + col]; }
    const T& at(std::size_t row, std::size_t col) const noexcept {
        return values_[row * width_ + col];
    }

    std::vector<T>& values() noexcept { return values_; }
    const std::vector<T>& values() const noexcept { return values_; }

    template <typename U, typename OtherTag>
    bool same_shape(const Grid<U, OtherTag>& other) const noexcept {
        return height_ == other.height() && width_ == other.width();
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::vector<T> values_;
};

struct ScoreTag {};
struct MaskTag {};
struct LabelTag {};

/// Non-negative per-pixel scores: reconstruction errors, detection scores,
/// Mahalanobis distances.
using ErrorMap = Grid<double, ScoreTag>;
using DistanceMap = Grid<double, ScoreTag>;

/// 1 = potential anomaly, 0 = background.
using BinaryMask = Grid<std::uint8_t, MaskTag>;

/// Evaluation labels, 1 = anomaly.
using GroundTruth = Grid<std::uint8_t, LabelTag>;

std::size_t count_ones(const BinaryMask& mask) noexcept;
std::size_t count_ones(const GroundTruth& gt) noexcept;

/// Scales the whole cube to [0, 1] by its global min and max. A constant cube
/// maps to all zeros.
HsiCube normalize_min_max(const HsiCube& cube);

}  // namespace bigset
