#include "bigset/log_regularizer.hpp"

#include <string>

#include "bigset/errors.hpp"

namespace bigset {

namespace {

void check_mask(const HsiCube& recon, const BinaryMask& mask) {
    if (recon.height() != mask.height() || recon.width() != mask.width()) {
        throw DataError("mask is " + std::to_string(mask.height()) + "x" + std::to_string(mask.width()) +
                        " but the cube is " + std::to_string(recon.height()) + "x" +
                        std::to_string(recon.width()));
    }
}

// Reflected row/col index tables for offsets -2..n+1.
std::vector<std::size_t> reflect_table(std::size_t n) {
    std::vector<std::size_t> t(n + 2 * kLogRadius);
    for (std::size_t k = 0; k < t.size(); ++k) {
        t[k] = reflect_index(static_cast<std::ptrdiff_t>(k) - kLogRadius, n);
    }
    return t;
}

// LoG response of the masked pixels only (zero elsewhere).
HsiCube masked_response(const HsiCube& recon, const BinaryMask& mask) {
    HsiCube response = log_conv(recon);
    const std::size_t n = recon.pixels();
    for (std::size_t b = 0; b < recon.bands(); ++b) {
        auto band = response.band(b);
        for (std::size_t p = 0; p < n; ++p) {
            if (!mask[p]) band[p] = 0.0;
        }
    }
    return response;
}

}  // namespace

std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) noexcept {
    if (n <= 1) return 0;
    const auto period = static_cast<std::ptrdiff_t>(2 * (n - 1));
    std::ptrdiff_t k = i % period;
    if (k < 0) k += period;
    return static_cast<std::size_t>(k < static_cast<std::ptrdiff_t>(n) ? k : period - k);
}

std::vector<double> reflect_pad(std::span<const double> band, std::size_t height, std::size_t width,
                                std::size_t pad) {
    const std::size_t ph = height + 2 * pad, pw = width + 2 * pad;
    std::vector<double> out(ph * pw);
    const auto off = static_cast<std::ptrdiff_t>(pad);
    for (std::size_t r = 0; r < ph; ++r) {
        const std::size_t sr = reflect_index(static_cast<std::ptrdiff_t>(r) - off, height);
        for (std::size_t c = 0; c < pw; ++c) {
            out[r * pw + c] = band[sr * width + reflect_index(static_cast<std::ptrdiff_t>(c) - off, width)];
        }
    }
    return out;
}

HsiCube log_conv(const HsiCube& cube) {
    const std::size_t H = cube.height(), W = cube.width();
    const std::size_t pw = W + 2 * kLogRadius;
    HsiCube out(H, W, cube.bands());
    for (std::size_t b = 0; b < cube.bands(); ++b) {
        const std::vector<double> padded = reflect_pad(cube.band(b), H, W);
        auto dst = out.band(b);
        for (std::size_t r = 0; r < H; ++r) {
            for (std::size_t c = 0; c < W; ++c) {
                double acc = 0.0;
                for (std::size_t u = 0; u < 5; ++u) {
                    const double* row = padded.data() + (r + u) * pw + c;
                    for (std::size_t v = 0; v < 5; ++v) acc += kLogKernel[u][v] * row[v];
                }
                dst[r * W + c] = acc;
            }
        }
    }
    return out;
}

HsiCube log_conv_adjoint(const HsiCube& cube) {
    const std::size_t H = cube.height(), W = cube.width();
    const auto rows = reflect_table(H);
    const auto cols = reflect_table(W);
    HsiCube out(H, W, cube.bands());
    for (std::size_t b = 0; b < cube.bands(); ++b) {
        const auto src = cube.band(b);
        auto dst = out.band(b);
        for (std::size_t r = 0; r < H; ++r) {
            for (std::size_t c = 0; c < W; ++c) {
                const double g = src[r * W + c];
                if (g == 0.0) continue;
                for (std::size_t u = 0; u < 5; ++u) {
                    const std::size_t sr = rows[r + u];
                    for (std::size_t v = 0; v < 5; ++v) dst[sr * W + cols[c + v]] += kLogKernel[u][v] * g;
                }
            }
        }
    }
    return out;
}

double suppression_value(const HsiCube& recon, const BinaryMask& mask) {
    check_mask(recon, mask);
    if (count_ones(mask) == 0) return 0.0;
    const HsiCube response = masked_response(recon, mask);
    double sum = 0.0;
    for (double v : response.data()) sum += v * v;
    return sum;
}

HsiCube suppression_grad(const HsiCube& recon, const BinaryMask& mask) {
    check_mask(recon, mask);
    if (count_ones(mask) == 0) return HsiCube(recon.height(), recon.width(), recon.bands());
    HsiCube grad = log_conv_adjoint(masked_response(recon, mask));
    for (double& v : grad.data()) v *= 2.0;
    return grad;
}

}  // namespace bigset
