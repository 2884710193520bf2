#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "bigset/cube.hpp"

namespace bigset {

/// 5x5 Laplacian-of-Gaussian template, used unnormalized.
inline constexpr std::array<std::array<int, 5>, 5> kLogKernel{{
    {-2, -4, -4, -4, -2},
    {-4, 0, 8, 0, -4},
    {-4, 8, 24, 8, -4},
    {-4, 0, 8, 0, -4},
    {-2, -4, -4, -4, -2},
}};
inline constexpr int kLogRadius = 2;

/// Mirror index without repeating the edge sample: for n = 3,
/// -2 -1 0 1 2 3 4 maps to 2 1 0 1 2 1 0. Periodic with period 2(n - 1), so
/// any offset is defined even when n < 3.
std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) noexcept;

/// Pads one H x W band (row-major) by `pad` on every side.
std::vector<double> reflect_pad(std::span<const double> band, std::size_t height, std::size_t width,
                                std::size_t pad = kLogRadius);

/// Per-band reflect-padded 5x5 LoG filtering; output has the input's shape.
HsiCube log_conv(const HsiCube& cube);

/// Adjoint of log_conv: scatters every output value back through the kernel
/// onto the reflected source samples. <log_conv(U), V> == <U, log_conv_adjoint(V)>.
HsiCube log_conv_adjoint(const HsiCube& cube);

/// || LoG(recon) (.) M ||_F^2 with the mask applied to every band.
double suppression_value(const HsiCube& recon, const BinaryMask& mask);

/// d suppression_value / d recon = 2 * adjoint(LoG(recon) (.) M).
HsiCube suppression_grad(const HsiCube& recon, const BinaryMask& mask);

}  // namespace bigset
