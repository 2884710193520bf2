#pragma once

#include <cstdint>
#include <vector>

#include "bigset/cube.hpp"

namespace bigset {

struct SynthConfig {
    std::size_t height = 30;
    std::size_t width = 30;
    std::size_t bands = 20;
    /// One entry per background material: its mean brightness and the
    /// standard deviation of its brightness across pixels.
    std::vector<double> component_means{0.35, 0.55, 0.75};
    std::vector<double> component_scales{0.05, 0.05, 0.05};
    std::size_t anomalies = 9;
    double contrast = 5.0;
    double noise_std = 0.01;
    std::uint64_t seed = 1;
};

struct SynthScene {
    HsiCube cube;
    GroundTruth truth;
};

/// Throws std::invalid_argument for an invalid configuration.
void validate(const SynthConfig& cfg);

/// Generates a seeded synthetic scene.
///
/// The image is split into Voronoi regions, one background material each.
/// A material has a smooth spectral signature s(l); a background pixel is
/// (mean + scale * z) * s(l) with z ~ N(0, 1). Anomalies are isolated single
/// pixels and 2x2 blobs (about half of the pixels each) whose spectrum is
/// mean * s(l) + contrast * scale * s(l) * e(l), e(l) a random sign per band,
/// so they leave the material's one-dimensional brightness subspace.
/// Gaussian noise with `noise_std` is added to every sample.
SynthScene synth_scene(const SynthConfig& cfg);

}  // namespace bigset
