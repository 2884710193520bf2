#include "bigset/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace bigset {

void validate(const SynthConfig& cfg) {
    if (cfg.height == 0 || cfg.width == 0 || cfg.bands == 0) {
        throw std::invalid_argument("synthetic scene dimensions must be positive");
    }
    if (cfg.component_means.empty() || cfg.component_means.size() != cfg.component_scales.size()) {
        throw std::invalid_argument("component means and scales must be non-empty and of equal length");
    }
    for (double s : cfg.component_scales) {
        if (!(s >= 0.0)) throw std::invalid_argument("component scales must be non-negative");
    }
    const double pixels = static_cast<double>(cfg.height * cfg.width);
    if (static_cast<double>(cfg.anomalies) >= 0.1 * pixels) {
        throw std::invalid_argument("anomaly count " + std::to_string(cfg.anomalies) +
                                    " must stay below 10% of the " +
                                    std::to_string(cfg.height * cfg.width) + " pixels");
    }
    if (!(cfg.noise_std >= 0.0)) throw std::invalid_argument("noise std must be non-negative");
    if (!(cfg.contrast >= 0.0)) throw std::invalid_argument("contrast must be non-negative");
}

namespace {

std::vector<double> material_signature(std::size_t bands, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> center(0.0, static_cast<double>(bands));
    std::uniform_real_distribution<double> width(bands / 6.0 + 0.5, bands / 3.0 + 1.0);
    std::uniform_real_distribution<double> amplitude(0.2, 0.7);
    std::vector<double> s(bands, 0.3);
    for (int bump = 0; bump < 3; ++bump) {
        const double c = center(rng), w = width(rng), a = amplitude(rng);
        for (std::size_t l = 0; l < bands; ++l) {
            const double t = (static_cast<double>(l) - c) / w;
            s[l] += a * std::exp(-0.5 * t * t);
        }
    }
    const double peak = *std::max_element(s.begin(), s.end());
    for (double& v : s) v /= peak;
    return s;
}

}  // namespace

SynthScene synth_scene(const SynthConfig& cfg) {
    validate(cfg);
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const std::size_t H = cfg.height, W = cfg.width, L = cfg.bands, N = H * W;
    const std::size_t K = cfg.component_means.size();

    std::vector<std::vector<double>> signatures;
    for (std::size_t k = 0; k < K; ++k) signatures.push_back(material_signature(L, rng));

    // Voronoi partition into materials.
    std::uniform_real_distribution<double> ur(0.0, static_cast<double>(H));
    std::uniform_real_distribution<double> uc(0.0, static_cast<double>(W));
    std::vector<std::pair<double, double>> seeds(K);
    for (auto& s : seeds) s = {ur(rng), uc(rng)};
    std::vector<std::size_t> material(N);
    for (std::size_t r = 0; r < H; ++r) {
        for (std::size_t c = 0; c < W; ++c) {
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < K; ++k) {
                const double dr = static_cast<double>(r) + 0.5 - seeds[k].first;
                const double dc = static_cast<double>(c) + 0.5 - seeds[k].second;
                const double d = dr * dr + dc * dc;
                if (d < best_d) best_d = d, best = k;
            }
            material[r * W + c] = best;
        }
    }

    HsiCube cube(H, W, L);
    for (std::size_t p = 0; p < N; ++p) {
        const std::size_t k = material[p];
        const double brightness = cfg.component_means[k] + cfg.component_scales[k] * gauss(rng);
        for (std::size_t l = 0; l < L; ++l) cube.data()[l * N + p] = brightness * signatures[k][l];
    }

    // Anomaly footprints: 2x2 blobs covering about half of the pixels, the
    // rest single pixels. Footprints never touch each other.
    GroundTruth truth(H, W, 0);
    const std::size_t blobs = (H >= 2 && W >= 2) ? (cfg.anomalies / 2) / 4 : 0;
    const std::size_t singles = cfg.anomalies - 4 * blobs;
    std::vector<std::uint8_t> blocked(N, 0);
    std::uniform_int_distribution<std::size_t> pick_r(0, H - 1), pick_c(0, W - 1);

    auto place = [&](std::size_t size) -> std::vector<std::size_t> {
        const std::size_t max_attempts = 10000 * (cfg.anomalies + 1);
        for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
            const std::size_t r0 = pick_r(rng), c0 = pick_c(rng);
            if (r0 + size > H || c0 + size > W) continue;
            bool free = true;
            for (std::size_t r = r0; r < r0 + size && free; ++r)
                for (std::size_t c = c0; c < c0 + size && free; ++c) free = !blocked[r * W + c];
            if (!free) continue;
            std::vector<std::size_t> footprint;
            for (std::size_t r = r0; r < r0 + size; ++r)
                for (std::size_t c = c0; c < c0 + size; ++c) footprint.push_back(r * W + c);
            const std::size_t rlo = r0 > 0 ? r0 - 1 : 0, clo = c0 > 0 ? c0 - 1 : 0;
            for (std::size_t r = rlo; r < std::min(H, r0 + size + 1); ++r)
                for (std::size_t c = clo; c < std::min(W, c0 + size + 1); ++c) blocked[r * W + c] = 1;
            return footprint;
        }
        throw std::invalid_argument("could not place isolated anomalies; reduce the anomaly count");
    };

    std::bernoulli_distribution coin(0.5);
    auto implant = [&](const std::vector<std::size_t>& footprint) {
        const std::size_t k = material[footprint.front()];
        std::vector<double> spectrum(L);
        for (std::size_t l = 0; l < L; ++l) {
            const double sign = coin(rng) ? 1.0 : -1.0;
            spectrum[l] = (cfg.component_means[k] + sign * cfg.contrast * cfg.component_scales[k]) *
                          signatures[k][l];
        }
        for (std::size_t p : footprint) {
            truth[p] = 1;
            for (std::size_t l = 0; l < L; ++l) cube.data()[l * N + p] = spectrum[l];
        }
    };

    for (std::size_t b = 0; b < blobs; ++b) implant(place(2));
    for (std::size_t s = 0; s < singles; ++s) implant(place(1));

    if (cfg.noise_std > 0.0) {
        for (double& v : cube.data()) v += cfg.noise_std * gauss(rng);
    }
    return {std::move(cube), std::move(truth)};
}

}  // namespace bigset
