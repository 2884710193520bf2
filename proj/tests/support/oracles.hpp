#pragma once

// Brute-force reference implementations used only by the tests. Each one is
// written independently of the library code path it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "bigset/cube.hpp"

namespace bigset::oracle {

/// Mirror reflection by repeated folding.
inline std::size_t fold_index(long i, std::size_t n) {
    if (n == 1) return 0;
    const long last = static_cast<long>(n) - 1;
    while (i < 0 || i > last) {
        if (i < 0) i = -i;
        if (i > last) i = 2 * last - i;
    }
    return static_cast<std::size_t>(i);
}

inline const int kTemplate[5][5] = {
    {-2, -4, -4, -4, -2}, {-4, 0, 8, 0, -4}, {-4, 8, 24, 8, -4}, {-4, 0, 8, 0, -4}, {-2, -4, -4, -4, -2}};

/// True 2D convolution (kernel flipped) over a folded-index image.
inline HsiCube naive_log_conv(const HsiCube& x) {
    HsiCube out(x.height(), x.width(), x.bands());
    for (std::size_t b = 0; b < x.bands(); ++b)
        for (std::size_t i = 0; i < x.height(); ++i)
            for (std::size_t j = 0; j < x.width(); ++j) {
                double acc = 0.0;
                for (int u = -2; u <= 2; ++u)
                    for (int v = -2; v <= 2; ++v) {
                        const std::size_t si = fold_index(static_cast<long>(i) - u, x.height());
                        const std::size_t sj = fold_index(static_cast<long>(j) - v, x.width());
                        acc += kTemplate[u + 2][v + 2] * x.at(si, sj, b);
                    }
                out.at(i, j, b) = acc;
            }
    return out;
}

inline double inner(const HsiCube& a, const HsiCube& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i] * b.data()[i];
    return s;
}

/// Naive per-pixel forward of x_hat = W2 relu(W1 x + b1) + b2 with plain
/// nested vectors: w1[h][l], w2[l][h].
struct NaiveAe {
    std::vector<std::vector<double>> w1, w2;
    std::vector<double> b1, b2;

    HsiCube forward(const HsiCube& x) const {
        HsiCube out(x.height(), x.width(), x.bands());
        const std::size_t L = x.bands(), Hd = b1.size();
        for (std::size_t r = 0; r < x.height(); ++r)
            for (std::size_t c = 0; c < x.width(); ++c) {
                std::vector<double> hidden(Hd);
                for (std::size_t h = 0; h < Hd; ++h) {
                    double z = b1[h];
                    for (std::size_t l = 0; l < L; ++l) z += w1[h][l] * x.at(r, c, l);
                    hidden[h] = z > 0.0 ? z : 0.0;
                }
                for (std::size_t l = 0; l < L; ++l) {
                    double y = b2[l];
                    for (std::size_t h = 0; h < Hd; ++h) y += w2[l][h] * hidden[h];
                    out.at(r, c, l) = y;
                }
            }
        return out;
    }
};

/// Literal mask update: full ascending sort, 1-based index ceil(tau * N).
inline std::vector<std::uint8_t> brute_mask(const std::vector<double>& errors, double tau) {
    std::vector<double> sorted = errors;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = errors.size();
    // Integer-exact ceil for tau given as a ratio is done by the caller when
    // needed; here tau * n is rounded to 12 significant digits first.
    const double scaled = std::round(tau * static_cast<double>(n) * 1e9) / 1e9;
    std::size_t k = static_cast<std::size_t>(std::ceil(scaled));
    k = std::max<std::size_t>(1, std::min(k, n));
    const double t = sorted[k - 1];
    std::vector<std::uint8_t> mask(n);
    for (std::size_t i = 0; i < n; ++i) mask[i] = errors[i] > t ? 1 : 0;
    return mask;
}

/// Exhaustive perpendicular-distance corner search using floating-point
/// geometry on (bin center, count) points; ties within `tol` relative go to
/// the smaller index.
inline std::size_t brute_corner(const std::vector<std::uint64_t>& counts) {
    const std::size_t n = counts.size();
    auto center = [&](std::size_t b) { return (static_cast<double>(b) + 0.5) / static_cast<double>(n); };
    std::size_t peak = 0;
    for (std::size_t b = 1; b < n; ++b)
        if (counts[b] > counts[peak]) peak = b;
    std::size_t last = n - 1;
    while (counts[last] == 0) --last;
    const double x1 = center(peak), y1 = static_cast<double>(counts[peak]);
    const double x2 = center(last), y2 = static_cast<double>(counts[last]);
    const double len = std::hypot(x2 - x1, y2 - y1);
    std::vector<double> dist(n, -1.0);
    double best = -1.0;
    for (std::size_t b = peak + 1; b <= last; ++b) {
        const double x0 = center(b), y0 = static_cast<double>(counts[b]);
        dist[b] = std::abs((y2 - y1) * x0 - (x2 - x1) * y0 + x2 * y1 - y2 * x1) / len;
        best = std::max(best, dist[b]);
    }
    for (std::size_t b = peak + 1; b <= last; ++b)
        if (dist[b] >= best - 1e-9 * std::max(1.0, best)) return b;
    return last;
}

/// Normalized Mann-Whitney statistic: fraction of (anomaly, background) pairs
/// ordered correctly, ties counted as 1/2. Returned as numerator / (2 P N)
/// with the numerator accumulated in integers.
inline double mann_whitney_auc(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels) {
    std::uint64_t twice = 0, pos = 0, neg = 0;
    for (auto l : labels) (l ? pos : neg)++;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!labels[i]) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j]) continue;
            if (scores[i] > scores[j]) twice += 2;
            else if (scores[i] == scores[j]) twice += 1;
        }
    }
    return static_cast<double>(twice) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

/// Central difference of f at x along coordinate `value`.
inline double central_difference(const std::function<double()>& f, double& value, double step) {
    const double saved = value;
    value = saved + step;
    const double up = f();
    value = saved - step;
    const double down = f();
    value = saved;
    return (up - down) / (2.0 * step);
}

/// |a - b| <= rel * max(|a|, |b|), or both below `floor` in magnitude.
inline bool close_relative(double a, double b, double rel, double floor = 1e-10) {
    const double scale = std::max(std::abs(a), std::abs(b));
    if (scale < floor) return true;
    return std::abs(a - b) <= rel * scale;
}

inline HsiCube random_cube(std::size_t h, std::size_t w, std::size_t l, std::mt19937_64& rng, double lo = 0.0,
                           double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    HsiCube c(h, w, l);
    for (double& v : c.data()) v = u(rng);
    return c;
}

inline BinaryMask random_mask(std::size_t h, std::size_t w, double density, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(density);
    BinaryMask m(h, w, 0);
    for (auto& v : m.values()) v = coin(rng) ? 1 : 0;
    return m;
}

}  // namespace bigset::oracle
