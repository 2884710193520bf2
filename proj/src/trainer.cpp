#include "bigset/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bigset/evaluation.hpp"
#include "bigset/log_regularizer.hpp"

namespace bigset {

namespace {

void check_shapes(const HsiCube& a, const HsiCube& b) {
    if (!a.same_shape(b)) {
        throw DataError("cube shapes differ: " + std::to_string(a.height()) + "x" + std::to_string(a.width()) + "x" +
                        std::to_string(a.bands()) + " vs " + std::to_string(b.height()) + "x" +
                        std::to_string(b.width()) + "x" + std::to_string(b.bands()));
    }
}

void check_mask(const HsiCube& cube, const BinaryMask& mask) {
    if (cube.height() != mask.height() || cube.width() != mask.width()) {
        throw DataError("mask shape does not match the cube");
    }
}

std::size_t background_count(const BinaryMask& mask) { return mask.size() - count_ones(mask); }

}  // namespace

void validate(const TrainConfig& cfg) {
    if (!(cfg.lambda >= 0.0) || !std::isfinite(cfg.lambda)) throw std::invalid_argument("lambda must be >= 0");
    if (!(cfg.gamma >= 1.0)) throw std::invalid_argument("gamma must be >= 1");
    if (cfg.iterations < 1) throw std::invalid_argument("iterations must be >= 1");
    if (cfg.epochs_per_iter < 1) throw std::invalid_argument("epochs per iteration must be >= 1");
    if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be > 0");
    if (!(cfg.eps > 0.0)) throw std::invalid_argument("eps must be > 0");
    if (cfg.hidden < 1) throw std::invalid_argument("hidden units must be >= 1");
    if (cfg.bins < 2) throw std::invalid_argument("histogram bins must be >= 2");
    if (cfg.auc_interval < 1) throw std::invalid_argument("AUC interval must be >= 1");
    if (cfg.tau_override && !(*cfg.tau_override > 0.0 && *cfg.tau_override <= 1.0)) {
        throw std::invalid_argument("tau override must lie in (0, 1]");
    }
}

ErrorMap error_map(const HsiCube& recon, const HsiCube& original) {
    check_shapes(recon, original);
    ErrorMap out(recon.height(), recon.width(), 0.0);
    const std::size_t n = recon.pixels();
    for (std::size_t b = 0; b < recon.bands(); ++b) {
        const auto r = recon.band(b);
        const auto x = original.band(b);
        for (std::size_t p = 0; p < n; ++p) {
            const double d = r[p] - x[p];
            out[p] += d * d;
        }
    }
    return out;
}

double loss_br(const HsiCube& recon, const HsiCube& original, const BinaryMask& mask) {
    check_shapes(recon, original);
    check_mask(recon, mask);
    const std::size_t background = background_count(mask);
    if (background == 0) throw DataError("every pixel is masked; the background loss is undefined");
    double sum = 0.0;
    const std::size_t n = recon.pixels();
    for (std::size_t b = 0; b < recon.bands(); ++b) {
        const auto r = recon.band(b);
        const auto x = original.band(b);
        for (std::size_t p = 0; p < n; ++p) {
            if (mask[p]) continue;
            const double d = r[p] - x[p];
            sum += d * d;
        }
    }
    return sum / static_cast<double>(background);
}

double loss_as(const HsiCube& recon, const BinaryMask& mask, double eps) {
    return suppression_value(recon, mask) / (static_cast<double>(count_ones(mask)) + eps);
}

LossParts total_loss(const HsiCube& recon, const HsiCube& original, const BinaryMask& mask, double lambda,
                     double eps) {
    LossParts parts;
    parts.background = loss_br(recon, original, mask);
    parts.suppression = loss_as(recon, mask, eps);
    parts.total = parts.background + lambda * parts.suppression;
    return parts;
}

HsiCube total_loss_grad(const HsiCube& recon, const HsiCube& original, const BinaryMask& mask, double lambda,
                        double eps) {
    check_shapes(recon, original);
    check_mask(recon, mask);
    const std::size_t background = background_count(mask);
    if (background == 0) throw DataError("every pixel is masked; the background loss is undefined");

    HsiCube grad(recon.height(), recon.width(), recon.bands());
    const double br_scale = 2.0 / static_cast<double>(background);
    const std::size_t n = recon.pixels();
    for (std::size_t b = 0; b < recon.bands(); ++b) {
        const auto r = recon.band(b);
        const auto x = original.band(b);
        auto g = grad.band(b);
        for (std::size_t p = 0; p < n; ++p) g[p] = mask[p] ? 0.0 : br_scale * (r[p] - x[p]);
    }
    if (lambda != 0.0 && count_ones(mask) > 0) {
        const HsiCube as_grad = suppression_grad(recon, mask);
        const double as_scale = lambda / (static_cast<double>(count_ones(mask)) + eps);
        for (std::size_t i = 0; i < grad.size(); ++i) grad.data()[i] += as_scale * as_grad.data()[i];
    }
    return grad;
}

BinaryMask update_mask(const ErrorMap& errors, double tau) {
    if (errors.empty()) throw std::invalid_argument("error map is empty");
    if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in (0, 1]");
    const std::size_t n = errors.size();
    // ceil(tau * N), shielded from products such as 0.9 * 10 = 9.000000000000002.
    const double scaled = tau * static_cast<double>(n);
    auto rank = static_cast<std::size_t>(std::ceil(scaled - 1e-9 * std::max(1.0, scaled)));
    rank = std::clamp<std::size_t>(rank, 1, n);

    std::vector<double> sorted = errors.values();
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1), sorted.end());
    const double threshold = sorted[rank - 1];

    BinaryMask mask(errors.height(), errors.width(), 0);
    for (std::size_t i = 0; i < n; ++i) mask[i] = errors[i] > threshold ? 1 : 0;
    return mask;
}

HsiCube mask_input(const HsiCube& cube, const BinaryMask& mask) {
    check_mask(cube, mask);
    HsiCube out = cube;
    const std::size_t n = cube.pixels();
    for (std::size_t b = 0; b < cube.bands(); ++b) {
        auto band = out.band(b);
        for (std::size_t p = 0; p < n; ++p) {
            if (mask[p]) band[p] = 0.0;
        }
    }
    return out;
}

StepResult separation_step(Reconstructor& model, const HsiCube& input, const HsiCube& original,
                           const BinaryMask& mask, double lambda, double eps) {
    StepResult r;
    r.recon = model.forward(input);
    r.loss = total_loss(r.recon, original, mask, lambda, eps);
    if (std::isfinite(r.loss.total)) {
        model.accumulate_grad(total_loss_grad(r.recon, original, mask, lambda, eps));
        model.apply_update();
    }
    return r;
}

TrainResult train(Reconstructor& model, const HsiCube& cube, const TrainConfig& cfg, const TrainOptions& options) {
    validate(cfg);
    if (cube.empty()) throw std::invalid_argument("training cube is empty");
    if (options.truth && (options.truth->height() != cube.height() || options.truth->width() != cube.width())) {
        throw DataError("ground truth shape does not match the cube");
    }
    const HsiCube X = cfg.normalize ? normalize_min_max(cube) : cube;

    TrainResult result;
    if (cfg.tau_override) {
        result.tau = *cfg.tau_override;
    } else {
        result.tau_estimate = estimate_tau(X, cfg.gamma, cfg.bins);
        result.tau = result.tau_estimate->tau;
    }

    BinaryMask mask(X.height(), X.width(), 0);
    result.losses.reserve(cfg.iterations * cfg.epochs_per_iter);
    std::size_t epoch = 0;
    for (std::size_t m = 0; m < cfg.iterations; ++m) {
        const HsiCube input = mask_input(X, mask);
        for (std::size_t n = 0; n < cfg.epochs_per_iter; ++n) {
            ++epoch;
            StepResult step = separation_step(model, input, X, mask, cfg.lambda, cfg.eps);
            result.losses.push_back({epoch, step.loss});
            if (!std::isfinite(step.loss.total)) {
                throw TrainingError("loss became non-finite at epoch " + std::to_string(epoch), result.losses);
            }
            if (options.truth && epoch % cfg.auc_interval == 0) {
                result.aucs.push_back({epoch, auc(error_map(step.recon, X), *options.truth)});
            }
        }
        result.detection = error_map(model.forward(input), X);
        mask = update_mask(result.detection, result.tau);
        result.masks.push_back(mask);
    }
    return result;
}

TrainResult train(const HsiCube& cube, const TrainConfig& cfg, const TrainOptions& options) {
    validate(cfg);
    VanillaAutoencoder model(cube.bands(), cfg.hidden, cfg.seed, AdamSettings{cfg.learning_rate});
    TrainResult result = train(model, cube, cfg, options);
    result.params = model.params();
    return result;
}

TrainResult train_plain(const HsiCube& cube, const TrainConfig& cfg, const TrainOptions& options) {
    TrainConfig plain = cfg;
    plain.lambda = 0.0;
    plain.iterations = 1;
    plain.tau_override = 1.0;
    return train(cube, plain, options);
}

}  // namespace bigset
