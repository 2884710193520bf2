#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "bigset/errors.hpp"
#include "bigset/log_regularizer.hpp"
#include "bigset/synth.hpp"
#include "bigset/trainer.hpp"
#include "support/oracles.hpp"

using namespace bigset;

namespace {

SynthConfig small_scene() {
    SynthConfig cfg;
    cfg.height = 16;
    cfg.width = 16;
    cfg.bands = 10;
    cfg.anomalies = 4;
    return cfg;
}

/// Emits its input until `healthy` calls have happened, then NaN.
class FailingModel final : public Reconstructor {
public:
    explicit FailingModel(int healthy) : healthy_(healthy) {}
    HsiCube forward(const HsiCube& input) override {
        HsiCube out = input;
        if (calls_++ >= healthy_)
            for (double& v : out.data()) v = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    void accumulate_grad(const HsiCube&) override {}
    void apply_update() override {}

private:
    int healthy_;
    int calls_ = 0;
};

}  // namespace

TEST_CASE("error_map") {
    const HsiCube a(1, 2, 2, {3, 0, 4, 1});
    const HsiCube b(1, 2, 2, {0, 0, 0, 1});
    const ErrorMap e = error_map(a, b);
    CHECK(e[0] == 25.0);
    CHECK(e[1] == 0.0);

    std::mt19937_64 rng(1);
    const HsiCube x = oracle::random_cube(5, 4, 7, rng), y = oracle::random_cube(5, 4, 7, rng);
    const ErrorMap f = error_map(x, y);
    for (std::size_t p = 0; p < 20; ++p) {
        double s = 0.0;
        for (std::size_t l = 0; l < 7; ++l) s += (x.spectrum(p)[l] - y.spectrum(p)[l]) * (x.spectrum(p)[l] - y.spectrum(p)[l]);
        CHECK(f[p] == doctest::Approx(s).epsilon(1e-14));
    }
    CHECK_THROWS_AS(error_map(x, oracle::random_cube(5, 4, 6, rng)), DataError);
}

TEST_CASE("loss_br averages over unmasked pixels only") {
    const HsiCube recon(1, 2, 1, {3, 5});
    const HsiCube orig(1, 2, 1, {1, 0});
    CHECK(loss_br(recon, orig, BinaryMask(1, 2, std::vector<std::uint8_t>{0, 1})) == 4.0);
    CHECK(loss_br(recon, orig, BinaryMask(1, 2, 0)) == (4.0 + 25.0) / 2.0);
    CHECK_THROWS_AS(loss_br(recon, orig, BinaryMask(1, 2, 1)), DataError);
}

TEST_CASE("loss_as") {
    HsiCube impulse(5, 5, 1);
    impulse.at(2, 2, 0) = 1.0;
    BinaryMask center(5, 5, 0);
    center.at(2, 2) = 1;
    CHECK(loss_as(impulse, center) == doctest::Approx(576.0 / (1.0 + 1e-8)).epsilon(1e-15));
    CHECK(loss_as(impulse, BinaryMask(5, 5, 0)) == 0.0);

    std::mt19937_64 rng(2);
    HsiCube x = oracle::random_cube(6, 7, 3, rng, -1, 1);
    const BinaryMask m = oracle::random_mask(6, 7, 0.3, rng);
    const double base = loss_as(x, m);
    for (double& v : x.data()) v *= 3.0;
    CHECK(loss_as(x, m) == doctest::Approx(9.0 * base).epsilon(1e-12));
}

TEST_CASE("total_loss decomposes") {
    std::mt19937_64 rng(3);
    const HsiCube r = oracle::random_cube(6, 6, 4, rng), x = oracle::random_cube(6, 6, 4, rng);
    const BinaryMask m = oracle::random_mask(6, 6, 0.25, rng);
    const LossParts zero_lambda = total_loss(r, x, m, 0.0);
    CHECK(zero_lambda.total == zero_lambda.background);
    const LossParts parts = total_loss(r, x, m, 0.5);
    CHECK(parts.background == loss_br(r, x, m));
    CHECK(parts.suppression == loss_as(r, m));
    CHECK(parts.total == doctest::Approx(parts.background + 0.5 * parts.suppression).epsilon(1e-15));
    const LossParts empty = total_loss(r, x, BinaryMask(6, 6, 0), 7.0);
    CHECK(empty.suppression == 0.0);
    CHECK(empty.total == empty.background);
}

TEST_CASE("update_mask") {
    std::vector<double> ramp(10);
    std::iota(ramp.begin(), ramp.end(), 1.0);
    const BinaryMask top = update_mask(ErrorMap(2, 5, ramp), 0.9);
    CHECK(count_ones(top) == 1);
    CHECK(top[9] == 1);
    CHECK(count_ones(update_mask(ErrorMap(2, 5, ramp), 1.0)) == 0);

    const BinaryMask ties = update_mask(ErrorMap(1, 5, std::vector<double>{1, 2, 1, 2, 1}), 0.6);
    CHECK(ties.values() == std::vector<std::uint8_t>{0, 1, 0, 1, 0});
    CHECK(count_ones(update_mask(ErrorMap(1, 4, 3.0), 0.5)) == 0);

    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> level(0, 6);
    std::uniform_real_distribution<double> tau_d(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> e(9 * 11);
        for (double& v : e) v = level(rng) * 0.5;
        const double tau = tau_d(rng);
        CHECK(update_mask(ErrorMap(9, 11, e), tau).values() == oracle::brute_mask(e, tau));
    }
    CHECK_THROWS_AS(update_mask(ErrorMap(1, 2, 1.0), 1.5), std::invalid_argument);
}

TEST_CASE("mask_input zeroes masked spectra only") {
    std::mt19937_64 rng(5);
    const HsiCube x = oracle::random_cube(3, 4, 5, rng, 0.5, 1.0);
    const BinaryMask m = oracle::random_mask(3, 4, 0.5, rng);
    const HsiCube y = mask_input(x, m);
    for (std::size_t p = 0; p < 12; ++p)
        for (std::size_t l = 0; l < 5; ++l) CHECK(y.spectrum(p)[l] == (m[p] ? 0.0 : x.spectrum(p)[l]));
    CHECK(mask_input(x, BinaryMask(3, 4, 0)) == x);
}

TEST_CASE("total_loss_grad matches finite differences on the reconstruction") {
    std::mt19937_64 rng(6);
    HsiCube r = oracle::random_cube(5, 6, 3, rng, -1, 1);
    const HsiCube x = oracle::random_cube(5, 6, 3, rng, -1, 1);
    const BinaryMask m = oracle::random_mask(5, 6, 0.3, rng);
    const double lambda = 0.05;
    const HsiCube g = total_loss_grad(r, x, m, lambda);
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double fd = oracle::central_difference([&] { return total_loss(r, x, m, lambda).total; }, r.data()[i], 1e-5);
        CHECK(oracle::close_relative(g.data()[i], fd, 1e-6, 1e-7));
    }
}

TEST_CASE("separation loss gradient with respect to the parameters") {
    std::mt19937_64 rng(7);
    const HsiCube x = oracle::random_cube(4, 4, 6, rng);
    const BinaryMask m = oracle::random_mask(4, 4, 0.3, rng);
    const HsiCube input = mask_input(x, m);
    const double lambda = 0.01;
    AeParams p = init_params(6, 3, 9);
    p.b1.setConstant(0.1);

    auto loss = [&] { return total_loss(ae_forward(p, input).output, x, m, lambda).total; };
    const ForwardResult f = ae_forward(p, input);
    const AeGrads g = ae_backward(p, f.cache, total_loss_grad(f.output, x, m, lambda));
    auto check = [&](Eigen::Ref<Eigen::MatrixXd> param, const Eigen::MatrixXd& grad) {
        for (Eigen::Index i = 0; i < param.size(); ++i) {
            const double fd = oracle::central_difference(loss, param.data()[i], 1e-5);
            CHECK(oracle::close_relative(grad.data()[i], fd, 1e-4, 1e-8));
        }
    };
    check(p.w1, g.w1);
    check(p.b1, g.b1);
    check(p.w2, g.w2);
    check(p.b2, g.b2);
}

TEST_CASE("a single iteration with tau = 1 reduces to plain training") {
    const SynthScene scene = synth_scene(small_scene());
    TrainConfig cfg;
    cfg.iterations = 1;
    cfg.epochs_per_iter = 40;
    cfg.hidden = 16;
    cfg.tau_override = 1.0;
    const TrainResult collapsed = train(scene.cube, cfg);
    const TrainResult plain = train_plain(scene.cube, cfg);
    CHECK(collapsed.detection == plain.detection);
    CHECK(collapsed.params == plain.params);
    REQUIRE(collapsed.losses.size() == plain.losses.size());
    for (std::size_t i = 0; i < plain.losses.size(); ++i) CHECK(collapsed.losses[i].loss.total == plain.losses[i].loss.total);
    CHECK(count_ones(collapsed.masks.back()) == 0);
}

TEST_CASE("training is deterministic for a seed") {
    const SynthScene scene = synth_scene(small_scene());
    TrainConfig cfg;
    cfg.iterations = 2;
    cfg.epochs_per_iter = 20;
    cfg.hidden = 12;
    cfg.seed = 5;
    const TrainResult a = train(scene.cube, cfg, {&scene.truth});
    const TrainResult b = train(scene.cube, cfg, {&scene.truth});
    CHECK(a.detection == b.detection);
    CHECK(a.params == b.params);
    CHECK(a.masks == b.masks);
    CHECK(a.tau == b.tau);
    CHECK(a.aucs.size() == 4);
    cfg.seed = 6;
    CHECK_FALSE(train(scene.cube, cfg).params == a.params);
}

TEST_CASE("each mask update flags N - ceil(tau N) pixels") {
    const SynthScene scene = synth_scene(small_scene());
    TrainConfig cfg;
    cfg.iterations = 3;
    cfg.epochs_per_iter = 10;
    cfg.hidden = 8;
    cfg.tau_override = 0.9;
    const TrainResult r = train(scene.cube, cfg);
    REQUIRE(r.masks.size() == 3);
    CHECK_FALSE(r.tau_estimate.has_value());
    for (const BinaryMask& m : r.masks) CHECK(count_ones(m) == 256 - 231);
    CHECK(r.losses.size() == 30);
    CHECK(r.losses.back().epoch == 30);
}

TEST_CASE("plain reconstruction loss decreases over 50-epoch windows") {
    const SynthScene scene = synth_scene(small_scene());
    TrainConfig cfg;
    cfg.epochs_per_iter = 400;
    cfg.hidden = 20;
    const TrainResult r = train_plain(scene.cube, cfg);
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t w = 0; w < 8; ++w) {
        double mean = 0.0;
        for (std::size_t i = 0; i < 50; ++i) mean += r.losses[w * 50 + i].loss.total / 50.0;
        CHECK(mean <= previous);
        previous = mean;
    }
}

TEST_CASE("a non-finite loss raises TrainingError with the trace so far") {
    const SynthScene scene = synth_scene(small_scene());
    TrainConfig cfg;
    cfg.tau_override = 0.95;
    cfg.epochs_per_iter = 10;
    FailingModel model(3);
    try {
        train(model, scene.cube, cfg);
        FAIL("expected TrainingError");
    } catch (const TrainingError& e) {
        REQUIRE(e.trace().size() == 4);
        CHECK(std::isfinite(e.trace()[2].loss.total));
        CHECK(std::isnan(e.trace()[3].loss.total));
    }
}

TEST_CASE("config validation") {
    TrainConfig cfg;
    CHECK_NOTHROW(validate(cfg));
    cfg.lambda = 0.0;
    CHECK_NOTHROW(validate(cfg));
    for (auto mutate : std::vector<void (*)(TrainConfig&)>{
             [](TrainConfig& c) { c.lambda = -1.0; },
             [](TrainConfig& c) { c.gamma = 0.5; },
             [](TrainConfig& c) { c.iterations = 0; },
             [](TrainConfig& c) { c.epochs_per_iter = 0; },
             [](TrainConfig& c) { c.learning_rate = 0.0; },
             [](TrainConfig& c) { c.hidden = 0; },
             [](TrainConfig& c) { c.tau_override = 1.5; },
         }) {
        TrainConfig bad;
        mutate(bad);
        CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    }
}
