#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>

#include "bigset/cube.hpp"

namespace bigset {

inline constexpr std::size_t kDefaultHidden = 100;

/// Weights of the per-pixel autoencoder  x_hat = W2 * relu(W1 * x + b1) + b2.
struct AeParams {
    Eigen::MatrixXd w1;  // hidden x L
    Eigen::VectorXd b1;  // hidden
    Eigen::MatrixXd w2;  // L x hidden
    Eigen::VectorXd b2;  // L

    std::size_t bands() const noexcept { return static_cast<std::size_t>(w1.cols()); }
    std::size_t hidden() const noexcept { return static_cast<std::size_t>(w1.rows()); }

    /// All-zero tensors with the given shape.
    static AeParams zeros(std::size_t bands, std::size_t hidden);
    bool same_shape(const AeParams& other) const noexcept;

    friend bool operator==(const AeParams& a, const AeParams& b) {
        return a.same_shape(b) && a.w1 == b.w1 && a.b1 == b.b1 && a.w2 == b.w2 && a.b2 == b.b2;
    }
};

/// Gradients share the parameter layout.
using AeGrads = AeParams;

/// Weights uniform in [-a, a], a = sqrt(6 / (fan_in + fan_out)) per layer;
/// biases zero. Deterministic for a seed.
AeParams init_params(std::size_t bands, std::size_t hidden, std::uint64_t seed);

/// Activations kept by the forward pass for backpropagation.
struct AeCache {
    Eigen::MatrixXd input;          // N x L
    Eigen::MatrixXd pre_activation; // N x hidden
    Eigen::MatrixXd activation;     // N x hidden
    std::size_t height = 0;
    std::size_t width = 0;
};

struct ForwardResult {
    HsiCube output;
    AeCache cache;
};

ForwardResult ae_forward(const AeParams& params, const HsiCube& cube);

/// Parameter gradients given d loss / d output, summed over all pixels. The
/// ReLU subgradient at exactly 0 is 0.
AeGrads ae_backward(const AeParams& params, const AeCache& cache, const HsiCube& grad_out);

struct AdamSettings {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    AdamSettings settings;
    AeParams first_moment;
    AeParams second_moment;
    std::uint64_t step = 0;

    static AdamState for_params(const AeParams& params, AdamSettings settings = {});
};

/// One bias-corrected ADAM update. Throws NumericError naming the tensor if a
/// gradient entry is not finite, and DataError on a shape mismatch.
void adam_step(AeParams& params, const AeGrads& grads, AdamState& state);

/// Checkpoint: "BGAE", L and hidden as uint32, then W1, b1, W2, b2 as
/// little-endian float64 (W matrices row-major). With a state, a flag byte 1,
/// the step count as uint64, the four ADAM settings, and both moment sets
/// follow; otherwise the flag byte is 0.
void save_checkpoint(const std::filesystem::path& path, const AeParams& params,
                     const AdamState* state = nullptr);

struct Checkpoint {
    AeParams params;
    std::optional<AdamState> state;
};
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Shape-preserving map from a cube to its estimated background, trainable
/// by gradient descent. The separation trainer only talks to this interface.
class Reconstructor {
public:
    virtual ~Reconstructor() = default;

    /// Output has the input's shape. Keeps whatever backward() needs.
    virtual HsiCube forward(const HsiCube& input) = 0;

    /// Adds the parameter gradient for d loss / d (last forward output).
    virtual void accumulate_grad(const HsiCube& grad_output) = 0;

    /// Applies the optimizer to the accumulated gradient and clears it.
    virtual void apply_update() = 0;
};

/// The vanilla autoencoder (linear, ReLU, linear) trained with ADAM.
class VanillaAutoencoder final : public Reconstructor {
public:
    VanillaAutoencoder(AeParams params, AdamSettings adam = {});
    VanillaAutoencoder(std::size_t bands, std::size_t hidden, std::uint64_t seed, AdamSettings adam = {});

    HsiCube forward(const HsiCube& input) override;
    void accumulate_grad(const HsiCube& grad_output) override;
    void apply_update() override;

    const AeParams& params() const noexcept { return params_; }
    AeParams& mutable_params() noexcept { return params_; }
    const AeGrads& grads() const noexcept { return grads_; }
    const AdamState& adam() const noexcept { return adam_; }
    void zero_grad();

private:
    AeParams params_;
    AeGrads grads_;
    AdamState adam_;
    std::optional<AeCache> cache_;
};

}  // namespace bigset
