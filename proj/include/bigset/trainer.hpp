#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bigset/autoencoder.hpp"
#include "bigset/cube.hpp"
#include "bigset/errors.hpp"
#include "bigset/thresholding.hpp"

namespace bigset {

struct TrainConfig {
    double lambda = 1e-4;                // weight of the anomaly-suppression term
    double gamma = kDefaultGamma;        // gamma for the proportion-threshold estimate
    std::size_t iterations = 5;          // K mask updates
    std::size_t epochs_per_iter = 150;
    double learning_rate = 1e-3;
    double eps = 1e-8;                   // guards 1 / (S(M) + eps)
    std::uint64_t seed = 0;
    std::size_t hidden = kDefaultHidden;
    std::size_t bins = kDefaultBins;
    bool normalize = true;               // global min-max to [0, 1] before training
    std::optional<double> tau_override;  // skip estimation and use this tau
    std::size_t auc_interval = 10;       // epochs between AUC samples (needs ground truth)
};

/// Throws std::invalid_argument when a field is out of range.
void validate(const TrainConfig& cfg);

struct LossParts {
    double total = 0.0;
    double background = 0.0;  // L_BR
    double suppression = 0.0; // L_AS
};

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based over the whole run
    LossParts loss;
};

struct AucRecord {
    std::size_t epoch = 0;
    double auc = 0.0;
};

struct TrainResult {
    ErrorMap detection;               // R^(K)
    std::vector<BinaryMask> masks;    // M^(1) ... M^(K)
    std::vector<EpochRecord> losses;  // one entry per epoch
    std::vector<AucRecord> aucs;      // empty without ground truth
    AeParams params;
    double tau = 1.0;
    std::optional<TauEstimate> tau_estimate;  // empty when tau was overridden
};

/// Raised when the loss turns non-finite; carries the trace up to that epoch.
class TrainingError : public NumericError {
public:
    TrainingError(const std::string& what, std::vector<EpochRecord> trace)
        : NumericError(what), trace_(std::move(trace)) {}
    const std::vector<EpochRecord>& trace() const noexcept { return trace_; }

private:
    std::vector<EpochRecord> trace_;
};

/// Per-pixel squared spectral distance ||recon - original||^2.
ErrorMap error_map(const HsiCube& recon, const HsiCube& original);

/// Background fidelity: squared error summed over unmasked pixels and all
/// bands, divided by the unmasked pixel count. Throws DataError when every
/// pixel is masked.
double loss_br(const HsiCube& recon, const HsiCube& original, const BinaryMask& mask);

/// suppression_value / (S(M) + eps).
double loss_as(const HsiCube& recon, const BinaryMask& mask, double eps = 1e-8);

/// total = br + lambda * as.
LossParts total_loss(const HsiCube& recon, const HsiCube& original, const BinaryMask& mask, double lambda,
                     double eps = 1e-8);

/// d total / d recon.
HsiCube total_loss_grad(const HsiCube& recon, const HsiCube& original, const BinaryMask& mask, double lambda,
                        double eps = 1e-8);

/// Sorts the errors ascending, takes t = r[ceil(tau * N)] (1-based) and flags
/// every pixel with error strictly greater than t.
BinaryMask update_mask(const ErrorMap& errors, double tau);

/// Zeroes every band of the masked pixels.
HsiCube mask_input(const HsiCube& cube, const BinaryMask& mask);

/// One optimisation step of the separation loss: forward on `input`, loss
/// against `original`, backward, optimizer update. Returns the loss and the
/// reconstruction computed before the update.
struct StepResult {
    LossParts loss;
    HsiCube recon;
};
StepResult separation_step(Reconstructor& model, const HsiCube& input, const HsiCube& original,
                           const BinaryMask& mask, double lambda, double eps);

/// Optional ground truth enables the AUC trace.
struct TrainOptions {
    const GroundTruth* truth = nullptr;
};

/// Binary mask-guided separation training of `model` on `cube`.
///
/// The mask starts empty and tau is estimated once (or taken from the
/// override). Each of the K iterations trains `epochs_per_iter` epochs on the
/// cube with the masked pixels zeroed, then scores every pixel by the error of
/// the masked-input reconstruction against the full cube and re-thresholds the
/// mask with tau. Throws NumericError if the loss becomes non-finite.
TrainResult train(Reconstructor& model, const HsiCube& cube, const TrainConfig& cfg,
                  const TrainOptions& options = {});

/// Same as above with a VanillaAutoencoder built from cfg (seed, hidden, lr).
TrainResult train(const HsiCube& cube, const TrainConfig& cfg, const TrainOptions& options = {});

/// Plain reconstruction training: mask pinned to zero, lambda = 0, tau = 1,
/// a single iteration of `epochs_per_iter` epochs.
TrainResult train_plain(const HsiCube& cube, const TrainConfig& cfg, const TrainOptions& options = {});

}  // namespace bigset
