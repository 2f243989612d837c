#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "scsc/network.hpp"
#include "scsc/tensor.hpp"

namespace scsc::train {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct TrainConfig {
    int epochs = 200;
    double learning_rate = 5e-4;
    int batch_size = 8;
    std::uint64_t seed = 0;
    AdamConfig adam;
    int patch_size = 32;
    int ratio = 2;

    void validate() const;
};

/// One training sample: ground-truth image, its degraded-and-upsampled
/// version, and the panchromatic counterpart. Equal spatial extents,
/// values in [0, 1].
struct SamplePair {
    Tensor hrms;    // H  [B, M, N]
    Tensor lrms_up; // L  [B, M, N]
    Tensor pan;     // P  [b, M, N]
};

/// Mean absolute error over all elements.
double l1_loss(const Tensor& prediction, const Tensor& reference);

struct BatchGrads {
    double loss = 0.0;          // mean per-sample l1 loss
    net::ScscPnnModel grads;    // same structure as the model
};

/// Reverse-mode gradients of the mean batch loss with respect to every
/// learnable scalar. Runs the forward pass internally and retains the
/// per-block intermediates it needs. Throws NumericError naming the first
/// parameter whose gradient is non-finite.
BatchGrads backward(const net::ScscPnnModel& model,
                    std::span<const SamplePair> batch);

struct AdamState {
    std::vector<double> m, v;
    long long step_count = 0;
};

/// Bias-corrected first/second moment update on a flat span; shared by the
/// model-level step below and directly testable on scalars.
void adam_update(std::span<double> params, std::span<const double> grads,
                 std::span<double> m, std::span<double> v, long long step_count,
                 double lr, const AdamConfig& cfg);

/// One Adam step over every parameter, followed by projection of the
/// threshold vectors onto [0, inf).
void adam_step(net::ScscPnnModel& model, const net::ScscPnnModel& grads,
               AdamState& state, double lr, const AdamConfig& cfg);

/// Reduced-resolution protocol: blur-and-decimate the reference to the low
/// resolution, then upsample back to the reference grid.
/// Returns {lrms_up, lrms}.
std::pair<Tensor, Tensor> wald_degrade(const Tensor& hrms, int r, double sigma);

/// Deterministic synthetic dataset: per sample a smooth shared spatial
/// field with band-specific gain/offset plus mild band noise, the
/// panchromatic image as the band mean, and inputs via wald_degrade with
/// sigma = r/2. Values clipped to [0, 1].
std::vector<SamplePair> synth_dataset(std::size_t n, std::size_t ms_bands,
                                      std::size_t pan_bands, std::size_t size,
                                      int r, std::uint64_t seed);

struct TrainResult {
    std::vector<double> loss_trace; // one mean loss per epoch
};

/// Shuffled minibatch sweeps with Adam; deterministic for a fixed seed.
TrainResult train(net::ScscPnnModel& model, const std::vector<SamplePair>& data,
                  const TrainConfig& config);

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::size_t checked = 0;
    std::size_t skipped = 0; // parameters whose perturbation crossed a kink
};

/// Central finite differences (step h) against the reverse-mode gradients
/// on a small synthetic batch. A parameter is skipped when the two
/// perturbed forward passes disagree on any prox branch or loss sign,
/// i.e. when the perturbation crosses a kink.
GradCheckReport gradient_check(const net::ModelConfig& config, std::uint64_t seed,
                               double h = 1e-6);

} // namespace scsc::train
