#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scsc/prox.hpp"
#include "scsc/tensor.hpp"

namespace scsc::net {

using prox::ThresholdVector;

/// One unrolled block: encoder (image -> feature), decoder (feature ->
/// image) and a per-channel threshold vector.
struct UnrollBlockParams {
    FilterBank encode; // [k, c_img, s, s]
    FilterBank decode; // [c_img, k, s, s]
    ThresholdVector gamma;
};

/// An extraction module: the null block (encoder + threshold only, the
/// state starts at zero) followed by T full blocks.
struct ModuleParams {
    FilterBank encode0;
    ThresholdVector gamma0;
    std::vector<UnrollBlockParams> blocks;
};

struct ModelConfig {
    std::size_t pan_bands = 1;  // b
    std::size_t ms_bands = 4;   // B
    std::size_t filters = 64;   // k
    std::size_t kernel_size = 3; // s, odd
    std::size_t blocks = 4;     // T

    void validate() const;
};

/// All learnable parameters: three extraction modules plus the three
/// projection convolutions (no biases anywhere).
struct ScscPnnModel {
    ModelConfig config;
    ModuleParams siem; // side features from the panchromatic image
    ModuleParams uiem; // unique features from the upsampled multispectral image
    ModuleParams ciem; // common features, guided by the side features
    FilterBank proj_a;     // feature -> image, forms the residual input of ciem
    FilterBank proj_alpha; // feature -> image, unique branch of the output
    FilterBank proj_beta;  // feature -> image, common branch of the output
};

/// Intermediates of one module run, retained for the backward pass.
struct ModuleTrace {
    Tensor input;
    std::vector<Tensor> preacts;   // null preact, then one per block
    std::vector<Tensor> states;    // null output, then one per block
    std::vector<Tensor> residuals; // one per block
};

struct ForwardTrace {
    ModuleTrace siem, uiem, ciem;
};

Tensor siem_forward(const Tensor& pan, const ModuleParams& params,
                    ModuleTrace* trace = nullptr);
Tensor uiem_forward(const Tensor& lrms_up, const ModuleParams& params,
                    ModuleTrace* trace = nullptr);
Tensor ciem_forward(const Tensor& residual_image, const Tensor& side,
                    const ModuleParams& params, ModuleTrace* trace = nullptr);

struct ForwardResult {
    Tensor hrms;            // reconstructed image
    Tensor unique_features; // x
    Tensor common_features; // y
    Tensor side_features;   // z
    Tensor residual_image;  // input handed to ciem
};

/// Full pass: z from the PAN image, x from the upsampled multispectral
/// image, residual = lrms_up - proj_a * x, y from the residual guided by z,
/// output = proj_alpha * x + proj_beta * y.
ForwardResult forward(const Tensor& lrms_up, const Tensor& pan,
                      const ScscPnnModel& model, ForwardTrace* trace = nullptr);

/// Closed-form learnable-scalar counts.
long long count_params(const ModelConfig& config);
long long count_params_siem(const ModelConfig& config);

/// Zero-filled model of the given geometry.
ScscPnnModel make_model(const ModelConfig& config);
ScscPnnModel zeros_like(const ScscPnnModel& model);

/// Banks uniform on [-sqrt(1/(c_in*s^2)), +sqrt(1/(c_in*s^2))], thresholds
/// at 0.01; the same seed reproduces the model bit for bit.
ScscPnnModel init_params(const ModelConfig& config, std::uint64_t seed);

/// Visits every parameter tensor in canonical (checkpoint) order.
/// on_bank(name, FilterBank&), on_gamma(name, ThresholdVector&).
template <class Model, class BankFn, class GammaFn>
void visit_components(Model& model, BankFn&& on_bank, GammaFn&& on_gamma) {
    const auto visit_module = [&](const std::string& prefix, auto& mp) {
        on_bank(prefix + ".e0", mp.encode0);
        on_gamma(prefix + ".gamma0", mp.gamma0);
        for (std::size_t i = 0; i < mp.blocks.size(); ++i) {
            const std::string base = prefix + ".block" + std::to_string(i);
            on_bank(base + ".E", mp.blocks[i].encode);
            on_bank(base + ".D", mp.blocks[i].decode);
            on_gamma(base + ".gamma", mp.blocks[i].gamma);
        }
    };
    visit_module("siem", model.siem);
    visit_module("uiem", model.uiem);
    visit_module("ciem", model.ciem);
    on_bank("proj_a", model.proj_a);
    on_bank("proj_alpha", model.proj_alpha);
    on_bank("proj_beta", model.proj_beta);
}

/// Flat view of every learnable scalar, canonical order.
template <class Model, class Fn>
void visit_params(Model& model, Fn&& fn) {
    visit_components(
        model,
        [&](const std::string& name, auto& bank) {
            fn(name, bank.kernels().data(), bank.kernels().numel(), false);
        },
        [&](const std::string& name, auto& gamma) {
            fn(name, gamma.values.data(), gamma.values.size(), true);
        });
}

struct ParamRef {
    std::string name;
    double* data;
    std::size_t size;
    bool is_threshold;
};

std::vector<ParamRef> param_refs(ScscPnnModel& model);
long long total_param_count(const ScscPnnModel& model);

} // namespace scsc::net
