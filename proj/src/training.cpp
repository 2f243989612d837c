#include "scsc/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "scsc/random.hpp"

namespace scsc::train {

void TrainConfig::validate() const {
    if (epochs < 1) throw ConfigError("train config: epochs must be >= 1");
    if (!(learning_rate >= 0.0)) throw ConfigError("train config: learning rate must be >= 0");
    if (batch_size < 1) throw ConfigError("train config: batch size must be >= 1");
    if (patch_size < 1 || ratio < 1) throw ConfigError("train config: sizes must be >= 1");
    if (patch_size % ratio != 0) {
        throw ConfigError("train config: patch size must be divisible by the ratio");
    }
    if (!(adam.beta1 >= 0 && adam.beta1 < 1 && adam.beta2 >= 0 && adam.beta2 < 1 &&
          adam.eps > 0)) {
        throw ConfigError("train config: invalid Adam constants");
    }
}

double l1_loss(const Tensor& prediction, const Tensor& reference) {
    require_same_shape(prediction, reference, "l1_loss");
    double acc = 0.0;
    for (std::size_t i = 0; i < prediction.numel(); ++i) {
        acc += std::abs(prediction[i] - reference[i]);
    }
    return acc / double(prediction.numel());
}

namespace {

void add_gamma(std::vector<double>& acc, const std::vector<double>& g) {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += g[i];
}

// Reverse pass through one extraction module. `gout` is the gradient with
// respect to the module output; returns the gradient with respect to the
// module input and, when side is given, accumulates the side gradient.
Tensor module_backward(const net::ModuleParams& p, const net::ModuleTrace& tr,
                       const Tensor* side, const Tensor& gout,
                       net::ModuleParams& grads, Tensor* grad_side) {
    const std::size_t s = p.encode0.kernel_size();
    Tensor g = gout;
    Tensor g_input(tr.input.shape(), 0.0);

    for (std::size_t t = p.blocks.size(); t-- > 0;) {
        const auto& blk = p.blocks[t];
        auto& gblk = grads.blocks[t];
        const Tensor& preact = tr.preacts[t + 1];
        const Tensor& state_in = tr.states[t];
        const Tensor& residual = tr.residuals[t];

        Tensor ga;
        if (side) {
            auto vjp = prox::piecewise_soft_threshold_vjp(preact, *side, blk.gamma, g);
            add_gamma(gblk.gamma.values, vjp.grad_gamma);
            *grad_side += vjp.grad_s;
            ga = std::move(vjp.grad_x);
        } else {
            auto vjp = prox::soft_threshold_vjp(preact, blk.gamma, g);
            add_gamma(gblk.gamma.values, vjp.grad_gamma);
            ga = std::move(vjp.grad_x);
        }

        // preact = state_in + encode * residual
        Tensor g_residual = conv2d_same(ga, rotate180(blk.encode));
        gblk.encode.kernels() += conv2d_same_kernel_grad(residual, ga, s);

        // residual = input - decode * state_in
        g_input += g_residual;
        const Tensor g_decoded = -g_residual;
        gblk.decode.kernels() += conv2d_same_kernel_grad(state_in, g_decoded, s);
        Tensor g_state = ga + conv2d_same(g_decoded, rotate180(blk.decode));
        g = std::move(g_state);
    }

    // null block: states[0] = prox(encode0 * input)
    Tensor ga0;
    if (side) {
        auto vjp = prox::piecewise_soft_threshold_vjp(tr.preacts[0], *side, p.gamma0, g);
        add_gamma(grads.gamma0.values, vjp.grad_gamma);
        *grad_side += vjp.grad_s;
        ga0 = std::move(vjp.grad_x);
    } else {
        auto vjp = prox::soft_threshold_vjp(tr.preacts[0], p.gamma0, g);
        add_gamma(grads.gamma0.values, vjp.grad_gamma);
        ga0 = std::move(vjp.grad_x);
    }
    grads.encode0.kernels() += conv2d_same_kernel_grad(tr.input, ga0, s);
    g_input += conv2d_same(ga0, rotate180(p.encode0));
    return g_input;
}

} // namespace

BatchGrads backward(const net::ScscPnnModel& model, std::span<const SamplePair> batch) {
    if (batch.empty()) throw ConfigError("backward: batch must be nonempty");
    BatchGrads out;
    out.grads = net::zeros_like(model);

    for (const SamplePair& sample : batch) {
        net::ForwardTrace tr;
        const net::ForwardResult fr = net::forward(sample.lrms_up, sample.pan, model, &tr);
        require_same_shape(fr.hrms, sample.hrms, "backward");

        const Tensor diff = fr.hrms - sample.hrms;
        const double inv_n = 1.0 / double(diff.numel());
        out.loss += norm1(diff) * inv_n;

        Tensor g_hrms(diff.shape());
        for (std::size_t i = 0; i < diff.numel(); ++i) {
            g_hrms[i] = diff[i] > 0.0 ? inv_n : (diff[i] < 0.0 ? -inv_n : 0.0);
        }

        const std::size_t s = model.config.kernel_size;

        // hrms = proj_alpha * x + proj_beta * y
        out.grads.proj_alpha.kernels() +=
            conv2d_same_kernel_grad(fr.unique_features, g_hrms, s);
        Tensor gx = conv2d_same(g_hrms, rotate180(model.proj_alpha));
        out.grads.proj_beta.kernels() +=
            conv2d_same_kernel_grad(fr.common_features, g_hrms, s);
        const Tensor gy = conv2d_same(g_hrms, rotate180(model.proj_beta));

        // y = ciem(residual_image; z)
        Tensor gz(fr.side_features.shape(), 0.0);
        const Tensor g_residual_image =
            module_backward(model.ciem, tr.ciem, &fr.side_features, gy, out.grads.ciem, &gz);

        // residual_image = lrms_up - proj_a * x
        const Tensor g_projected = -g_residual_image;
        out.grads.proj_a.kernels() +=
            conv2d_same_kernel_grad(fr.unique_features, g_projected, s);
        gx += conv2d_same(g_projected, rotate180(model.proj_a));

        // x = uiem(lrms_up), z = siem(pan); input gradients are not needed
        module_backward(model.uiem, tr.uiem, nullptr, gx, out.grads.uiem, nullptr);
        module_backward(model.siem, tr.siem, nullptr, gz, out.grads.siem, nullptr);
    }

    const double scale = 1.0 / double(batch.size());
    out.loss *= scale;
    net::visit_params(out.grads, [&](const std::string& name, double* data,
                                     std::size_t size, bool) {
        for (std::size_t i = 0; i < size; ++i) {
            data[i] *= scale;
            if (!std::isfinite(data[i])) {
                throw NumericError("non-finite gradient in '" + name + "'");
            }
        }
    });
    return out;
}

void adam_update(std::span<double> params, std::span<const double> grads,
                 std::span<double> m, std::span<double> v, long long step_count,
                 double lr, const AdamConfig& cfg) {
    const double bias1 = 1.0 - std::pow(cfg.beta1, double(step_count));
    const double bias2 = 1.0 - std::pow(cfg.beta2, double(step_count));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
        const double mhat = m[i] / bias1;
        const double vhat = v[i] / bias2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
}

void adam_step(net::ScscPnnModel& model, const net::ScscPnnModel& grads,
               AdamState& state, double lr, const AdamConfig& cfg) {
    const long long total = net::total_param_count(model);
    if (state.m.empty()) {
        state.m.assign(std::size_t(total), 0.0);
        state.v.assign(std::size_t(total), 0.0);
    }
    if ((long long)state.m.size() != total) {
        throw DimensionError("adam_step: state size does not match the model");
    }

    auto prefs = net::param_refs(model);
    auto grefs = net::param_refs(const_cast<net::ScscPnnModel&>(grads));
    if (prefs.size() != grefs.size()) {
        throw DimensionError("adam_step: gradient structure does not match the model");
    }
    ++state.step_count;
    std::size_t offset = 0;
    for (std::size_t p = 0; p < prefs.size(); ++p) {
        if (prefs[p].size != grefs[p].size) {
            throw DimensionError("adam_step: gradient shapes do not match the model");
        }
        adam_update({prefs[p].data, prefs[p].size}, {grefs[p].data, grefs[p].size},
                    {state.m.data() + offset, prefs[p].size},
                    {state.v.data() + offset, prefs[p].size}, state.step_count, lr, cfg);
        if (prefs[p].is_threshold) {
            for (std::size_t i = 0; i < prefs[p].size; ++i) {
                prefs[p].data[i] = std::max(0.0, prefs[p].data[i]);
            }
        }
        offset += prefs[p].size;
    }
}

std::pair<Tensor, Tensor> wald_degrade(const Tensor& hrms, int r, double sigma) {
    Tensor low = gaussian_blur_downsample(hrms, r, sigma);
    Tensor up = upsample_bicubic(low, r);
    return {std::move(up), std::move(low)};
}

namespace {

// Smooth field in [0, 1]: blurred uniform noise, min-max normalized.
Tensor smooth_field(std::size_t size, Rng& rng) {
    Tensor noise(Shape{1, size, size});
    for (double& v : noise.values()) v = rng.uniform();
    Tensor field = gaussian_blur_downsample(noise, 1, 2.0);
    double lo = field[0], hi = field[0];
    for (double v : field.values()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi - lo;
    for (double& v : field.values()) v = span > 0.0 ? (v - lo) / span : 0.5;
    return field;
}

double clip01(double v) { return std::clamp(v, 0.0, 1.0); }

} // namespace

std::vector<SamplePair> synth_dataset(std::size_t n, std::size_t ms_bands,
                                      std::size_t pan_bands, std::size_t size,
                                      int r, std::uint64_t seed) {
    if (ms_bands < 1 || pan_bands < 1 || size < 4) {
        throw ConfigError("synth_dataset: bands must be >= 1 and size >= 4");
    }
    if (size % std::size_t(r) != 0) {
        throw DimensionError("synth_dataset: size must be divisible by the ratio");
    }
    Rng rng(seed);
    std::vector<SamplePair> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Tensor base = smooth_field(size, rng);
        Tensor hrms(Shape{ms_bands, size, size});
        for (std::size_t band = 0; band < ms_bands; ++band) {
            const double gain = rng.uniform(0.35, 0.65);
            const double offset = rng.uniform(0.15, 0.35);
            const Tensor band_noise = smooth_field(size, rng);
            for (std::size_t px = 0; px < size * size; ++px) {
                hrms.data()[band * size * size + px] =
                    clip01(offset + gain * base[px] + 0.15 * (band_noise[px] - 0.5));
            }
        }
        Tensor pan(Shape{pan_bands, size, size});
        for (std::size_t px = 0; px < size * size; ++px) {
            double acc = 0.0;
            for (std::size_t band = 0; band < ms_bands; ++band) {
                acc += hrms.data()[band * size * size + px];
            }
            const double v = acc / double(ms_bands);
            for (std::size_t band = 0; band < pan_bands; ++band) {
                pan.data()[band * size * size + px] = v;
            }
        }
        auto [lrms_up, lrms] = wald_degrade(hrms, r, 0.5 * double(r));
        for (double& v : lrms_up.values()) v = clip01(v);
        out.push_back(SamplePair{std::move(hrms), std::move(lrms_up), std::move(pan)});
    }
    return out;
}

TrainResult train(net::ScscPnnModel& model, const std::vector<SamplePair>& data,
                  const TrainConfig& config) {
    config.validate();
    if (data.empty()) throw ConfigError("train: dataset must be nonempty");

    Rng rng(config.seed);
    AdamState state;
    TrainResult result;
    result.loss_trace.reserve(std::size_t(config.epochs));

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::vector<SamplePair> batch;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle(order.begin(), order.end(), rng);
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size();
             start += std::size_t(config.batch_size)) {
            const std::size_t stop =
                std::min(order.size(), start + std::size_t(config.batch_size));
            batch.clear();
            for (std::size_t i = start; i < stop; ++i) batch.push_back(data[order[i]]);
            BatchGrads bg = backward(model, batch);
            adam_step(model, bg.grads, state, config.learning_rate, config.adam);
            loss_sum += bg.loss * double(stop - start);
        }
        const double epoch_loss = loss_sum / double(data.size());
        if (!std::isfinite(epoch_loss)) {
            throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch));
        }
        result.loss_trace.push_back(epoch_loss);
    }
    return result;
}

namespace {

// Branch signature of one forward pass; finite differences are only valid
// between two evaluations that agree on every prox branch and loss sign.
void append_soft_signature(const Tensor& preact, const prox::ThresholdVector& gamma,
                           std::vector<std::int8_t>& sig) {
    const std::size_t channels = preact.extent(0);
    const std::size_t inner = preact.numel() / channels;
    for (std::size_t c = 0; c < channels; ++c) {
        const double g = gamma[c];
        const double* a = preact.data() + c * inner;
        for (std::size_t i = 0; i < inner; ++i) {
            sig.push_back(a[i] > g ? 1 : (a[i] < -g ? -1 : 0));
        }
    }
}

void append_piecewise_signature(const Tensor& preact, const Tensor& side,
                                const prox::ThresholdVector& gamma,
                                std::vector<std::int8_t>& sig) {
    const std::size_t channels = preact.extent(0);
    const std::size_t inner = preact.numel() / channels;
    for (std::size_t c = 0; c < channels; ++c) {
        const double g = gamma[c];
        const double* a = preact.data() + c * inner;
        const double* s = side.data() + c * inner;
        for (std::size_t i = 0; i < inner; ++i) {
            sig.push_back(std::int8_t(prox::piecewise_branch(a[i], s[i], g)));
        }
    }
}

void append_module_signature(const net::ModuleParams& p, const net::ModuleTrace& tr,
                             const Tensor* side, std::vector<std::int8_t>& sig) {
    if (side) {
        append_piecewise_signature(tr.preacts[0], *side, p.gamma0, sig);
    } else {
        append_soft_signature(tr.preacts[0], p.gamma0, sig);
    }
    for (std::size_t t = 0; t < p.blocks.size(); ++t) {
        if (side) {
            append_piecewise_signature(tr.preacts[t + 1], *side, p.blocks[t].gamma, sig);
        } else {
            append_soft_signature(tr.preacts[t + 1], p.blocks[t].gamma, sig);
        }
    }
}

std::pair<double, std::vector<std::int8_t>> loss_with_signature(
    const net::ScscPnnModel& model, std::span<const SamplePair> batch) {
    double loss = 0.0;
    std::vector<std::int8_t> sig;
    for (const SamplePair& sample : batch) {
        net::ForwardTrace tr;
        const net::ForwardResult fr = net::forward(sample.lrms_up, sample.pan, model, &tr);
        loss += l1_loss(fr.hrms, sample.hrms);
        append_module_signature(model.siem, tr.siem, nullptr, sig);
        append_module_signature(model.uiem, tr.uiem, nullptr, sig);
        append_module_signature(model.ciem, tr.ciem, &fr.side_features, sig);
        for (std::size_t i = 0; i < fr.hrms.numel(); ++i) {
            const double d = fr.hrms[i] - sample.hrms[i];
            sig.push_back(d > 0.0 ? 1 : (d < 0.0 ? -1 : 0));
        }
    }
    return {loss / double(batch.size()), std::move(sig)};
}

} // namespace

GradCheckReport gradient_check(const net::ModelConfig& config, std::uint64_t seed,
                               double h) {
    net::ScscPnnModel model = net::init_params(config, seed);
    const std::vector<SamplePair> batch =
        synth_dataset(2, config.ms_bands, config.pan_bands, 8, 2, seed ^ 0xD1CE5EEDULL);

    const BatchGrads analytic = backward(model, batch);
    auto prefs = net::param_refs(model);
    auto grefs = net::param_refs(const_cast<net::ScscPnnModel&>(analytic.grads));

    GradCheckReport report;
    for (std::size_t p = 0; p < prefs.size(); ++p) {
        for (std::size_t i = 0; i < prefs[p].size; ++i) {
            double& theta = prefs[p].data[i];
            const double saved = theta;
            theta = saved + h;
            const auto plus = loss_with_signature(model, batch);
            theta = saved - h;
            const auto minus = loss_with_signature(model, batch);
            theta = saved;
            if (plus.second != minus.second) {
                ++report.skipped;
                continue;
            }
            const double fd = (plus.first - minus.first) / (2.0 * h);
            const double an = grefs[p].data[i];
            const double rel =
                std::abs(an - fd) / std::max({std::abs(an), std::abs(fd), 1e-3});
            report.max_rel_error = std::max(report.max_rel_error, rel);
            ++report.checked;
        }
    }
    return report;
}

} // namespace scsc::train
