#include "scsc/network.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "scsc/random.hpp"
#include "scsc/unroll.hpp"

namespace scsc::net {

void ModelConfig::validate() const {
    if (pan_bands < 1 || ms_bands < 1 || filters < 1 || kernel_size < 1) {
        throw ConfigError("model config: bands, filters and kernel size must be >= 1");
    }
    if (kernel_size % 2 == 0) {
        throw ConfigError("model config: kernel size must be odd");
    }
}

namespace {

void check_module_geometry(const Tensor& input, const ModuleParams& p) {
    if (input.rank() != 3) throw DimensionError("module input must be rank 3 [c, M, N]");
    if (input.extent(0) != p.encode0.in_channels()) {
        throw DimensionError("module input has " + std::to_string(input.extent(0)) +
                             " channels, module expects " +
                             std::to_string(p.encode0.in_channels()));
    }
}

Tensor run_module(const Tensor& input, const Tensor* side, const ModuleParams& p,
                  ModuleTrace* trace) {
    check_module_geometry(input, p);
    if (side && side->rank() != 3) {
        throw DimensionError("module side input must be rank 3");
    }

    NullStep null = side ? ista_null_step_piecewise(p.encode0, input, *side, p.gamma0)
                         : ista_null_step_soft(p.encode0, input, p.gamma0);
    Tensor state = std::move(null.state);
    if (trace) {
        trace->input = input;
        trace->preacts.clear();
        trace->states.clear();
        trace->residuals.clear();
        trace->preacts.push_back(std::move(null.preact));
        trace->states.push_back(state);
    }

    for (const UnrollBlockParams& blk : p.blocks) {
        UnrollStep step = side ? ista_step_piecewise(state, blk.encode, blk.decode,
                                                     input, *side, blk.gamma)
                               : ista_step_soft(state, blk.encode, blk.decode, input,
                                                blk.gamma);
        state = std::move(step.state);
        if (trace) {
            trace->residuals.push_back(std::move(step.residual));
            trace->preacts.push_back(std::move(step.preact));
            trace->states.push_back(state);
        }
    }
    if (!all_finite(state)) throw NumericError("module forward produced non-finite values");
    return state;
}

} // namespace

Tensor siem_forward(const Tensor& pan, const ModuleParams& params, ModuleTrace* trace) {
    return run_module(pan, nullptr, params, trace);
}

Tensor uiem_forward(const Tensor& lrms_up, const ModuleParams& params,
                    ModuleTrace* trace) {
    return run_module(lrms_up, nullptr, params, trace);
}

Tensor ciem_forward(const Tensor& residual_image, const Tensor& side,
                    const ModuleParams& params, ModuleTrace* trace) {
    return run_module(residual_image, &side, params, trace);
}

ForwardResult forward(const Tensor& lrms_up, const Tensor& pan,
                      const ScscPnnModel& model, ForwardTrace* trace) {
    if (lrms_up.rank() != 3 || pan.rank() != 3) {
        throw DimensionError("forward: inputs must be rank 3 [c, M, N]");
    }
    if (lrms_up.extent(1) != pan.extent(1) || lrms_up.extent(2) != pan.extent(2)) {
        throw DimensionError("forward: multispectral and panchromatic spatial extents differ");
    }

    ForwardResult out;
    out.side_features = run_module(pan, nullptr, model.siem, trace ? &trace->siem : nullptr);
    out.unique_features =
        run_module(lrms_up, nullptr, model.uiem, trace ? &trace->uiem : nullptr);
    out.residual_image = lrms_up - conv2d_same(out.unique_features, model.proj_a);
    out.common_features = run_module(out.residual_image, &out.side_features, model.ciem,
                                     trace ? &trace->ciem : nullptr);
    out.hrms = conv2d_same(out.unique_features, model.proj_alpha) +
               conv2d_same(out.common_features, model.proj_beta);
    return out;
}

long long count_params(const ModelConfig& c) {
    c.validate();
    const long long T = (long long)c.blocks;
    const long long k = (long long)c.filters;
    const long long s2 = (long long)(c.kernel_size * c.kernel_size);
    const long long b = (long long)c.pan_bands;
    const long long B = (long long)c.ms_bands;
    return (2 * T + 1) * (b + 2 * B) * k * s2 + 3 * (T + 1) * k + 3 * k * B * s2;
}

long long count_params_siem(const ModelConfig& c) {
    c.validate();
    const long long T = (long long)c.blocks;
    const long long k = (long long)c.filters;
    const long long s2 = (long long)(c.kernel_size * c.kernel_size);
    const long long b = (long long)c.pan_bands;
    return (2 * T + 1) * b * k * s2 + (T + 1) * k;
}

namespace {

ModuleParams make_module(std::size_t image_channels, const ModelConfig& c) {
    ModuleParams mp;
    const Shape enc{c.filters, image_channels, c.kernel_size, c.kernel_size};
    const Shape dec{image_channels, c.filters, c.kernel_size, c.kernel_size};
    mp.encode0 = FilterBank(Tensor(enc));
    mp.gamma0 = ThresholdVector(c.filters, 0.0);
    mp.blocks.resize(c.blocks);
    for (auto& blk : mp.blocks) {
        blk.encode = FilterBank(Tensor(enc));
        blk.decode = FilterBank(Tensor(dec));
        blk.gamma = ThresholdVector(c.filters, 0.0);
    }
    return mp;
}

} // namespace

ScscPnnModel make_model(const ModelConfig& c) {
    c.validate();
    ScscPnnModel m;
    m.config = c;
    m.siem = make_module(c.pan_bands, c);
    m.uiem = make_module(c.ms_bands, c);
    m.ciem = make_module(c.ms_bands, c);
    const Shape proj{c.ms_bands, c.filters, c.kernel_size, c.kernel_size};
    m.proj_a = FilterBank(Tensor(proj));
    m.proj_alpha = FilterBank(Tensor(proj));
    m.proj_beta = FilterBank(Tensor(proj));
    return m;
}

ScscPnnModel zeros_like(const ScscPnnModel& model) { return make_model(model.config); }

ScscPnnModel init_params(const ModelConfig& c, std::uint64_t seed) {
    ScscPnnModel m = make_model(c);
    Rng rng(seed);
    visit_components(
        m,
        [&](const std::string&, FilterBank& bank) {
            const double bound = std::sqrt(
                1.0 / double(bank.in_channels() * bank.kernel_size() * bank.kernel_size()));
            for (double& v : bank.kernels().values()) v = rng.uniform(-bound, bound);
        },
        [&](const std::string&, ThresholdVector& gamma) {
            for (double& v : gamma.values) v = 0.01;
        });
    return m;
}

std::vector<ParamRef> param_refs(ScscPnnModel& model) {
    std::vector<ParamRef> refs;
    visit_params(model, [&](const std::string& name, double* data, std::size_t size,
                            bool is_threshold) {
        refs.push_back(ParamRef{name, data, size, is_threshold});
    });
    return refs;
}

long long total_param_count(const ScscPnnModel& model) {
    long long n = 0;
    visit_params(const_cast<ScscPnnModel&>(model),
                 [&](const std::string&, double*, std::size_t size, bool) {
                     n += (long long)size;
                 });
    return n;
}

} // namespace scsc::net
