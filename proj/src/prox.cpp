#include "scsc/prox.hpp"

#include <string>
#include <utility>

namespace scsc::prox {

namespace {

void check_gamma(const ThresholdVector& gamma) {
    for (double g : gamma.values) {
        if (!(g >= 0.0)) {
            throw ContractError("threshold entries must be nonnegative");
        }
    }
}

// channel count = extent(0), contiguous inner run per channel.
std::pair<std::size_t, std::size_t> channel_layout(const Tensor& x,
                                                   const ThresholdVector& gamma) {
    if (x.rank() > 3) throw DimensionError("prox operators accept tensors of rank 1..3");
    const std::size_t channels = x.extent(0);
    if (channels != gamma.size()) {
        throw DimensionError("threshold length " + std::to_string(gamma.size()) +
                             " does not match channel count " + std::to_string(channels));
    }
    return {channels, x.numel() / channels};
}

} // namespace

double soft_threshold_scalar(double x, double g) {
    if (x > g) return x - g;
    if (x < -g) return x + g;
    return 0.0;
}

int piecewise_branch(double x, double s, double g) {
    if (s >= 0.0) {
        if (x < -2.0 * g) return 0;
        if (x <= 0.0) return 1;
        if (x < s) return 2;
        if (x <= s + 2.0 * g) return 3;
        return 4;
    }
    if (x < s - 2.0 * g) return 5;
    if (x <= s) return 6;
    if (x < 0.0) return 7;
    if (x <= 2.0 * g) return 8;
    return 9;
}

double piecewise_soft_threshold_scalar(double x, double s, double g) {
    switch (piecewise_branch(x, s, g)) {
        case 0:
        case 5: return x + 2.0 * g;
        case 1:
        case 8: return 0.0;
        case 2:
        case 7: return x;
        case 3:
        case 6: return s;
        default: return x - 2.0 * g;
    }
}

Tensor soft_threshold(const Tensor& x, const ThresholdVector& gamma) {
    check_gamma(gamma);
    const auto [channels, inner] = channel_layout(x, gamma);
    Tensor out(x.shape());
    for (std::size_t c = 0; c < channels; ++c) {
        const double g = gamma[c];
        const double* src = x.data() + c * inner;
        double* dst = out.data() + c * inner;
        for (std::size_t i = 0; i < inner; ++i) dst[i] = soft_threshold_scalar(src[i], g);
    }
    return out;
}

Tensor piecewise_soft_threshold(const Tensor& x, const Tensor& s,
                                const ThresholdVector& gamma) {
    check_gamma(gamma);
    require_same_shape(x, s, "piecewise_soft_threshold");
    const auto [channels, inner] = channel_layout(x, gamma);
    Tensor out(x.shape());
    for (std::size_t c = 0; c < channels; ++c) {
        const double g = gamma[c];
        const double* xs = x.data() + c * inner;
        const double* ss = s.data() + c * inner;
        double* dst = out.data() + c * inner;
        for (std::size_t i = 0; i < inner; ++i) {
            dst[i] = piecewise_soft_threshold_scalar(xs[i], ss[i], g);
        }
    }
    return out;
}

SoftVjp soft_threshold_vjp(const Tensor& x, const ThresholdVector& gamma,
                           const Tensor& upstream) {
    check_gamma(gamma);
    require_same_shape(x, upstream, "soft_threshold_vjp");
    const auto [channels, inner] = channel_layout(x, gamma);
    SoftVjp out{Tensor(x.shape()), std::vector<double>(channels, 0.0)};
    for (std::size_t c = 0; c < channels; ++c) {
        const double g = gamma[c];
        const double* xs = x.data() + c * inner;
        const double* up = upstream.data() + c * inner;
        double* gx = out.grad_x.data() + c * inner;
        double gg = 0.0;
        for (std::size_t i = 0; i < inner; ++i) {
            if (xs[i] > g) {
                gx[i] = up[i];
                gg -= up[i];
            } else if (xs[i] < -g) {
                gx[i] = up[i];
                gg += up[i];
            } else {
                gx[i] = 0.0;
            }
        }
        out.grad_gamma[c] = gg;
    }
    return out;
}

PiecewiseVjp piecewise_soft_threshold_vjp(const Tensor& x, const Tensor& s,
                                          const ThresholdVector& gamma,
                                          const Tensor& upstream) {
    check_gamma(gamma);
    require_same_shape(x, s, "piecewise_soft_threshold_vjp");
    require_same_shape(x, upstream, "piecewise_soft_threshold_vjp");
    const auto [channels, inner] = channel_layout(x, gamma);
    PiecewiseVjp out{Tensor(x.shape()), Tensor(x.shape()),
                     std::vector<double>(channels, 0.0)};
    for (std::size_t c = 0; c < channels; ++c) {
        const double g = gamma[c];
        const double* xs = x.data() + c * inner;
        const double* ss = s.data() + c * inner;
        const double* up = upstream.data() + c * inner;
        double* gx = out.grad_x.data() + c * inner;
        double* gs = out.grad_s.data() + c * inner;
        double gg = 0.0;
        for (std::size_t i = 0; i < inner; ++i) {
            switch (piecewise_branch(xs[i], ss[i], g)) {
                case 0:
                case 5: // x + 2g
                    gx[i] = up[i];
                    gs[i] = 0.0;
                    gg += 2.0 * up[i];
                    break;
                case 2:
                case 7: // pass-through
                    gx[i] = up[i];
                    gs[i] = 0.0;
                    break;
                case 3:
                case 6: // clamp to s
                    gx[i] = 0.0;
                    gs[i] = up[i];
                    break;
                case 4:
                case 9: // x - 2g
                    gx[i] = up[i];
                    gs[i] = 0.0;
                    gg -= 2.0 * up[i];
                    break;
                default: // clamp to 0
                    gx[i] = 0.0;
                    gs[i] = 0.0;
                    break;
            }
        }
        out.grad_gamma[c] = gg;
    }
    return out;
}

} // namespace scsc::prox
