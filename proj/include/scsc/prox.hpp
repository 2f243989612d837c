#pragma once

#include <cstddef>
#include <vector>

#include "scsc/tensor.hpp"

namespace scsc::prox {

/// Per-channel thresholds. Entries are expected to stay nonnegative; the
/// optimizer keeps them valid by projection, the operators below reject
/// negative values.
struct ThresholdVector {
    std::vector<double> values;

    ThresholdVector() = default;
    explicit ThresholdVector(std::vector<double> v) : values(std::move(v)) {}
    ThresholdVector(std::size_t k, double fill) : values(k, fill) {}

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
};

/// S_g(x) = sign(x) * max(|x| - g, 0).
double soft_threshold_scalar(double x, double g);

/// Branch index (0..4 for s >= 0, 5..9 for s < 0) of the piecewise soft
/// thresholding function; ties resolve to the branch listed first.
int piecewise_branch(double x, double s, double g);

/// prox of u -> g*(|u| + |u - s|) evaluated by its closed branch table.
double piecewise_soft_threshold_scalar(double x, double s, double g);

/// Soft thresholding with gamma broadcast over the leading (channel) axis;
/// x of rank 1..3 with extent(0) == gamma.size().
Tensor soft_threshold(const Tensor& x, const ThresholdVector& gamma);

/// Piecewise soft thresholding with side-information map s (same shape as x).
Tensor piecewise_soft_threshold(const Tensor& x, const Tensor& s,
                                const ThresholdVector& gamma);

struct SoftVjp {
    Tensor grad_x;
    std::vector<double> grad_gamma;
};

/// Subgradients of soft_threshold: grad_x = upstream on |x| > gamma and 0
/// elsewhere (kinks take 0); grad_gamma accumulates -sign(x) per channel.
SoftVjp soft_threshold_vjp(const Tensor& x, const ThresholdVector& gamma,
                           const Tensor& upstream);

struct PiecewiseVjp {
    Tensor grad_x;
    Tensor grad_s;
    std::vector<double> grad_gamma;
};

/// Branch derivatives of piecewise_soft_threshold: dP/dx = 1 on pass-through
/// and shift branches, dP/ds = 1 where the output clamps to s, dP/dgamma is
/// +2 / -2 on the shift branches. Kinks take the first-listed branch.
PiecewiseVjp piecewise_soft_threshold_vjp(const Tensor& x, const Tensor& s,
                                          const ThresholdVector& gamma,
                                          const Tensor& upstream);

} // namespace scsc::prox
