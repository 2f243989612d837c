#pragma once

#include <utility>
#include <vector>

#include "scsc/tensor.hpp"

namespace scsc::solver {

enum class StepPolicy {
    power_iteration, // step = 1/L with L from estimate_lipschitz
    fixed            // step = fixed_step
};

struct IstaSettings {
    int max_iters = 500;
    double tol = 1e-8; // relative objective-change stopping threshold
    StepPolicy step_policy = StepPolicy::power_iteration;
    double fixed_step = 0.0;
    double lambda = 0.1; // sparsity weight, >= 0

    void validate() const;
};

/// Per-solve diagnostics. objective_trace holds, after each iteration, the
/// merit function the iteration descends:
///     ||target - dict * f||^2 + 2*lambda*||f||_1        (soft variant)
///     ||target - dict * f||^2 + 2*lambda*(||f||_1 + ||f - side||_1)
/// which with step 1/L is non-increasing by construction.
struct SolveReport {
    std::vector<double> objective_trace;
    int iterations_run = 0;
    bool converged = false;
};

struct IstaResult {
    Tensor features;
    SolveReport report;
};

/// ||image - dict * features||^2 + lambda * ||features||_1.
double objective_csc(const Tensor& image, const FilterBank& dict,
                     const Tensor& features, double lambda);

/// Largest eigenvalue of f -> rotate180(dict) * (dict * f) on feature maps
/// of the given shape, by power iteration. Throws NumericError for a
/// degenerate (e.g. all-zero) bank.
double estimate_lipschitz(const FilterBank& dict, const Shape& feature_shape,
                          int max_iters = 20000, double rtol = 1e-12);

/// ISTA for the sparse coding problem on `image`; features start at zero.
IstaResult ista_csc(const Tensor& image, const FilterBank& dict,
                    const IstaSettings& settings);

/// Same scheme applied to the residualized multispectral input.
IstaResult ista_unique(const Tensor& residual_image, const FilterBank& dict,
                       const IstaSettings& settings);

/// ISTA with the piecewise operator coupling the features to `side`.
IstaResult ista_common(const Tensor& residual_image, const FilterBank& dict,
                       const Tensor& side, const IstaSettings& settings);

struct AlternateResult {
    Tensor unique_features; // x
    Tensor common_features; // y
    SolveReport report;     // joint objective after each half-step
};

/// Block-coordinate scheme: starting from y = 0, repeat
///   x <- ista_unique(image - dict_common * y), then
///   y <- ista_common(image - dict_unique * x, side)
/// for `rounds` rounds. Rounds after the first warm-start from the previous
/// iterate so the joint objective stays non-increasing across half-steps.
AlternateResult alternate_solve(const Tensor& image, const FilterBank& dict_unique,
                                const FilterBank& dict_common, const Tensor& side,
                                const IstaSettings& settings, int rounds = 1);

/// Max-norm change produced by one more iteration from `features`; small at
/// a fixed point of the iteration.
double fixed_point_residual(const Tensor& target, const FilterBank& dict,
                            const Tensor* side, const Tensor& features,
                            double step, double lambda);

} // namespace scsc::solver
