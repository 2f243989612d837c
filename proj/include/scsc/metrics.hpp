#pragma once

#include "scsc/tensor.hpp"

namespace scsc::metrics {

/// Quality figures for one reconstructed/reference image pair on
/// [0, 1]-normalized data.
struct FusionMetrics {
    double psnr = 0.0;  // dB, +inf when the images are identical
    double ssim = 0.0;  // in [-1, 1]
    double sam = 0.0;   // radians, >= 0
    double ergas = 0.0; // unitless, >= 0
};

/// 10*log10(1 / MSE) with peak 1; returns +inf for MSE == 0.
double psnr(const Tensor& x, const Tensor& ref);

/// Per-band mean SSIM with an 11x11 Gaussian window (sigma 1.5,
/// C1 = 0.01^2, C2 = 0.03^2), averaged over bands. Images smaller than the
/// window fall back to a uniform window of size min(5, M, N).
double ssim(const Tensor& x, const Tensor& ref);

/// Mean spectral angle in radians between the per-pixel band vectors;
/// pixels where either vector has zero norm are skipped.
double sam(const Tensor& x, const Tensor& ref);

/// 100 * (1/r) * sqrt(mean over bands of (RMSE_b / mean_b(ref))^2).
double ergas(const Tensor& x, const Tensor& ref, int r);

FusionMetrics compute_fusion_metrics(const Tensor& x, const Tensor& ref, int r);

} // namespace scsc::metrics
