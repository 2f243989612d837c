#include "scsc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace scsc::metrics {

namespace {

// Rank 2 treated as a single band.
struct Bands {
    std::size_t count, rows, cols;
};

Bands band_layout(const Tensor& x) {
    if (x.rank() == 2) return {1, x.extent(0), x.extent(1)};
    if (x.rank() == 3) return {x.extent(0), x.extent(1), x.extent(2)};
    throw DimensionError("metrics expect rank 2 or rank 3 images");
}

} // namespace

double psnr(const Tensor& x, const Tensor& ref) {
    require_same_shape(x, ref, "psnr");
    double mse = 0.0;
    for (std::size_t i = 0; i < x.numel(); ++i) {
        const double d = x[i] - ref[i];
        mse += d * d;
    }
    mse /= double(x.numel());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

double ssim(const Tensor& x, const Tensor& ref) {
    require_same_shape(x, ref, "ssim");
    const Bands b = band_layout(x);
    constexpr double c1 = 0.01 * 0.01;
    constexpr double c2 = 0.03 * 0.03;

    // 11x11 Gaussian window, or a uniform fallback on tiny images.
    std::size_t win = 11;
    std::vector<double> weights;
    if (b.rows >= win && b.cols >= win) {
        const double sigma = 1.5;
        weights.resize(win * win);
        double norm = 0.0;
        const long radius = long(win) / 2;
        for (long u = -radius; u <= radius; ++u) {
            for (long v = -radius; v <= radius; ++v) {
                const double w = std::exp(-double(u * u + v * v) / (2.0 * sigma * sigma));
                weights[std::size_t((u + radius) * long(win) + (v + radius))] = w;
                norm += w;
            }
        }
        for (double& w : weights) w /= norm;
    } else {
        win = std::min({std::size_t(5), b.rows, b.cols});
        weights.assign(win * win, 1.0 / double(win * win));
    }

    double total = 0.0;
    std::size_t windows = 0;
    for (std::size_t band = 0; band < b.count; ++band) {
        const double* xs = x.data() + band * b.rows * b.cols;
        const double* rs = ref.data() + band * b.rows * b.cols;
        for (std::size_t i = 0; i + win <= b.rows; ++i) {
            for (std::size_t j = 0; j + win <= b.cols; ++j) {
                double mx = 0, mr = 0, xx = 0, rr = 0, xr = 0;
                for (std::size_t u = 0; u < win; ++u) {
                    for (std::size_t v = 0; v < win; ++v) {
                        const double w = weights[u * win + v];
                        const double a = xs[(i + u) * b.cols + (j + v)];
                        const double r = rs[(i + u) * b.cols + (j + v)];
                        mx += w * a;
                        mr += w * r;
                        xx += w * a * a;
                        rr += w * r * r;
                        xr += w * a * r;
                    }
                }
                const double var_x = xx - mx * mx;
                const double var_r = rr - mr * mr;
                const double cov = xr - mx * mr;
                const double value = ((2.0 * mx * mr + c1) * (2.0 * cov + c2)) /
                                     ((mx * mx + mr * mr + c1) * (var_x + var_r + c2));
                total += value;
                ++windows;
            }
        }
    }
    return total / double(windows);
}

double sam(const Tensor& x, const Tensor& ref) {
    require_same_shape(x, ref, "sam");
    const Bands b = band_layout(x);
    const std::size_t plane = b.rows * b.cols;
    double total = 0.0;
    std::size_t counted = 0;
    std::vector<double> u(b.count), w(b.count);
    for (std::size_t px = 0; px < plane; ++px) {
        double xx = 0, yy = 0;
        for (std::size_t band = 0; band < b.count; ++band) {
            u[band] = x[band * plane + px];
            w[band] = ref[band * plane + px];
            xx += u[band] * u[band];
            yy += w[band] * w[band];
        }
        if (xx == 0.0 || yy == 0.0) continue;
        // half-angle form: exact 0 for parallel vectors, unlike acos of a
        // rounded cosine
        const double nu = std::sqrt(xx), nw = std::sqrt(yy);
        double dd = 0.0;
        for (std::size_t band = 0; band < b.count; ++band) {
            const double d = u[band] / nu - w[band] / nw;
            dd += d * d;
        }
        total += 2.0 * std::asin(std::min(1.0, 0.5 * std::sqrt(dd)));
        ++counted;
    }
    return counted ? total / double(counted) : 0.0;
}

double ergas(const Tensor& x, const Tensor& ref, int r) {
    require_same_shape(x, ref, "ergas");
    if (r < 1) throw ConfigError("ergas: ratio must be >= 1");
    const Bands b = band_layout(x);
    const std::size_t plane = b.rows * b.cols;
    double acc = 0.0;
    for (std::size_t band = 0; band < b.count; ++band) {
        double se = 0.0, ref_mean = 0.0;
        for (std::size_t px = 0; px < plane; ++px) {
            const double d = x[band * plane + px] - ref[band * plane + px];
            se += d * d;
            ref_mean += ref[band * plane + px];
        }
        const double rmse = std::sqrt(se / double(plane));
        ref_mean /= double(plane);
        const double ratio = rmse / ref_mean;
        acc += ratio * ratio;
    }
    return 100.0 / double(r) * std::sqrt(acc / double(b.count));
}

FusionMetrics compute_fusion_metrics(const Tensor& x, const Tensor& ref, int r) {
    return FusionMetrics{psnr(x, ref), ssim(x, ref), sam(x, ref), ergas(x, ref, r)};
}

} // namespace scsc::metrics
