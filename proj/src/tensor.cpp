#include "scsc/tensor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace scsc {

namespace {

std::size_t shape_product(const Shape& s) {
    std::size_t n = 1;
    for (auto e : s) n *= e;
    return n;
}

void check_rank(const Shape& s) {
    if (s.empty() || s.size() > 4) {
        throw DimensionError("tensor rank must be between 1 and 4, got " +
                             std::to_string(s.size()));
    }
    for (auto e : s) {
        if (e == 0) throw DimensionError("tensor extents must be positive");
    }
}

} // namespace

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
    check_rank(shape_);
    data_.assign(shape_product(shape_), fill);
}

Tensor Tensor::from_data(Shape shape, std::vector<double> values) {
    check_rank(shape);
    if (shape_product(shape) != values.size()) {
        throw DimensionError("tensor data length " + std::to_string(values.size()) +
                             " does not match the product of extents");
    }
    Tensor t;
    t.shape_ = std::move(shape);
    t.data_ = std::move(values);
    return t;
}

std::size_t Tensor::extent(std::size_t axis) const {
    if (axis >= shape_.size()) throw DimensionError("tensor axis out of range");
    return shape_[axis];
}

namespace {

void expect_rank(const Shape& s, std::size_t r) {
    if (s.size() != r) {
        throw DimensionError("expected rank " + std::to_string(r) + " tensor, got rank " +
                             std::to_string(s.size()));
    }
}

} // namespace

double& Tensor::at(std::size_t i) {
    expect_rank(shape_, 1);
    return data_[i];
}
double& Tensor::at(std::size_t i, std::size_t j) {
    expect_rank(shape_, 2);
    return data_[i * shape_[1] + j];
}
double& Tensor::at(std::size_t c, std::size_t i, std::size_t j) {
    expect_rank(shape_, 3);
    return data_[(c * shape_[1] + i) * shape_[2] + j];
}
double& Tensor::at(std::size_t o, std::size_t c, std::size_t i, std::size_t j) {
    expect_rank(shape_, 4);
    return data_[((o * shape_[1] + c) * shape_[2] + i) * shape_[3] + j];
}
double Tensor::at(std::size_t i) const { return const_cast<Tensor*>(this)->at(i); }
double Tensor::at(std::size_t i, std::size_t j) const {
    return const_cast<Tensor*>(this)->at(i, j);
}
double Tensor::at(std::size_t c, std::size_t i, std::size_t j) const {
    return const_cast<Tensor*>(this)->at(c, i, j);
}
double Tensor::at(std::size_t o, std::size_t c, std::size_t i, std::size_t j) const {
    return const_cast<Tensor*>(this)->at(o, c, i, j);
}

Tensor zeros_like(const Tensor& t) { return Tensor(t.shape()); }

bool all_finite(const Tensor& t) {
    for (double v : t.values()) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
    if (!a.same_shape(b)) {
        throw DimensionError(std::string(what) + ": operand shapes differ");
    }
}

Tensor operator+(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "tensor add");
    Tensor out = a;
    for (std::size_t i = 0; i < out.numel(); ++i) out[i] += b[i];
    return out;
}

Tensor operator-(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "tensor subtract");
    Tensor out = a;
    for (std::size_t i = 0; i < out.numel(); ++i) out[i] -= b[i];
    return out;
}

Tensor operator*(double s, const Tensor& t) {
    Tensor out = t;
    for (std::size_t i = 0; i < out.numel(); ++i) out[i] *= s;
    return out;
}

Tensor operator-(const Tensor& t) { return -1.0 * t; }

Tensor& operator+=(Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "tensor add");
    for (std::size_t i = 0; i < a.numel(); ++i) a[i] += b[i];
    return a;
}

Tensor& operator-=(Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "tensor subtract");
    for (std::size_t i = 0; i < a.numel(); ++i) a[i] -= b[i];
    return a;
}

Tensor& operator*=(Tensor& a, double s) {
    for (std::size_t i = 0; i < a.numel(); ++i) a[i] *= s;
    return a;
}

double dot(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "dot");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.numel(); ++i) acc += a[i] * b[i];
    return acc;
}

double sum_squares(const Tensor& t) {
    double acc = 0.0;
    for (double v : t.values()) acc += v * v;
    return acc;
}

double norm1(const Tensor& t) {
    double acc = 0.0;
    for (double v : t.values()) acc += std::abs(v);
    return acc;
}

double max_abs(const Tensor& t) {
    double m = 0.0;
    for (double v : t.values()) m = std::max(m, std::abs(v));
    return m;
}

double mean(const Tensor& t) {
    double acc = 0.0;
    for (double v : t.values()) acc += v;
    return acc / double(t.numel());
}

FilterBank::FilterBank(Tensor kernels) : kernels_(std::move(kernels)) {
    if (kernels_.rank() != 4) {
        throw DimensionError("filter bank must be rank 4 [c_out, c_in, s, s]");
    }
    if (kernels_.extent(2) != kernels_.extent(3)) {
        throw DimensionError("filter bank kernels must be square");
    }
    if (kernels_.extent(2) % 2 == 0) {
        throw ConfigError("filter bank kernel size must be odd, got " +
                          std::to_string(kernels_.extent(2)));
    }
}

Tensor conv2d_same(const Tensor& input, const FilterBank& bank) {
    if (input.rank() != 3) throw DimensionError("conv2d_same: input must be rank 3 [c, M, N]");
    const std::size_t cin = input.extent(0);
    const std::size_t rows = input.extent(1);
    const std::size_t cols = input.extent(2);
    if (cin != bank.in_channels()) {
        throw DimensionError("conv2d_same: input has " + std::to_string(cin) +
                             " channels, bank expects " + std::to_string(bank.in_channels()));
    }
    const std::size_t cout = bank.out_channels();
    const std::size_t s = bank.kernel_size();
    const long pad = long(s - 1) / 2;

    Tensor out(Shape{cout, rows, cols}, 0.0);
    const double* in = input.data();
    const double* kd = bank.kernels().data();
    double* od = out.data();
    const std::size_t plane = rows * cols;

    for (std::size_t o = 0; o < cout; ++o) {
        double* outp = od + o * plane;
        for (std::size_t c = 0; c < cin; ++c) {
            const double* inp = in + c * plane;
            const double* kk = kd + (o * cin + c) * s * s;
            for (std::size_t u = 0; u < s; ++u) {
                const long di = long(u) - pad;
                const long i0 = std::max<long>(0, -di);
                const long i1 = std::min<long>(long(rows), long(rows) - di);
                if (i0 >= i1) continue;
                for (std::size_t v = 0; v < s; ++v) {
                    const double w = kk[u * s + v];
                    const long dj = long(v) - pad;
                    const long j0 = std::max<long>(0, -dj);
                    const long j1 = std::min<long>(long(cols), long(cols) - dj);
                    if (j0 >= j1) continue;
                    const std::size_t len = std::size_t(j1 - j0);
                    for (long i = i0; i < i1; ++i) {
                        const double* src = inp + std::size_t(i + di) * cols + std::size_t(j0 + dj);
                        double* dst = outp + std::size_t(i) * cols + std::size_t(j0);
                        for (std::size_t j = 0; j < len; ++j) dst[j] += w * src[j];
                    }
                }
            }
        }
    }
    if (!all_finite(out)) throw NumericError("conv2d_same produced non-finite values");
    return out;
}

FilterBank rotate180(const FilterBank& bank) {
    const std::size_t cout = bank.out_channels();
    const std::size_t cin = bank.in_channels();
    const std::size_t s = bank.kernel_size();
    Tensor rot(Shape{cin, cout, s, s});
    const Tensor& k = bank.kernels();
    for (std::size_t o = 0; o < cout; ++o) {
        for (std::size_t c = 0; c < cin; ++c) {
            for (std::size_t u = 0; u < s; ++u) {
                for (std::size_t v = 0; v < s; ++v) {
                    rot.at(c, o, s - 1 - u, s - 1 - v) = k.at(o, c, u, v);
                }
            }
        }
    }
    return FilterBank(std::move(rot));
}

Tensor conv2d_same_kernel_grad(const Tensor& input, const Tensor& upstream,
                               std::size_t kernel_size) {
    if (input.rank() != 3 || upstream.rank() != 3) {
        throw DimensionError("conv2d_same_kernel_grad: rank 3 operands required");
    }
    if (input.extent(1) != upstream.extent(1) || input.extent(2) != upstream.extent(2)) {
        throw DimensionError("conv2d_same_kernel_grad: spatial extents differ");
    }
    if (kernel_size % 2 == 0) throw ConfigError("kernel size must be odd");

    const std::size_t cin = input.extent(0);
    const std::size_t cout = upstream.extent(0);
    const std::size_t rows = input.extent(1);
    const std::size_t cols = input.extent(2);
    const std::size_t s = kernel_size;
    const long pad = long(s - 1) / 2;
    const std::size_t plane = rows * cols;

    Tensor grad(Shape{cout, cin, s, s}, 0.0);
    for (std::size_t o = 0; o < cout; ++o) {
        const double* up = upstream.data() + o * plane;
        for (std::size_t c = 0; c < cin; ++c) {
            const double* inp = input.data() + c * plane;
            for (std::size_t u = 0; u < s; ++u) {
                const long di = long(u) - pad;
                const long i0 = std::max<long>(0, -di);
                const long i1 = std::min<long>(long(rows), long(rows) - di);
                for (std::size_t v = 0; v < s; ++v) {
                    const long dj = long(v) - pad;
                    const long j0 = std::max<long>(0, -dj);
                    const long j1 = std::min<long>(long(cols), long(cols) - dj);
                    double acc = 0.0;
                    for (long i = i0; i < i1; ++i) {
                        const double* a = up + std::size_t(i) * cols + std::size_t(j0);
                        const double* b = inp + std::size_t(i + di) * cols + std::size_t(j0 + dj);
                        for (long j = 0; j < j1 - j0; ++j) acc += a[j] * b[j];
                    }
                    grad.at(o, c, u, v) = acc;
                }
            }
        }
    }
    return grad;
}

namespace {

// Catmull-Rom kernel, a = -0.5.
double cubic_weight(double t) {
    t = std::abs(t);
    if (t <= 1.0) return (1.5 * t - 2.5) * t * t + 1.0;
    if (t < 2.0) return ((-0.5 * t + 2.5) * t - 4.0) * t + 2.0;
    return 0.0;
}

struct CubicTap {
    std::array<std::size_t, 4> idx;
    std::array<double, 4> w;
};

std::vector<CubicTap> cubic_taps(std::size_t n, int r) {
    std::vector<CubicTap> taps(n * std::size_t(r));
    for (std::size_t i = 0; i < taps.size(); ++i) {
        const double x = (double(i) + 0.5) / double(r) - 0.5;
        const double base = std::floor(x);
        const double fr = x - base;
        for (int m = 0; m < 4; ++m) {
            long src = long(base) - 1 + m;
            src = std::clamp<long>(src, 0, long(n) - 1);
            taps[i].idx[std::size_t(m)] = std::size_t(src);
            taps[i].w[std::size_t(m)] = cubic_weight(fr + 1.0 - double(m));
        }
    }
    return taps;
}

// axis: 1 = height, 2 = width.
Tensor apply_taps(const Tensor& in, const std::vector<CubicTap>& taps, int axis) {
    const std::size_t ch = in.extent(0);
    const std::size_t rows = in.extent(1);
    const std::size_t cols = in.extent(2);
    if (axis == 1) {
        Tensor out(Shape{ch, taps.size(), cols});
        for (std::size_t c = 0; c < ch; ++c) {
            for (std::size_t i = 0; i < taps.size(); ++i) {
                const CubicTap& t = taps[i];
                const double* r0 = in.data() + (c * rows + t.idx[0]) * cols;
                const double* r1 = in.data() + (c * rows + t.idx[1]) * cols;
                const double* r2 = in.data() + (c * rows + t.idx[2]) * cols;
                const double* r3 = in.data() + (c * rows + t.idx[3]) * cols;
                double* dst = out.data() + (c * taps.size() + i) * cols;
                for (std::size_t j = 0; j < cols; ++j) {
                    dst[j] = t.w[0] * r0[j] + t.w[1] * r1[j] + t.w[2] * r2[j] + t.w[3] * r3[j];
                }
            }
        }
        return out;
    }
    Tensor out(Shape{ch, rows, taps.size()});
    for (std::size_t c = 0; c < ch; ++c) {
        for (std::size_t i = 0; i < rows; ++i) {
            const double* src = in.data() + (c * rows + i) * cols;
            double* dst = out.data() + (c * rows + i) * taps.size();
            for (std::size_t j = 0; j < taps.size(); ++j) {
                const CubicTap& t = taps[j];
                dst[j] = t.w[0] * src[t.idx[0]] + t.w[1] * src[t.idx[1]] +
                         t.w[2] * src[t.idx[2]] + t.w[3] * src[t.idx[3]];
            }
        }
    }
    return out;
}

// Half-sample symmetric reflection: -1 -> 0, n -> n-1 (period 2n).
std::size_t reflect_index(long i, long n) {
    const long p = 2 * n;
    i %= p;
    if (i < 0) i += p;
    if (i >= n) i = p - 1 - i;
    return std::size_t(i);
}

Tensor blur_axis(const Tensor& in, const std::vector<double>& kernel, int axis) {
    const long radius = (long(kernel.size()) - 1) / 2;
    const std::size_t ch = in.extent(0);
    const std::size_t rows = in.extent(1);
    const std::size_t cols = in.extent(2);
    Tensor out(in.shape());
    for (std::size_t c = 0; c < ch; ++c) {
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t j = 0; j < cols; ++j) {
                double acc = 0.0;
                for (long t = -radius; t <= radius; ++t) {
                    std::size_t si = i, sj = j;
                    if (axis == 1) {
                        si = reflect_index(long(i) + t, long(rows));
                    } else {
                        sj = reflect_index(long(j) + t, long(cols));
                    }
                    acc += kernel[std::size_t(t + radius)] * in.data()[(c * rows + si) * cols + sj];
                }
                out.data()[(c * rows + i) * cols + j] = acc;
            }
        }
    }
    return out;
}

} // namespace

Tensor upsample_bicubic(const Tensor& img, int r) {
    if (img.rank() != 3) throw DimensionError("upsample_bicubic: input must be rank 3 [C, m, n]");
    if (r < 1) throw ConfigError("upsample_bicubic: ratio must be >= 1, got " + std::to_string(r));
    const auto row_taps = cubic_taps(img.extent(1), r);
    const auto col_taps = cubic_taps(img.extent(2), r);
    Tensor out = apply_taps(apply_taps(img, row_taps, 1), col_taps, 2);
    if (!all_finite(out)) throw NumericError("upsample_bicubic produced non-finite values");
    return out;
}

Tensor gaussian_blur_downsample(const Tensor& img, int r, double sigma) {
    if (img.rank() != 3) {
        throw DimensionError("gaussian_blur_downsample: input must be rank 3 [C, M, N]");
    }
    if (r < 1) throw ConfigError("gaussian_blur_downsample: ratio must be >= 1");
    if (!(sigma > 0.0)) throw ConfigError("gaussian_blur_downsample: sigma must be > 0");
    const std::size_t rows = img.extent(1);
    const std::size_t cols = img.extent(2);
    if (rows % std::size_t(r) != 0 || cols % std::size_t(r) != 0) {
        throw DimensionError("gaussian_blur_downsample: extents must be divisible by the ratio");
    }

    const long radius = long(std::ceil(3.0 * sigma));
    std::vector<double> kernel(std::size_t(2 * radius + 1));
    double norm = 0.0;
    for (long t = -radius; t <= radius; ++t) {
        const double w = std::exp(-double(t * t) / (2.0 * sigma * sigma));
        kernel[std::size_t(t + radius)] = w;
        norm += w;
    }
    for (double& w : kernel) w /= norm;

    const Tensor blurred = blur_axis(blur_axis(img, kernel, 1), kernel, 2);

    const std::size_t ch = img.extent(0);
    const std::size_t orows = rows / std::size_t(r);
    const std::size_t ocols = cols / std::size_t(r);
    Tensor out(Shape{ch, orows, ocols});
    for (std::size_t c = 0; c < ch; ++c) {
        for (std::size_t i = 0; i < orows; ++i) {
            for (std::size_t j = 0; j < ocols; ++j) {
                out.at(c, i, j) = blurred.at(c, i * std::size_t(r), j * std::size_t(r));
            }
        }
    }
    if (!all_finite(out)) throw NumericError("gaussian_blur_downsample produced non-finite values");
    return out;
}

FilterBank scale_bank(const FilterBank& bank, double factor) {
    Tensor k = bank.kernels();
    k *= factor;
    return FilterBank(std::move(k));
}

} // namespace scsc
