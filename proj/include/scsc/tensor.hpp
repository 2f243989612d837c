#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "scsc/error.hpp"

namespace scsc {

using Shape = std::vector<std::size_t>;

/// Dense row-major array of doubles, rank 1..4.
///
/// Tensors are plain values: copyable, movable, no shared state. Every
/// kernel in this module validates that its output is finite and throws
/// NumericError otherwise; NaN/Inf is an error condition, not a value.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Shape shape, double fill = 0.0);
    static Tensor from_data(Shape shape, std::vector<double> values);

    std::size_t rank() const { return shape_.size(); }
    std::size_t extent(std::size_t axis) const;
    const Shape& shape() const { return shape_; }
    std::size_t numel() const { return data_.size(); }
    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    // Rank-checked element access; not for hot loops.
    double& at(std::size_t i);
    double& at(std::size_t i, std::size_t j);
    double& at(std::size_t c, std::size_t i, std::size_t j);
    double& at(std::size_t o, std::size_t c, std::size_t i, std::size_t j);
    double at(std::size_t i) const;
    double at(std::size_t i, std::size_t j) const;
    double at(std::size_t c, std::size_t i, std::size_t j) const;
    double at(std::size_t o, std::size_t c, std::size_t i, std::size_t j) const;

private:
    Shape shape_;
    std::vector<double> data_;
};

Tensor zeros_like(const Tensor& t);
bool all_finite(const Tensor& t);
void require_same_shape(const Tensor& a, const Tensor& b, const char* what);

Tensor operator+(const Tensor& a, const Tensor& b);
Tensor operator-(const Tensor& a, const Tensor& b);
Tensor operator*(double s, const Tensor& t);
Tensor operator-(const Tensor& t);
Tensor& operator+=(Tensor& a, const Tensor& b);
Tensor& operator-=(Tensor& a, const Tensor& b);
Tensor& operator*=(Tensor& a, double s);

double dot(const Tensor& a, const Tensor& b);
double sum_squares(const Tensor& t);
double norm1(const Tensor& t);
double max_abs(const Tensor& t);
double mean(const Tensor& t);

/// A set of convolution kernels of shape [c_out, c_in, s, s] with odd
/// spatial size s, the carrier for every dictionary and learned layer.
class FilterBank {
public:
    FilterBank() = default;
    explicit FilterBank(Tensor kernels);

    std::size_t out_channels() const { return kernels_.extent(0); }
    std::size_t in_channels() const { return kernels_.extent(1); }
    std::size_t kernel_size() const { return kernels_.extent(2); }

    Tensor& kernels() { return kernels_; }
    const Tensor& kernels() const { return kernels_; }

private:
    Tensor kernels_;
};

/// 2-D correlation with symmetric zero padding of (s-1)/2, stride 1.
/// input [c_in, M, N] * bank [c_out, c_in, s, s] -> [c_out, M, N].
Tensor conv2d_same(const Tensor& input, const FilterBank& bank);

/// Flip both spatial axes and swap the channel roles, so that
/// conv2d_same(., rotate180(bank)) is the adjoint of conv2d_same(., bank):
/// <conv(x, k), y> == <x, conv(y, rotate180(k))> for all compatible x, y.
FilterBank rotate180(const FilterBank& bank);

/// Gradient of conv2d_same with respect to the kernels:
/// grad[o,c,u,v] = sum_{i,j} upstream[o,i,j] * input[c, i+u-p, j+v-p].
Tensor conv2d_same_kernel_grad(const Tensor& input, const Tensor& upstream,
                               std::size_t kernel_size);

/// Catmull-Rom bicubic upsampling (a = -0.5, half-pixel centers, clamped
/// borders). [C, m, n] -> [C, r*m, r*n]; r = 1 is the identity.
Tensor upsample_bicubic(const Tensor& img, int r);

/// Separable Gaussian blur (kernel radius ceil(3*sigma), renormalized,
/// reflective boundary with the edge sample repeated) followed by
/// decimation keeping pixel (0,0) of each r x r cell.
Tensor gaussian_blur_downsample(const Tensor& img, int r, double sigma);

FilterBank scale_bank(const FilterBank& bank, double factor);

} // namespace scsc
