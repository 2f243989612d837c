// Independent reference computations used as test oracles. Everything here
// is deliberately written the slow, obvious way and stays decoupled from
// the library implementations it checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "scsc/random.hpp"
#include "scsc/tensor.hpp"

namespace oracle {

// Direct quadruple-loop correlation with zero padding, one output pixel at
// a time.
inline scsc::Tensor conv2d_same(const scsc::Tensor& input, const scsc::Tensor& kernels) {
    const std::size_t cin = input.extent(0);
    const std::size_t rows = input.extent(1);
    const std::size_t cols = input.extent(2);
    const std::size_t cout = kernels.extent(0);
    const std::size_t s = kernels.extent(2);
    const long pad = long(s - 1) / 2;
    scsc::Tensor out(scsc::Shape{cout, rows, cols}, 0.0);
    for (std::size_t o = 0; o < cout; ++o) {
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t j = 0; j < cols; ++j) {
                double acc = 0.0;
                for (std::size_t c = 0; c < cin; ++c) {
                    for (std::size_t u = 0; u < s; ++u) {
                        for (std::size_t v = 0; v < s; ++v) {
                            const long ii = long(i) + long(u) - pad;
                            const long jj = long(j) + long(v) - pad;
                            if (ii < 0 || jj < 0 || ii >= long(rows) || jj >= long(cols)) {
                                continue;
                            }
                            acc += input.at(c, std::size_t(ii), std::size_t(jj)) *
                                   kernels.at(o, c, u, v);
                        }
                    }
                }
                out.at(o, i, j) = acc;
            }
        }
    }
    return out;
}

// 1-D prox oracle: dense grid followed by ternary refinement of the convex
// objective 0.5*(u-x)^2 + penalty(u).
template <class Penalty>
double prox_argmin(double x, Penalty&& penalty, double lo, double hi) {
    const auto f = [&](double u) { return 0.5 * (u - x) * (u - x) + penalty(u); };
    const int grid = 2001;
    double best_u = lo, best_f = f(lo);
    for (int i = 1; i < grid; ++i) {
        const double u = lo + (hi - lo) * double(i) / double(grid - 1);
        const double fu = f(u);
        if (fu < best_f) {
            best_f = fu;
            best_u = u;
        }
    }
    double a = best_u - (hi - lo) / double(grid - 1);
    double b = best_u + (hi - lo) / double(grid - 1);
    for (int it = 0; it < 200; ++it) {
        const double m1 = a + (b - a) / 3.0;
        const double m2 = b - (b - a) / 3.0;
        if (f(m1) <= f(m2)) {
            b = m2;
        } else {
            a = m1;
        }
    }
    return 0.5 * (a + b);
}

inline double soft_prox_objective(double u, double x, double g) {
    return 0.5 * (u - x) * (u - x) + g * std::abs(u);
}

inline double coupled_prox_objective(double u, double x, double s, double g) {
    return 0.5 * (u - x) * (u - x) + g * (std::abs(u) + std::abs(u - s));
}

// Largest eigenvalue of a symmetric matrix by cyclic Jacobi rotations; an
// algorithm unrelated to power iteration.
inline double jacobi_max_eigenvalue(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        }
        if (off < 1e-24) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                const double tau = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (tau >= 0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a[i][p], aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double api = a[p][i], aqi = a[q][i];
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
            }
        }
    }
    double best = a[0][0];
    for (std::size_t i = 1; i < n; ++i) best = std::max(best, a[i][i]);
    return best;
}

inline scsc::Tensor random_tensor(const scsc::Shape& shape, scsc::Rng& rng, double lo = -1.0,
                                  double hi = 1.0) {
    scsc::Tensor t(shape);
    for (double& v : t.values()) v = rng.uniform(lo, hi);
    return t;
}

inline scsc::FilterBank random_bank(std::size_t cout, std::size_t cin, std::size_t s,
                                    scsc::Rng& rng, double scale = 1.0) {
    scsc::Tensor k(scsc::Shape{cout, cin, s, s});
    for (double& v : k.values()) v = scale * rng.uniform(-1.0, 1.0);
    return scsc::FilterBank(std::move(k));
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

} // namespace oracle
