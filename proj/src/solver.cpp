#include "scsc/solver.hpp"

#include <cmath>
#include <string>

#include "scsc/random.hpp"
#include "scsc/unroll.hpp"

namespace scsc::solver {

namespace {

constexpr double kDescentSlack = 1e-9;

double traced_objective(const Tensor& target, const FilterBank& dict,
                        const Tensor& features, const Tensor* side, double lambda) {
    const Tensor recon = conv2d_same(features, dict);
    double data = 0.0;
    for (std::size_t i = 0; i < target.numel(); ++i) {
        const double r = target[i] - recon[i];
        data += r * r;
    }
    double penalty = norm1(features);
    if (side) penalty += norm1(features - *side);
    return data + 2.0 * lambda * penalty;
}

struct IstaProblem {
    const Tensor& target;
    const FilterBank& dict;
    const Tensor* side; // nullptr for the soft variant
};

Shape feature_shape_for(const IstaProblem& p) {
    return Shape{p.dict.in_channels(), p.target.extent(1), p.target.extent(2)};
}

IstaResult run_ista(const IstaProblem& p, const IstaSettings& st,
                    const Tensor* warm_start) {
    st.validate();
    if (p.target.rank() != 3) throw DimensionError("ista: target must be rank 3 [c, M, N]");
    if (p.target.extent(0) != p.dict.out_channels()) {
        throw DimensionError("ista: target channels do not match dictionary output channels");
    }
    const Shape fshape = feature_shape_for(p);
    if (p.side) {
        if (p.side->shape() != fshape) {
            throw DimensionError("ista: side information shape does not match feature shape");
        }
    }

    const double step = st.step_policy == StepPolicy::fixed
                            ? st.fixed_step
                            : 1.0 / estimate_lipschitz(p.dict, fshape);
    const FilterBank encode = scale_bank(rotate180(p.dict), step);
    const prox::ThresholdVector gamma(p.dict.in_channels(), st.lambda * step);

    Tensor f = warm_start ? *warm_start : Tensor(fshape, 0.0);
    IstaResult result;
    double prev = traced_objective(p.target, p.dict, f, p.side, st.lambda);

    for (int it = 0; it < st.max_iters; ++it) {
        UnrollStep stepped =
            p.side ? ista_step_piecewise(f, encode, p.dict, p.target, *p.side, gamma)
                   : ista_step_soft(f, encode, p.dict, p.target, gamma);
        f = std::move(stepped.state);
        const double obj = traced_objective(p.target, p.dict, f, p.side, st.lambda);
        if (obj > prev + kDescentSlack) {
            throw NumericError("ista: objective increased from " + std::to_string(prev) +
                               " to " + std::to_string(obj) + " (invalid step size?)");
        }
        result.report.objective_trace.push_back(obj);
        const bool stop = std::abs(prev - obj) < st.tol * std::max(std::abs(prev), 1e-30);
        prev = obj;
        if (stop) {
            result.report.converged = true;
            break;
        }
    }
    result.report.iterations_run = int(result.report.objective_trace.size());
    result.features = std::move(f);
    return result;
}

} // namespace

void IstaSettings::validate() const {
    if (max_iters < 1) throw ConfigError("ista settings: max_iters must be >= 1");
    if (!(tol >= 0.0)) throw ConfigError("ista settings: tol must be >= 0");
    if (!(lambda >= 0.0)) throw ConfigError("ista settings: lambda must be >= 0");
    if (step_policy == StepPolicy::fixed && !(fixed_step > 0.0)) {
        throw ConfigError("ista settings: fixed step must be > 0");
    }
}

double objective_csc(const Tensor& image, const FilterBank& dict,
                     const Tensor& features, double lambda) {
    const Tensor recon = conv2d_same(features, dict);
    require_same_shape(image, recon, "objective_csc");
    double data = 0.0;
    for (std::size_t i = 0; i < image.numel(); ++i) {
        const double r = image[i] - recon[i];
        data += r * r;
    }
    return data + lambda * norm1(features);
}

double estimate_lipschitz(const FilterBank& dict, const Shape& feature_shape,
                          int max_iters, double rtol) {
    if (feature_shape.size() != 3) {
        throw DimensionError("estimate_lipschitz: feature shape must be rank 3");
    }
    if (feature_shape[0] != dict.in_channels()) {
        throw DimensionError("estimate_lipschitz: feature channels do not match dictionary");
    }
    const FilterBank adjoint = rotate180(dict);

    Rng rng(0x5c5c00a1u);
    Tensor v(feature_shape);
    for (std::size_t i = 0; i < v.numel(); ++i) v[i] = rng.uniform(-1.0, 1.0);
    v *= 1.0 / std::sqrt(sum_squares(v));

    double eigenvalue = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        const Tensor w = conv2d_same(conv2d_same(v, dict), adjoint);
        const double lam = dot(v, w);
        const double wn = std::sqrt(sum_squares(w));
        if (!(wn > 0.0)) {
            throw NumericError("estimate_lipschitz: degenerate operator (zero bank?)");
        }
        v = (1.0 / wn) * w;
        if (it > 0 && std::abs(lam - eigenvalue) <= rtol * std::max(std::abs(lam), 1e-30)) {
            eigenvalue = lam;
            break;
        }
        eigenvalue = lam;
    }
    if (!(eigenvalue > 0.0)) {
        throw NumericError("estimate_lipschitz: degenerate operator (zero bank?)");
    }
    return eigenvalue;
}

IstaResult ista_csc(const Tensor& image, const FilterBank& dict,
                    const IstaSettings& settings) {
    return run_ista({image, dict, nullptr}, settings, nullptr);
}

IstaResult ista_unique(const Tensor& residual_image, const FilterBank& dict,
                       const IstaSettings& settings) {
    return run_ista({residual_image, dict, nullptr}, settings, nullptr);
}

IstaResult ista_common(const Tensor& residual_image, const FilterBank& dict,
                       const Tensor& side, const IstaSettings& settings) {
    return run_ista({residual_image, dict, &side}, settings, nullptr);
}

AlternateResult alternate_solve(const Tensor& image, const FilterBank& dict_unique,
                                const FilterBank& dict_common, const Tensor& side,
                                const IstaSettings& settings, int rounds) {
    settings.validate();
    if (rounds < 1) throw ConfigError("alternate_solve: rounds must be >= 1");
    if (image.rank() != 3) throw DimensionError("alternate_solve: image must be rank 3");
    const Shape yshape{dict_common.in_channels(), image.extent(1), image.extent(2)};
    if (side.shape() != yshape) {
        throw DimensionError("alternate_solve: side shape does not match common feature shape");
    }

    const auto joint_objective = [&](const Tensor& x, const Tensor& y) {
        const Tensor recon = conv2d_same(x, dict_unique) + conv2d_same(y, dict_common);
        double data = 0.0;
        for (std::size_t i = 0; i < image.numel(); ++i) {
            const double r = image[i] - recon[i];
            data += r * r;
        }
        return data + 2.0 * settings.lambda * (norm1(x) + norm1(y) + norm1(y - side));
    };

    Tensor x(Shape{dict_unique.in_channels(), image.extent(1), image.extent(2)}, 0.0);
    Tensor y(yshape, 0.0);
    AlternateResult result;
    bool converged = false;
    for (int round = 0; round < rounds; ++round) {
        const Tensor l_hat = image - conv2d_same(y, dict_common);
        IstaResult rx = run_ista({l_hat, dict_unique, nullptr}, settings,
                                 round == 0 ? nullptr : &x);
        x = std::move(rx.features);
        result.report.objective_trace.push_back(joint_objective(x, y));

        const Tensor l_tilde = image - conv2d_same(x, dict_unique);
        IstaResult ry = run_ista({l_tilde, dict_common, &side}, settings,
                                 round == 0 ? nullptr : &y);
        y = std::move(ry.features);
        result.report.objective_trace.push_back(joint_objective(x, y));
        converged = rx.report.converged && ry.report.converged;
    }
    result.report.iterations_run = int(result.report.objective_trace.size());
    result.report.converged = converged;
    result.unique_features = std::move(x);
    result.common_features = std::move(y);
    return result;
}

double fixed_point_residual(const Tensor& target, const FilterBank& dict,
                            const Tensor* side, const Tensor& features,
                            double step, double lambda) {
    const FilterBank encode = scale_bank(rotate180(dict), step);
    const prox::ThresholdVector gamma(dict.in_channels(), lambda * step);
    const UnrollStep next =
        side ? ista_step_piecewise(features, encode, dict, target, *side, gamma)
             : ista_step_soft(features, encode, dict, target, gamma);
    return max_abs(features - next.state);
}

} // namespace scsc::solver
