#include "scsc/unroll.hpp"

namespace scsc {

UnrollStep ista_step_soft(const Tensor& state, const FilterBank& encode,
                          const FilterBank& decode, const Tensor& input,
                          const prox::ThresholdVector& gamma) {
    UnrollStep step;
    step.residual = input - conv2d_same(state, decode);
    step.preact = state + conv2d_same(step.residual, encode);
    step.state = prox::soft_threshold(step.preact, gamma);
    return step;
}

UnrollStep ista_step_piecewise(const Tensor& state, const FilterBank& encode,
                               const FilterBank& decode, const Tensor& input,
                               const Tensor& side,
                               const prox::ThresholdVector& gamma) {
    UnrollStep step;
    step.residual = input - conv2d_same(state, decode);
    step.preact = state + conv2d_same(step.residual, encode);
    step.state = prox::piecewise_soft_threshold(step.preact, side, gamma);
    return step;
}

NullStep ista_null_step_soft(const FilterBank& encode, const Tensor& input,
                             const prox::ThresholdVector& gamma) {
    NullStep step;
    step.preact = conv2d_same(input, encode);
    step.state = prox::soft_threshold(step.preact, gamma);
    return step;
}

NullStep ista_null_step_piecewise(const FilterBank& encode, const Tensor& input,
                                  const Tensor& side,
                                  const prox::ThresholdVector& gamma) {
    NullStep step;
    step.preact = conv2d_same(input, encode);
    step.state = prox::piecewise_soft_threshold(step.preact, side, gamma);
    return step;
}

} // namespace scsc
