#pragma once

#include "scsc/prox.hpp"
#include "scsc/tensor.hpp"

namespace scsc {

/// One unrolled iteration: residual u = input - decode * state,
/// preact a = state + encode * u, state' = prox(a). The classical solvers
/// and the network run this exact computation, which is what makes their
/// trajectories coincide under tied weights.
struct UnrollStep {
    Tensor residual; // u
    Tensor preact;   // a
    Tensor state;    // prox(a)
};

UnrollStep ista_step_soft(const Tensor& state, const FilterBank& encode,
                          const FilterBank& decode, const Tensor& input,
                          const prox::ThresholdVector& gamma);

UnrollStep ista_step_piecewise(const Tensor& state, const FilterBank& encode,
                               const FilterBank& decode, const Tensor& input,
                               const Tensor& side,
                               const prox::ThresholdVector& gamma);

/// First iteration from a zero state, where the decode term vanishes:
/// state = prox(encode * input). Bit-identical to the generic step applied
/// to a zero state.
struct NullStep {
    Tensor preact;
    Tensor state;
};

NullStep ista_null_step_soft(const FilterBank& encode, const Tensor& input,
                             const prox::ThresholdVector& gamma);

NullStep ista_null_step_piecewise(const FilterBank& encode, const Tensor& input,
                                  const Tensor& side,
                                  const prox::ThresholdVector& gamma);

} // namespace scsc
