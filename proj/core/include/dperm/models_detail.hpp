#pragma once

#include "dperm/models.hpp"

namespace dperm::detail {

// One pass over the dataset. When grad_out is non-null it receives the mean of
// (optionally clipped) per-example gradients plus lambda*w, accumulated with
// exactly the arithmetic of the naive per-example loop. When want_value is
// true the return value is the full objective (mean loss + regularizer);
// otherwise the return value is unspecified.
double glm_accumulate(const LossSpec& spec, const Dataset& ds, const Vec& w,
                      Vec* grad_out, bool clipped, bool want_value);

// Same single-example arithmetic as glm_accumulate, exposed for stochastic
// optimizers: out += clip(grad f_i(w), spec.clip). `out` must be zeroed or
// hold a running sum. Returns the unclipped per-example gradient norm.
double add_example_clipped_gradient(const LossSpec& spec, const FeatureRow& row,
                                    std::int32_t label, const Vec& w, Vec& out);

}  // namespace dperm::detail
