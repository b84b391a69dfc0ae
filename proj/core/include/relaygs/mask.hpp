#pragma once

#include <cmath>

namespace relaygs {

// Stage-1 mask settings.
struct MaskConfig {
    double epsilon = 0.01;        // threshold on sigmoid(mask_logit)
    double mask_logit_init = 2.0; // sigmoid(2) ~ 0.881, i.e. "on" at start
    int stage1_steps = 3000;
};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double sigmoid_grad(double x) {
    const double s = sigmoid(x);
    return s * (1.0 - s);
}

// Hard binary gate: 1 iff sigmoid(mask_logit) > epsilon. The detached
// indicator contributes no gradient; the surrogate path does.
inline double binary_mask(double mask_logit, double epsilon) {
    return sigmoid(mask_logit) > epsilon ? 1.0 : 0.0;
}

// Straight-through rule: dM/dm = sigmoid'(m) regardless of the forward value.
inline double binary_mask_backward(double mask_logit, double d_mask) {
    return sigmoid_grad(mask_logit) * d_mask;
}

// Masked opacity o_hat = M * o.
inline double masked_opacity(double opacity, double mask_value) { return mask_value * opacity; }

}  // namespace relaygs
