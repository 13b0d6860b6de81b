#pragma once

#include <cstddef>
#include <vector>

#include "mifi/fusion.hpp"
#include "mifi/rng.hpp"
#include "mifi/tensor.hpp"

namespace mifi {

// Pooled-linear classifier: logits = weight * pooled + bias. Parameters are
// stored in f32 (same precision as features); all math runs in f64.
struct HeadParams {
    std::size_t n_classes = 0;
    std::size_t dim = 0;                 // pooled feature length D
    std::vector<float> weight;           // n_classes x dim, row-major
    std::vector<float> bias;             // n_classes

    bool finite() const;
};

struct SgdConfig {
    double lr0 = 0.1;
    std::vector<int> decay_epochs = {30, 50};
    double decay_factor = 0.1;
    int epochs = 100;
    int batch_size = 32;

    void validate() const;
};

struct HeadOutput {
    std::vector<double> pooled;
    std::vector<double> logits;
    std::vector<double> probs;
};

struct HeadGrads {
    std::vector<double> grad_weight; // n_classes x dim
    std::vector<double> grad_bias;   // n_classes
};

// weight ~ N(0, 0.01), bias = 0, drawn from the given stream.
HeadParams init_head(std::size_t n_classes, std::size_t dim, Rng& rng);

// Forward over an already-pooled feature vector.
HeadOutput head_forward_pooled(const std::vector<double>& pooled, const HeadParams& params);

// Pool the fused tensor, then linear + softmax.
HeadOutput head_forward(const FusedFeature& fused, const HeadParams& params);
HeadOutput head_forward(const Tensor& feature, const HeadParams& params);

// grad_weight = outer(grad_logits, pooled); grad_bias = grad_logits.
HeadGrads head_backward(const std::vector<double>& pooled,
                        const std::vector<double>& grad_logits);

// In-place params -= lr * grads. Rejects non-finite gradients.
void sgd_step(HeadParams& params, const HeadGrads& grads, double lr);

// lr0 with decay_factor applied once per decay epoch already reached.
double lr_at(int epoch, const SgdConfig& config);

} // namespace mifi
