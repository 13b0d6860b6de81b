#include "mifi/head.hpp"

#include <cmath>

#include "mifi/numerics.hpp"

namespace mifi {

bool HeadParams::finite() const {
    for (float w : weight) {
        if (!std::isfinite(w)) return false;
    }
    for (float b : bias) {
        if (!std::isfinite(b)) return false;
    }
    return true;
}

void SgdConfig::validate() const {
    if (!(lr0 > 0.0) || !std::isfinite(lr0)) throw InvalidInputError("lr must be positive");
    if (epochs < 1) throw InvalidInputError("epochs must be >= 1");
    if (batch_size < 1) throw InvalidInputError("batch_size must be >= 1");
    if (!(decay_factor > 0.0 && decay_factor < 1.0)) {
        throw InvalidInputError("decay_factor must be in (0,1)");
    }
    int prev = -1;
    for (int e : decay_epochs) {
        if (e <= prev || e >= epochs) {
            throw InvalidInputError("decay epochs must be strictly increasing and < epochs");
        }
        prev = e;
    }
}

HeadParams init_head(std::size_t n_classes, std::size_t dim, Rng& rng) {
    if (n_classes == 0 || dim == 0) {
        throw InvalidInputError("init_head: n_classes and dim must be positive");
    }
    HeadParams p;
    p.n_classes = n_classes;
    p.dim = dim;
    p.weight = rng_normal(rng, n_classes * dim, 0.0, 0.01);
    p.bias.assign(n_classes, 0.0f);
    return p;
}

HeadOutput head_forward_pooled(const std::vector<double>& pooled, const HeadParams& params) {
    if (pooled.size() != params.dim) {
        throw ShapeError("head_forward: pooled length " + std::to_string(pooled.size()) +
                         " != head dim " + std::to_string(params.dim));
    }
    HeadOutput out;
    out.pooled = pooled;
    out.logits.resize(params.n_classes);
    for (std::size_t r = 0; r < params.n_classes; ++r) {
        double acc = params.bias[r];
        const float* wrow = params.weight.data() + r * params.dim;
        for (std::size_t j = 0; j < params.dim; ++j) {
            acc += static_cast<double>(wrow[j]) * pooled[j];
        }
        out.logits[r] = acc;
    }
    out.probs = softmax(out.logits);
    return out;
}

HeadOutput head_forward(const FusedFeature& fused, const HeadParams& params) {
    return head_forward_pooled(global_average_pool(fused.tensor), params);
}

HeadOutput head_forward(const Tensor& feature, const HeadParams& params) {
    return head_forward_pooled(global_average_pool(feature), params);
}

HeadGrads head_backward(const std::vector<double>& pooled,
                        const std::vector<double>& grad_logits) {
    HeadGrads g;
    g.grad_weight.resize(grad_logits.size() * pooled.size());
    for (std::size_t r = 0; r < grad_logits.size(); ++r) {
        for (std::size_t j = 0; j < pooled.size(); ++j) {
            g.grad_weight[r * pooled.size() + j] = grad_logits[r] * pooled[j];
        }
    }
    g.grad_bias = grad_logits;
    return g;
}

void sgd_step(HeadParams& params, const HeadGrads& grads, double lr) {
    if (!(lr > 0.0)) throw InvalidInputError("sgd_step: lr must be positive");
    if (grads.grad_weight.size() != params.weight.size() ||
        grads.grad_bias.size() != params.bias.size()) {
        throw ShapeError("sgd_step: gradient shape mismatch");
    }
    for (double g : grads.grad_weight) {
        if (!std::isfinite(g)) throw NumericError("sgd_step: non-finite weight gradient");
    }
    for (double g : grads.grad_bias) {
        if (!std::isfinite(g)) throw NumericError("sgd_step: non-finite bias gradient");
    }
    for (std::size_t i = 0; i < params.weight.size(); ++i) {
        params.weight[i] = static_cast<float>(params.weight[i] - lr * grads.grad_weight[i]);
    }
    for (std::size_t i = 0; i < params.bias.size(); ++i) {
        params.bias[i] = static_cast<float>(params.bias[i] - lr * grads.grad_bias[i]);
    }
}

double lr_at(int epoch, const SgdConfig& config) {
    config.validate();
    if (epoch < 0 || epoch >= config.epochs) {
        throw InvalidInputError("lr_at: epoch " + std::to_string(epoch) + " out of range");
    }
    double lr = config.lr0;
    for (int e : config.decay_epochs) {
        if (epoch >= e) lr *= config.decay_factor;
    }
    return lr;
}

} // namespace mifi
