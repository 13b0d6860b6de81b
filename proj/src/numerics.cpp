#include "mifi/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mifi {

std::vector<double> softmax(const std::vector<double>& logits) {
    if (logits.empty()) throw InvalidInputError("softmax: need at least one logit");
    for (double z : logits) {
        if (!std::isfinite(z)) throw InvalidInputError("softmax: non-finite logit");
    }
    double zmax = *std::max_element(logits.begin(), logits.end());
    std::vector<double> out(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - zmax);
        sum += out[i];
    }
    for (double& p : out) {
        p /= sum;
        // exp underflow can produce exact zeros; keep outputs strictly positive.
        if (p <= 0.0) p = std::numeric_limits<double>::min();
        if (p > 1.0) p = 1.0;
    }
    return out;
}

std::vector<double> global_average_pool(const Tensor& feature) {
    require_rank(feature, 4, "global_average_pool");
    std::size_t C = feature.dims[0];
    std::size_t cell = feature.dims[1] * feature.dims[2] * feature.dims[3];
    std::vector<double> pooled(C);
    const float* p = feature.data.data();
    for (std::size_t c = 0; c < C; ++c) {
        double acc = 0.0;
        for (std::size_t i = 0; i < cell; ++i) acc += p[c * cell + i];
        pooled[c] = acc / static_cast<double>(cell);
    }
    return pooled;
}

} // namespace mifi
