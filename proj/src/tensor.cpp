#include "mifi/tensor.hpp"

namespace mifi {

void require_rank(const Tensor& t, std::size_t rank, const std::string& what) {
    if (t.rank() != rank) {
        throw ShapeError(what + ": expected rank-" + std::to_string(rank) +
                         " tensor, got " + t.shape_str());
    }
}

void require_same_shape(const Tensor& a, const Tensor& b, const std::string& what) {
    if (!a.same_shape(b)) {
        throw ShapeError(what + ": shape mismatch " + a.shape_str() + " vs " + b.shape_str());
    }
}

} // namespace mifi
