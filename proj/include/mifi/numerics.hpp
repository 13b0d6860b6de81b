#pragma once

#include <vector>

#include "mifi/tensor.hpp"

namespace mifi {

// Stable softmax (max-subtraction). Every output lies in (0,1] and the vector
// sums to 1 within 1e-6. Non-finite logits are rejected.
std::vector<double> softmax(const std::vector<double>& logits);

// Per-channel mean over the T*W*H cells of a rank-4 (C,T,W,H) tensor.
// Accumulates in double so pooling error stays below test tolerances.
std::vector<double> global_average_pool(const Tensor& feature);

} // namespace mifi
