#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mifi/tensor.hpp"

namespace mifi {

enum class FusionMode {
    Sum,            // element-wise add, dims preserved
    ChannelConcat,  // (2C,T,W,H)
    TemporalConcat, // (C,2T,W,H)
    EarlyTemporal,  // temporal concat applied at the input level
};

std::string fusion_mode_name(FusionMode m);
FusionMode fusion_mode_from_name(const std::string& name); // sum|concat-c|concat-t|early

struct FusedFeature {
    Tensor tensor;
    FusionMode mode;
    std::pair<std::vector<std::size_t>, std::vector<std::size_t>> source_shapes;
};

FusedFeature fuse_sum(const Tensor& a, const Tensor& b);
FusedFeature fuse_channel_concat(const Tensor& a, const Tensor& b);
FusedFeature fuse_temporal_concat(const Tensor& a, const Tensor& b);

// Input-level fusion: same concatenation along the temporal axis, but applied
// to raw input cubes before any feature mapping.
Tensor fuse_early(const Tensor& a_frames, const Tensor& b_frames);

// Apply the configured operator to an ordered view list (camera-id order),
// folding left for more than two views.
FusedFeature fuse_views(FusionMode mode, const std::vector<const Tensor*>& views);

} // namespace mifi
