#include "mifi/fusion.hpp"

#include <cstring>

namespace mifi {

namespace {

void check_pair(const Tensor& a, const Tensor& b, const char* what) {
    require_rank(a, 4, what);
    require_rank(b, 4, what);
    require_same_shape(a, b, what);
}

// Concatenate two rank-4 tensors along `axis` (0 = channel, 1 = temporal);
// all other extents must match.
Tensor concat_axis(const Tensor& a, const Tensor& b, std::size_t axis) {
    require_rank(a, 4, "concat");
    require_rank(b, 4, "concat");
    for (std::size_t i = 0; i < 4; ++i) {
        if (i != axis && a.dims[i] != b.dims[i]) {
            throw ShapeError("concat: shape mismatch " + a.shape_str() + " vs " +
                             b.shape_str() + " off axis " + std::to_string(axis));
        }
    }
    std::vector<std::size_t> d = a.dims;
    d[axis] += b.dims[axis];
    Tensor out(d);
    if (axis == 0) {
        // channel is outermost: sources land in contiguous halves
        std::memcpy(out.data.data(), a.data.data(), a.data.size() * sizeof(float));
        std::memcpy(out.data.data() + a.data.size(), b.data.data(),
                    b.data.size() * sizeof(float));
    } else {
        std::size_t C = d[0];
        std::size_t frame = d[2] * d[3];
        std::size_t Ta = a.dims[1], Tb = b.dims[1];
        for (std::size_t c = 0; c < C; ++c) {
            std::memcpy(out.data.data() + c * (Ta + Tb) * frame,
                        a.data.data() + c * Ta * frame, Ta * frame * sizeof(float));
            std::memcpy(out.data.data() + (c * (Ta + Tb) + Ta) * frame,
                        b.data.data() + c * Tb * frame, Tb * frame * sizeof(float));
        }
    }
    return out;
}

Tensor sum_pair(const Tensor& a, const Tensor& b, const char* what) {
    require_rank(a, 4, what);
    require_rank(b, 4, what);
    require_same_shape(a, b, what);
    Tensor out(a.dims);
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        out.data[i] = a.data[i] + b.data[i];
    }
    return out;
}

} // namespace

std::string fusion_mode_name(FusionMode m) {
    switch (m) {
        case FusionMode::Sum: return "sum";
        case FusionMode::ChannelConcat: return "concat-c";
        case FusionMode::TemporalConcat: return "concat-t";
        case FusionMode::EarlyTemporal: return "early";
    }
    return "?";
}

FusionMode fusion_mode_from_name(const std::string& name) {
    if (name == "sum") return FusionMode::Sum;
    if (name == "concat-c") return FusionMode::ChannelConcat;
    if (name == "concat-t") return FusionMode::TemporalConcat;
    if (name == "early") return FusionMode::EarlyTemporal;
    throw ConfigError("unknown fusion mode '" + name +
                      "' (expected sum|concat-c|concat-t|early)");
}

FusedFeature fuse_sum(const Tensor& a, const Tensor& b) {
    return {sum_pair(a, b, "fuse_sum"), FusionMode::Sum, {a.dims, b.dims}};
}

FusedFeature fuse_channel_concat(const Tensor& a, const Tensor& b) {
    check_pair(a, b, "fuse_channel_concat");
    return {concat_axis(a, b, 0), FusionMode::ChannelConcat, {a.dims, b.dims}};
}

FusedFeature fuse_temporal_concat(const Tensor& a, const Tensor& b) {
    check_pair(a, b, "fuse_temporal_concat");
    return {concat_axis(a, b, 1), FusionMode::TemporalConcat, {a.dims, b.dims}};
}

Tensor fuse_early(const Tensor& a_frames, const Tensor& b_frames) {
    check_pair(a_frames, b_frames, "fuse_early");
    return concat_axis(a_frames, b_frames, 1);
}

FusedFeature fuse_views(FusionMode mode, const std::vector<const Tensor*>& views) {
    if (views.empty()) throw InvalidInputError("fuse_views: no views");
    FusedFeature out;
    out.mode = mode;
    out.source_shapes = {views.front()->dims, views.back()->dims};
    out.tensor = *views[0];
    for (std::size_t i = 1; i < views.size(); ++i) {
        switch (mode) {
            case FusionMode::Sum:
                out.tensor = sum_pair(out.tensor, *views[i], "fuse_views");
                break;
            case FusionMode::ChannelConcat:
                out.tensor = concat_axis(out.tensor, *views[i], 0);
                break;
            case FusionMode::TemporalConcat:
            case FusionMode::EarlyTemporal:
                out.tensor = concat_axis(out.tensor, *views[i], 1);
                break;
        }
    }
    return out;
}

} // namespace mifi
