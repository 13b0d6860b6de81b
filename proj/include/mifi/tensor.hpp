#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mifi/error.hpp"

namespace mifi {

// Dense row-major float tensor. Feature maps are rank-4 (C,T,W,H) but the
// container format permits rank 1..8, so dims are dynamic.
struct Tensor {
    std::vector<std::size_t> dims;
    std::vector<float> data;

    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> d) : dims(std::move(d)) {
        data.assign(size(), 0.0f);
    }

    Tensor(std::vector<std::size_t> d, std::vector<float> v)
        : dims(std::move(d)), data(std::move(v)) {
        if (data.size() != size()) {
            throw ShapeError("tensor data size " + std::to_string(data.size()) +
                             " does not match dims product " + std::to_string(size()));
        }
    }

    std::size_t rank() const noexcept { return dims.size(); }

    std::size_t size() const noexcept {
        std::size_t n = 1;
        for (std::size_t d : dims) n *= d;
        return dims.empty() ? 0 : n;
    }

    // Flat offset for a rank-4 index. Callers on hot paths use this with
    // unchecked operator[] on data.
    std::size_t offset4(std::size_t c, std::size_t t, std::size_t w, std::size_t h) const {
        return ((c * dims[1] + t) * dims[2] + w) * dims[3] + h;
    }

    float& at4(std::size_t c, std::size_t t, std::size_t w, std::size_t h) {
        check_index4(c, t, w, h);
        return data[offset4(c, t, w, h)];
    }

    float at4(std::size_t c, std::size_t t, std::size_t w, std::size_t h) const {
        check_index4(c, t, w, h);
        return data[offset4(c, t, w, h)];
    }

    bool same_shape(const Tensor& o) const noexcept { return dims == o.dims; }

    std::string shape_str() const {
        std::string s = "(";
        for (std::size_t i = 0; i < dims.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(dims[i]);
        }
        s += ")";
        return s;
    }

private:
    void check_index4(std::size_t c, std::size_t t, std::size_t w, std::size_t h) const {
        if (rank() != 4) {
            throw ShapeError("expected rank-4 tensor, got rank " + std::to_string(rank()));
        }
        if (c >= dims[0] || t >= dims[1] || w >= dims[2] || h >= dims[3]) {
            throw ShapeError("index out of bounds for shape " + shape_str());
        }
    }
};

// Throws ShapeError unless t has the given rank.
void require_rank(const Tensor& t, std::size_t rank, const std::string& what);

// Throws ShapeError unless a and b have identical dims.
void require_same_shape(const Tensor& a, const Tensor& b, const std::string& what);

} // namespace mifi
