#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace adaptdiff::nets {

// Dense C×H×W activation buffer, channel-major.
template <typename T>
struct Tensor {
    int c = 0, h = 0, w = 0;
    std::vector<T> v;

    Tensor() = default;
    Tensor(int c_, int h_, int w_) : c(c_), h(h_), w(w_), v(static_cast<size_t>(c_) * h_ * w_) {}

    size_t size() const { return v.size(); }
    int hw() const { return h * w; }
    T* data() { return v.data(); }
    const T* data() const { return v.data(); }
    T* chan(int i) { return v.data() + static_cast<size_t>(i) * h * w; }
    const T* chan(int i) const { return v.data() + static_cast<size_t>(i) * h * w; }

    void resize(int c_, int h_, int w_) {
        c = c_;
        h = h_;
        w = w_;
        v.assign(static_cast<size_t>(c_) * h_ * w_, T(0));
    }
    void zero() { std::fill(v.begin(), v.end(), T(0)); }
    bool same_shape(const Tensor& o) const { return c == o.c && h == o.h && w == o.w; }
};

}  // namespace adaptdiff::nets
