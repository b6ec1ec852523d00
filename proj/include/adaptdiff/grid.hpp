#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace adaptdiff {

// Row-major H×W plane. ImageGrid holds real values (usually in [0,1] or
// [-1,1] model space), BinaryMask holds {0,1}.
template <typename T>
struct Grid {
    int h = 0;
    int w = 0;
    std::vector<T> v;

    Grid() = default;
    Grid(int h_, int w_, T fill = T(0)) : h(h_), w(w_), v(static_cast<size_t>(h_) * w_, fill) {
        if (h_ <= 0 || w_ <= 0) throw std::invalid_argument("Grid: non-positive dimensions");
    }

    size_t size() const { return v.size(); }
    T* data() { return v.data(); }
    const T* data() const { return v.data(); }

    T& at(int y, int x) { return v[static_cast<size_t>(y) * w + x]; }
    const T& at(int y, int x) const { return v[static_cast<size_t>(y) * w + x]; }

    T* row(int y) { return v.data() + static_cast<size_t>(y) * w; }
    const T* row(int y) const { return v.data() + static_cast<size_t>(y) * w; }

    bool same_shape(const Grid& o) const { return h == o.h && w == o.w; }

    bool operator==(const Grid& o) const { return h == o.h && w == o.w && v == o.v; }
};

using ImageGrid = Grid<float>;
using BinaryMask = Grid<uint8_t>;

inline void require_same_shape(int ah, int aw, int bh, int bw, const std::string& what) {
    if (ah != bh || aw != bw) {
        throw std::invalid_argument(what + ": shape mismatch " + std::to_string(ah) + "x" +
                                    std::to_string(aw) + " vs " + std::to_string(bh) + "x" +
                                    std::to_string(bw));
    }
}

template <typename A, typename B>
inline void require_same_shape(const Grid<A>& a, const Grid<B>& b, const std::string& what) {
    require_same_shape(a.h, a.w, b.h, b.w, what);
}

// Nearest-neighbor resample (used to bring masks to a coarser network level).
template <typename T>
Grid<T> resample_nearest(const Grid<T>& src, int oh, int ow) {
    Grid<T> out(oh, ow);
    for (int y = 0; y < oh; ++y) {
        int sy = static_cast<int>((static_cast<int64_t>(y) * src.h) / oh);
        for (int x = 0; x < ow; ++x) {
            int sx = static_cast<int>((static_cast<int64_t>(x) * src.w) / ow);
            out.at(y, x) = src.at(sy, sx);
        }
    }
    return out;
}

}  // namespace adaptdiff
