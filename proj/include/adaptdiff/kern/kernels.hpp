#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>

namespace adaptdiff::kern {

enum class Isa { scalar = 0, avx2 = 1 };

// Flat kernel table. All convolutions are stride 1; 3x3 kernels use zero
// padding of one pixel, carried in a caller-provided scratch buffer `pad`
// of at least C*(H+2)*(W+2) floats.
//
// Weight layouts: conv3x3 K×C×3×3, conv1x1 K×C. `bias` may be null.
// Gradient kernels accumulate (+=) into dwt / dbias.
struct Ops {
    void (*conv3x3)(const float* in, int C, int H, int W, const float* wt, const float* bias,
                    float* out, int K, float* pad);
    void (*conv3x3_wgrad)(const float* in, int C, int H, int W, const float* dout, int K,
                          float* dwt, float* dbias, float* pad);
    void (*conv1x1)(const float* in, int C, int HW, const float* wt, const float* bias,
                    float* out, int K);
    void (*conv1x1_wgrad)(const float* in, int C, int HW, const float* dout, int K, float* dwt,
                          float* dbias);
    void (*silu)(const float* x, float* y, size_t n);
    void (*silu_bwd)(const float* x, const float* dy, float* dx, size_t n);
    void (*sigmoid)(const float* x, float* y, size_t n);
    // y = (x + a) * b + c
    void (*shift_scale_add)(const float* x, float a, float b, float c, float* y, size_t n);
    // y = x * g + b, elementwise maps
    void (*mul_add_maps)(const float* x, const float* g, const float* b, float* y, size_t n);
    // y += a * x
    void (*axpy)(const float* x, float a, float* y, size_t n);
    void (*sum_sq)(const float* x, size_t n, double* sum, double* sumsq);
    // Adam step; bc1/bc2 are the 1/(1-beta^t) bias corrections.
    void (*adam)(float* w, const float* g, float* m, float* v, size_t n, float lr, float b1,
                 float b2, float eps, float bc1, float bc2);
};

// Active table. Selected once: AVX2+FMA when the CPU supports it, overridable
// with ADAPTDIFF_SIMD=scalar|avx2.
const Ops& ops();
Isa active_isa();
const char* isa_name(Isa isa);
bool avx2_supported();
// Direct table access, used by the equivalence tests.
const Ops& table(Isa isa);

// ---- shared helpers (identical for every lane) ----

// Copies C×H×W into a zero-padded C×(H+2)×(W+2) buffer.
template <typename T>
inline void pad_input(const T* in, int C, int H, int W, T* pad) {
    const int pw = W + 2;
    for (int c = 0; c < C; ++c) {
        T* p = pad + static_cast<size_t>(c) * (H + 2) * pw;
        const T* s = in + static_cast<size_t>(c) * H * W;
        for (int x = 0; x < pw; ++x) p[x] = T(0);
        for (int y = 0; y < H; ++y) {
            T* row = p + static_cast<size_t>(y + 1) * pw;
            row[0] = T(0);
            for (int x = 0; x < W; ++x) row[1 + x] = s[static_cast<size_t>(y) * W + x];
            row[W + 1] = T(0);
        }
        T* last = p + static_cast<size_t>(H + 1) * pw;
        for (int x = 0; x < pw; ++x) last[x] = T(0);
    }
}

// Input gradient of a 3x3 conv equals a 3x3 conv of dout with the weights
// transposed across in/out channels and spatially flipped. This builds that
// C×K×3×3 tensor so the forward kernel can be reused.
template <typename T>
inline void flip_transpose_3x3(const T* wt, int K, int C, T* out) {
    for (int c = 0; c < C; ++c)
        for (int k = 0; k < K; ++k)
            for (int ky = 0; ky < 3; ++ky)
                for (int kx = 0; kx < 3; ++kx)
                    out[((static_cast<size_t>(c) * K + k) * 3 + ky) * 3 + kx] =
                        wt[((static_cast<size_t>(k) * C + c) * 3 + (2 - ky)) * 3 + (2 - kx)];
}

// ---- reference implementations, templated on the scalar type ----
// The float instantiation is the dispatchable scalar lane; the double
// instantiation backs the 64-bit gradient-check path directly.
namespace ref {

template <typename T>
void conv3x3(const T* in, int C, int H, int W, const T* wt, const T* bias, T* out, int K,
             T* pad) {
    pad_input(in, C, H, W, pad);
    const int pw = W + 2;
    const size_t plane = static_cast<size_t>(H + 2) * pw;
    for (int k = 0; k < K; ++k) {
        T* o = out + static_cast<size_t>(k) * H * W;
        const T b = bias ? bias[k] : T(0);
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                T acc = b;
                const T* wk = wt + static_cast<size_t>(k) * C * 9;
                for (int c = 0; c < C; ++c) {
                    const T* p = pad + c * plane + static_cast<size_t>(y) * pw + x;
                    const T* w9 = wk + static_cast<size_t>(c) * 9;
                    acc += w9[0] * p[0] + w9[1] * p[1] + w9[2] * p[2];
                    p += pw;
                    acc += w9[3] * p[0] + w9[4] * p[1] + w9[5] * p[2];
                    p += pw;
                    acc += w9[6] * p[0] + w9[7] * p[1] + w9[8] * p[2];
                }
                o[static_cast<size_t>(y) * W + x] = acc;
            }
        }
    }
}

template <typename T>
void conv3x3_wgrad(const T* in, int C, int H, int W, const T* dout, int K, T* dwt, T* dbias,
                   T* pad) {
    pad_input(in, C, H, W, pad);
    const int pw = W + 2;
    const size_t plane = static_cast<size_t>(H + 2) * pw;
    for (int k = 0; k < K; ++k) {
        const T* dk = dout + static_cast<size_t>(k) * H * W;
        if (dbias) {
            T s = T(0);
            for (size_t i = 0; i < static_cast<size_t>(H) * W; ++i) s += dk[i];
            dbias[k] += s;
        }
        for (int c = 0; c < C; ++c) {
            T acc[9] = {};
            for (int y = 0; y < H; ++y) {
                const T* dr = dk + static_cast<size_t>(y) * W;
                const T* p = pad + c * plane + static_cast<size_t>(y) * pw;
                for (int x = 0; x < W; ++x) {
                    const T d = dr[x];
                    acc[0] += d * p[x];
                    acc[1] += d * p[x + 1];
                    acc[2] += d * p[x + 2];
                    acc[3] += d * p[pw + x];
                    acc[4] += d * p[pw + x + 1];
                    acc[5] += d * p[pw + x + 2];
                    acc[6] += d * p[2 * pw + x];
                    acc[7] += d * p[2 * pw + x + 1];
                    acc[8] += d * p[2 * pw + x + 2];
                }
            }
            T* dw = dwt + (static_cast<size_t>(k) * C + c) * 9;
            for (int i = 0; i < 9; ++i) dw[i] += acc[i];
        }
    }
}

template <typename T>
void conv1x1(const T* in, int C, int HW, const T* wt, const T* bias, T* out, int K) {
    for (int k = 0; k < K; ++k) {
        T* o = out + static_cast<size_t>(k) * HW;
        const T b = bias ? bias[k] : T(0);
        for (int i = 0; i < HW; ++i) o[i] = b;
        for (int c = 0; c < C; ++c) {
            const T w = wt[static_cast<size_t>(k) * C + c];
            const T* s = in + static_cast<size_t>(c) * HW;
            for (int i = 0; i < HW; ++i) o[i] += w * s[i];
        }
    }
}

template <typename T>
void conv1x1_wgrad(const T* in, int C, int HW, const T* dout, int K, T* dwt, T* dbias) {
    for (int k = 0; k < K; ++k) {
        const T* dk = dout + static_cast<size_t>(k) * HW;
        if (dbias) {
            T s = T(0);
            for (int i = 0; i < HW; ++i) s += dk[i];
            dbias[k] += s;
        }
        for (int c = 0; c < C; ++c) {
            const T* s = in + static_cast<size_t>(c) * HW;
            T acc = T(0);
            for (int i = 0; i < HW; ++i) acc += dk[i] * s[i];
            dwt[static_cast<size_t>(k) * C + c] += acc;
        }
    }
}

template <typename T>
inline T sigmoid1(T x) {
    return T(1) / (T(1) + std::exp(-x));
}

template <typename T>
void silu(const T* x, T* y, size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] = x[i] * sigmoid1(x[i]);
}

template <typename T>
void silu_bwd(const T* x, const T* dy, T* dx, size_t n) {
    for (size_t i = 0; i < n; ++i) {
        const T s = sigmoid1(x[i]);
        dx[i] = dy[i] * (s * (T(1) + x[i] * (T(1) - s)));
    }
}

template <typename T>
void sigmoid(const T* x, T* y, size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] = sigmoid1(x[i]);
}

template <typename T>
void shift_scale_add(const T* x, T a, T b, T c, T* y, size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] = (x[i] + a) * b + c;
}

template <typename T>
void mul_add_maps(const T* x, const T* g, const T* b, T* y, size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] = x[i] * g[i] + b[i];
}

template <typename T>
void axpy(const T* x, T a, T* y, size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

template <typename T>
void sum_sq(const T* x, size_t n, double* sum, double* sumsq) {
    double s = 0.0, q = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double v = static_cast<double>(x[i]);
        s += v;
        q += v * v;
    }
    *sum = s;
    *sumsq = q;
}

template <typename T>
void adam(T* w, const T* g, T* m, T* v, size_t n, T lr, T b1, T b2, T eps, T bc1, T bc2) {
    for (size_t i = 0; i < n; ++i) {
        m[i] = b1 * m[i] + (T(1) - b1) * g[i];
        v[i] = b2 * v[i] + (T(1) - b2) * g[i] * g[i];
        const T mh = m[i] * bc1;
        const T vh = v[i] * bc2;
        w[i] -= lr * mh / (std::sqrt(vh) + eps);
    }
}

}  // namespace ref
}  // namespace adaptdiff::kern
