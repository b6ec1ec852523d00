#include <immintrin.h>

#include <algorithm>

#include "adaptdiff/kern/kernels.hpp"

// AVX2+FMA variants of the float kernels. Compiled with -mavx2 -mfma in its
// own translation unit; only reached through the dispatch table.

namespace adaptdiff::kern {
namespace {

inline float hsum8(__m256 v) {
    __m128 lo = _mm256_castps256_ps128(v);
    __m128 hi = _mm256_extractf128_ps(v, 1);
    lo = _mm_add_ps(lo, hi);
    lo = _mm_add_ps(lo, _mm_movehl_ps(lo, lo));
    lo = _mm_add_ss(lo, _mm_shuffle_ps(lo, lo, 1));
    return _mm_cvtss_f32(lo);
}

// exp on 8 lanes, Cephes-style polynomial (about 1 ulp on the silu range).
inline __m256 exp8(__m256 x) {
    const __m256 hi = _mm256_set1_ps(88.3762626647949f);
    const __m256 lo = _mm256_set1_ps(-88.3762626647949f);
    const __m256 log2e = _mm256_set1_ps(1.44269504088896341f);
    const __m256 c1 = _mm256_set1_ps(0.693359375f);
    const __m256 c2 = _mm256_set1_ps(-2.12194440e-4f);
    const __m256 p0 = _mm256_set1_ps(1.9875691500e-4f);
    const __m256 p1 = _mm256_set1_ps(1.3981999507e-3f);
    const __m256 p2 = _mm256_set1_ps(8.3334519073e-3f);
    const __m256 p3 = _mm256_set1_ps(4.1665795894e-2f);
    const __m256 p4 = _mm256_set1_ps(1.6666665459e-1f);
    const __m256 p5 = _mm256_set1_ps(5.0000001201e-1f);
    const __m256 one = _mm256_set1_ps(1.0f);

    x = _mm256_min_ps(_mm256_max_ps(x, lo), hi);
    __m256 fx = _mm256_round_ps(_mm256_mul_ps(x, log2e),
                                _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    x = _mm256_fnmadd_ps(fx, c1, x);
    x = _mm256_fnmadd_ps(fx, c2, x);
    __m256 z = _mm256_mul_ps(x, x);
    __m256 y = p0;
    y = _mm256_fmadd_ps(y, x, p1);
    y = _mm256_fmadd_ps(y, x, p2);
    y = _mm256_fmadd_ps(y, x, p3);
    y = _mm256_fmadd_ps(y, x, p4);
    y = _mm256_fmadd_ps(y, x, p5);
    y = _mm256_fmadd_ps(y, z, _mm256_add_ps(x, one));
    __m256i imm = _mm256_add_epi32(_mm256_cvtps_epi32(fx), _mm256_set1_epi32(127));
    imm = _mm256_slli_epi32(imm, 23);
    return _mm256_mul_ps(y, _mm256_castsi256_ps(imm));
}

inline __m256 sigmoid8(__m256 x) {
    const __m256 one = _mm256_set1_ps(1.0f);
    __m256 e = exp8(_mm256_sub_ps(_mm256_setzero_ps(), x));
    return _mm256_div_ps(one, _mm256_add_ps(one, e));
}

template <int NV>
void conv3x3_strip(const float* pad_yx, size_t plane, int pw, int C, const float* wk,
                   float bias, float* out_x) {
    __m256 acc[NV];
    for (int i = 0; i < NV; ++i) acc[i] = _mm256_set1_ps(bias);
    const float* pc = pad_yx;
    for (int c = 0; c < C; ++c, pc += plane) {
        const float* w9 = wk + static_cast<size_t>(c) * 9;
        const float* r = pc;
        for (int ky = 0; ky < 3; ++ky, r += pw) {
            const __m256 w0 = _mm256_broadcast_ss(w9 + ky * 3 + 0);
            const __m256 w1 = _mm256_broadcast_ss(w9 + ky * 3 + 1);
            const __m256 w2 = _mm256_broadcast_ss(w9 + ky * 3 + 2);
            for (int i = 0; i < NV; ++i) {
                acc[i] = _mm256_fmadd_ps(_mm256_loadu_ps(r + 8 * i + 0), w0, acc[i]);
                acc[i] = _mm256_fmadd_ps(_mm256_loadu_ps(r + 8 * i + 1), w1, acc[i]);
                acc[i] = _mm256_fmadd_ps(_mm256_loadu_ps(r + 8 * i + 2), w2, acc[i]);
            }
        }
    }
    for (int i = 0; i < NV; ++i) _mm256_storeu_ps(out_x + 8 * i, acc[i]);
}

void conv3x3_avx2(const float* in, int C, int H, int W, const float* wt, const float* bias,
                  float* out, int K, float* pad) {
    pad_input(in, C, H, W, pad);
    const int pw = W + 2;
    const int nfull = W / 8;
    const size_t plane = static_cast<size_t>(H + 2) * pw;
    for (int k = 0; k < K; ++k) {
        const float* wk = wt + static_cast<size_t>(k) * C * 9;
        const float b = bias ? bias[k] : 0.0f;
        float* ok = out + static_cast<size_t>(k) * H * W;
        for (int y = 0; y < H; ++y) {
            float* orow = ok + static_cast<size_t>(y) * W;
            const float* prow = pad + static_cast<size_t>(y) * pw;
            int v = 0;
            while (v < nfull) {
                const int nv = std::min(8, nfull - v);
                const float* p = prow + 8 * v;
                float* o = orow + 8 * v;
                switch (nv) {
                    case 8: conv3x3_strip<8>(p, plane, pw, C, wk, b, o); break;
                    case 7: conv3x3_strip<7>(p, plane, pw, C, wk, b, o); break;
                    case 6: conv3x3_strip<6>(p, plane, pw, C, wk, b, o); break;
                    case 5: conv3x3_strip<5>(p, plane, pw, C, wk, b, o); break;
                    case 4: conv3x3_strip<4>(p, plane, pw, C, wk, b, o); break;
                    case 3: conv3x3_strip<3>(p, plane, pw, C, wk, b, o); break;
                    case 2: conv3x3_strip<2>(p, plane, pw, C, wk, b, o); break;
                    default: conv3x3_strip<1>(p, plane, pw, C, wk, b, o); break;
                }
                v += nv;
            }
            for (int x = nfull * 8; x < W; ++x) {
                float acc = b;
                for (int c = 0; c < C; ++c) {
                    const float* p = pad + c * plane + static_cast<size_t>(y) * pw + x;
                    const float* w9 = wk + static_cast<size_t>(c) * 9;
                    acc += w9[0] * p[0] + w9[1] * p[1] + w9[2] * p[2];
                    p += pw;
                    acc += w9[3] * p[0] + w9[4] * p[1] + w9[5] * p[2];
                    p += pw;
                    acc += w9[6] * p[0] + w9[7] * p[1] + w9[8] * p[2];
                }
                orow[x] = acc;
            }
        }
    }
}

void conv3x3_wgrad_avx2(const float* in, int C, int H, int W, const float* dout, int K,
                        float* dwt, float* dbias, float* pad) {
    pad_input(in, C, H, W, pad);
    const int pw = W + 2;
    const int nfull = W / 8;
    const size_t plane = static_cast<size_t>(H + 2) * pw;
    for (int k = 0; k < K; ++k) {
        const float* dk = dout + static_cast<size_t>(k) * H * W;
        if (dbias) {
            __m256 s = _mm256_setzero_ps();
            size_t n = static_cast<size_t>(H) * W, i = 0;
            for (; i + 8 <= n; i += 8) s = _mm256_add_ps(s, _mm256_loadu_ps(dk + i));
            float tail = 0.0f;
            for (; i < n; ++i) tail += dk[i];
            dbias[k] += hsum8(s) + tail;
        }
        for (int c = 0; c < C; ++c) {
            __m256 acc[9];
            for (auto& a : acc) a = _mm256_setzero_ps();
            float accs[9] = {};
            const float* pc = pad + c * plane;
            for (int y = 0; y < H; ++y) {
                const float* dr = dk + static_cast<size_t>(y) * W;
                const float* p = pc + static_cast<size_t>(y) * pw;
                for (int v = 0; v < nfull; ++v) {
                    const __m256 dv = _mm256_loadu_ps(dr + 8 * v);
                    const float* r = p + 8 * v;
                    for (int ky = 0; ky < 3; ++ky, r += pw) {
                        acc[3 * ky + 0] = _mm256_fmadd_ps(_mm256_loadu_ps(r + 0), dv, acc[3 * ky + 0]);
                        acc[3 * ky + 1] = _mm256_fmadd_ps(_mm256_loadu_ps(r + 1), dv, acc[3 * ky + 1]);
                        acc[3 * ky + 2] = _mm256_fmadd_ps(_mm256_loadu_ps(r + 2), dv, acc[3 * ky + 2]);
                    }
                }
                for (int x = nfull * 8; x < W; ++x) {
                    const float d = dr[x];
                    accs[0] += d * p[x];
                    accs[1] += d * p[x + 1];
                    accs[2] += d * p[x + 2];
                    accs[3] += d * p[pw + x];
                    accs[4] += d * p[pw + x + 1];
                    accs[5] += d * p[pw + x + 2];
                    accs[6] += d * p[2 * pw + x];
                    accs[7] += d * p[2 * pw + x + 1];
                    accs[8] += d * p[2 * pw + x + 2];
                }
            }
            float* dw = dwt + (static_cast<size_t>(k) * C + c) * 9;
            for (int j = 0; j < 9; ++j) dw[j] += hsum8(acc[j]) + accs[j];
        }
    }
}

template <int NV>
void conv1x1_strip(const float* in, int C, size_t hw, const float* wk, float bias, float* out,
                   size_t x0) {
    __m256 acc[NV];
    for (int i = 0; i < NV; ++i) acc[i] = _mm256_set1_ps(bias);
    for (int c = 0; c < C; ++c) {
        const __m256 w = _mm256_broadcast_ss(wk + c);
        const float* s = in + c * hw + x0;
        for (int i = 0; i < NV; ++i)
            acc[i] = _mm256_fmadd_ps(_mm256_loadu_ps(s + 8 * i), w, acc[i]);
    }
    for (int i = 0; i < NV; ++i) _mm256_storeu_ps(out + x0 + 8 * i, acc[i]);
}

void conv1x1_avx2(const float* in, int C, int HW, const float* wt, const float* bias, float* out,
                  int K) {
    const size_t hw = static_cast<size_t>(HW);
    const int nfull = HW / 8;
    for (int k = 0; k < K; ++k) {
        const float* wk = wt + static_cast<size_t>(k) * C;
        const float b = bias ? bias[k] : 0.0f;
        float* ok = out + k * hw;
        int v = 0;
        while (v < nfull) {
            const int nv = std::min(4, nfull - v);
            switch (nv) {
                case 4: conv1x1_strip<4>(in, C, hw, wk, b, ok, 8 * v); break;
                case 3: conv1x1_strip<3>(in, C, hw, wk, b, ok, 8 * v); break;
                case 2: conv1x1_strip<2>(in, C, hw, wk, b, ok, 8 * v); break;
                default: conv1x1_strip<1>(in, C, hw, wk, b, ok, 8 * v); break;
            }
            v += nv;
        }
        for (int i = nfull * 8; i < HW; ++i) {
            float acc = b;
            for (int c = 0; c < C; ++c) acc += wk[c] * in[c * hw + i];
            ok[i] = acc;
        }
    }
}

void conv1x1_wgrad_avx2(const float* in, int C, int HW, const float* dout, int K, float* dwt,
                        float* dbias) {
    const size_t hw = static_cast<size_t>(HW);
    const int nfull = HW / 8;
    for (int k = 0; k < K; ++k) {
        const float* dk = dout + k * hw;
        if (dbias) {
            __m256 s = _mm256_setzero_ps();
            for (int v = 0; v < nfull; ++v) s = _mm256_add_ps(s, _mm256_loadu_ps(dk + 8 * v));
            float tail = 0.0f;
            for (int i = nfull * 8; i < HW; ++i) tail += dk[i];
            dbias[k] += hsum8(s) + tail;
        }
        for (int c = 0; c < C; ++c) {
            const float* s = in + c * hw;
            __m256 acc = _mm256_setzero_ps();
            for (int v = 0; v < nfull; ++v)
                acc = _mm256_fmadd_ps(_mm256_loadu_ps(dk + 8 * v), _mm256_loadu_ps(s + 8 * v), acc);
            float tail = 0.0f;
            for (int i = nfull * 8; i < HW; ++i) tail += dk[i] * s[i];
            dwt[static_cast<size_t>(k) * C + c] += hsum8(acc) + tail;
        }
    }
}

void silu_avx2(const float* x, float* y, size_t n) {
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 v = _mm256_loadu_ps(x + i);
        _mm256_storeu_ps(y + i, _mm256_mul_ps(v, sigmoid8(v)));
    }
    for (; i < n; ++i) y[i] = x[i] * (1.0f / (1.0f + std::exp(-x[i])));
}

void silu_bwd_avx2(const float* x, const float* dy, float* dx, size_t n) {
    const __m256 one = _mm256_set1_ps(1.0f);
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 v = _mm256_loadu_ps(x + i);
        const __m256 s = sigmoid8(v);
        // s * (1 + x * (1 - s))
        const __m256 g = _mm256_mul_ps(s, _mm256_fmadd_ps(v, _mm256_sub_ps(one, s), one));
        _mm256_storeu_ps(dx + i, _mm256_mul_ps(_mm256_loadu_ps(dy + i), g));
    }
    for (; i < n; ++i) {
        const float s = 1.0f / (1.0f + std::exp(-x[i]));
        dx[i] = dy[i] * (s * (1.0f + x[i] * (1.0f - s)));
    }
}

void sigmoid_avx2(const float* x, float* y, size_t n) {
    size_t i = 0;
    for (; i + 8 <= n; i += 8) _mm256_storeu_ps(y + i, sigmoid8(_mm256_loadu_ps(x + i)));
    for (; i < n; ++i) y[i] = 1.0f / (1.0f + std::exp(-x[i]));
}

void shift_scale_add_avx2(const float* x, float a, float b, float c, float* y, size_t n) {
    const __m256 va = _mm256_set1_ps(a), vb = _mm256_set1_ps(b), vc = _mm256_set1_ps(c);
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 v = _mm256_add_ps(_mm256_loadu_ps(x + i), va);
        _mm256_storeu_ps(y + i, _mm256_fmadd_ps(v, vb, vc));
    }
    for (; i < n; ++i) y[i] = (x[i] + a) * b + c;
}

void mul_add_maps_avx2(const float* x, const float* g, const float* b, float* y, size_t n) {
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm256_storeu_ps(y + i, _mm256_fmadd_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(g + i),
                                                _mm256_loadu_ps(b + i)));
    }
    for (; i < n; ++i) y[i] = x[i] * g[i] + b[i];
}

void axpy_avx2(const float* x, float a, float* y, size_t n) {
    const __m256 va = _mm256_set1_ps(a);
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm256_storeu_ps(y + i,
                         _mm256_fmadd_ps(_mm256_loadu_ps(x + i), va, _mm256_loadu_ps(y + i)));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void sum_sq_avx2(const float* x, size_t n, double* sum, double* sumsq) {
    __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
    __m256d q0 = _mm256_setzero_pd(), q1 = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 v = _mm256_loadu_ps(x + i);
        const __m256d lo = _mm256_cvtps_pd(_mm256_castps256_ps128(v));
        const __m256d hi = _mm256_cvtps_pd(_mm256_extractf128_ps(v, 1));
        s0 = _mm256_add_pd(s0, lo);
        s1 = _mm256_add_pd(s1, hi);
        q0 = _mm256_fmadd_pd(lo, lo, q0);
        q1 = _mm256_fmadd_pd(hi, hi, q1);
    }
    alignas(32) double buf[4];
    double s = 0.0, q = 0.0;
    _mm256_store_pd(buf, _mm256_add_pd(s0, s1));
    s = buf[0] + buf[1] + buf[2] + buf[3];
    _mm256_store_pd(buf, _mm256_add_pd(q0, q1));
    q = buf[0] + buf[1] + buf[2] + buf[3];
    for (; i < n; ++i) {
        const double v = x[i];
        s += v;
        q += v * v;
    }
    *sum = s;
    *sumsq = q;
}

void adam_avx2(float* w, const float* g, float* m, float* v, size_t n, float lr, float b1,
               float b2, float eps, float bc1, float bc2) {
    const __m256 vb1 = _mm256_set1_ps(b1), vnb1 = _mm256_set1_ps(1.0f - b1);
    const __m256 vb2 = _mm256_set1_ps(b2), vnb2 = _mm256_set1_ps(1.0f - b2);
    const __m256 vlr = _mm256_set1_ps(lr), veps = _mm256_set1_ps(eps);
    const __m256 vbc1 = _mm256_set1_ps(bc1), vbc2 = _mm256_set1_ps(bc2);
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 gi = _mm256_loadu_ps(g + i);
        __m256 mi = _mm256_fmadd_ps(vnb1, gi, _mm256_mul_ps(vb1, _mm256_loadu_ps(m + i)));
        __m256 vi = _mm256_fmadd_ps(vnb2, _mm256_mul_ps(gi, gi),
                                    _mm256_mul_ps(vb2, _mm256_loadu_ps(v + i)));
        _mm256_storeu_ps(m + i, mi);
        _mm256_storeu_ps(v + i, vi);
        const __m256 mh = _mm256_mul_ps(mi, vbc1);
        const __m256 vh = _mm256_mul_ps(vi, vbc2);
        const __m256 den = _mm256_add_ps(_mm256_sqrt_ps(vh), veps);
        const __m256 upd = _mm256_div_ps(_mm256_mul_ps(vlr, mh), den);
        _mm256_storeu_ps(w + i, _mm256_sub_ps(_mm256_loadu_ps(w + i), upd));
    }
    for (; i < n; ++i) {
        m[i] = b1 * m[i] + (1.0f - b1) * g[i];
        v[i] = b2 * v[i] + (1.0f - b2) * g[i] * g[i];
        w[i] -= lr * (m[i] * bc1) / (std::sqrt(v[i] * bc2) + eps);
    }
}

}  // namespace

const Ops& avx2_table() {
    static const Ops t = {
        &conv3x3_avx2,  &conv3x3_wgrad_avx2, &conv1x1_avx2,        &conv1x1_wgrad_avx2,
        &silu_avx2,     &silu_bwd_avx2,      &sigmoid_avx2,        &shift_scale_add_avx2,
        &mul_add_maps_avx2, &axpy_avx2,      &sum_sq_avx2,         &adam_avx2,
    };
    return t;
}

}  // namespace adaptdiff::kern
