#include "datt/kernels.hpp"

#include <algorithm>
#include <cassert>

namespace datt::kernels {

namespace {

// First output column whose receptive field column ix = ox*stride - pad + kx
// is >= 0. Clamped to 0, so an over-estimate for negative values is harmless.
inline int first_valid_ox(int pad, int kx, int stride) {
    int a = pad - kx;
    if (a <= 0) return 0;
    return (a + stride - 1) / stride;
}

// One past the last output column with ix < in_w.
inline int last_valid_ox(int in_w, int pad, int kx, int stride, int out_w) {
    int num = in_w - 1 + pad - kx;
    if (num < 0) return 0;
    return std::min(out_w, num / stride + 1);
}

}  // namespace

// ---------------------------------------------------------------------------
// Serial reference. Straightforward loops, one output element at a time.
// ---------------------------------------------------------------------------

namespace serial {

void conv2d(const float* in, Shape is, const float* w, const float* bias, float* out, Shape os,
            const ConvSpec& cs) {
    const int K = cs.k, S = cs.stride, P = cs.pad;
    for (int oc = 0; oc < os.c; ++oc) {
        for (int oy = 0; oy < os.h; ++oy) {
            for (int ox = 0; ox < os.w; ++ox) {
                float acc = bias ? bias[oc] : 0.0f;
                for (int ic = 0; ic < is.c; ++ic) {
                    for (int ky = 0; ky < K; ++ky) {
                        int iy = oy * S - P + ky;
                        if (iy < 0 || iy >= is.h) continue;
                        for (int kx = 0; kx < K; ++kx) {
                            int ix = ox * S - P + kx;
                            if (ix < 0 || ix >= is.w) continue;
                            acc += w[((static_cast<size_t>(oc) * is.c + ic) * K + ky) * K + kx] *
                                   in[(static_cast<size_t>(ic) * is.h + iy) * is.w + ix];
                        }
                    }
                }
                out[(static_cast<size_t>(oc) * os.h + oy) * os.w + ox] = acc;
            }
        }
    }
}

void conv2d_backward_input(const float* gout, Shape os, const float* w, float* gin, Shape is,
                           const ConvSpec& cs) {
    const int K = cs.k, S = cs.stride, P = cs.pad;
    for (int ic = 0; ic < is.c; ++ic) {
        for (int iy = 0; iy < is.h; ++iy) {
            for (int ix = 0; ix < is.w; ++ix) {
                float acc = 0.0f;
                for (int oc = 0; oc < os.c; ++oc) {
                    for (int ky = 0; ky < K; ++ky) {
                        int t = iy + P - ky;
                        if (t < 0 || t % S != 0) continue;
                        int oy = t / S;
                        if (oy >= os.h) continue;
                        for (int kx = 0; kx < K; ++kx) {
                            int u = ix + P - kx;
                            if (u < 0 || u % S != 0) continue;
                            int ox = u / S;
                            if (ox >= os.w) continue;
                            acc += gout[(static_cast<size_t>(oc) * os.h + oy) * os.w + ox] *
                                   w[((static_cast<size_t>(oc) * is.c + ic) * K + ky) * K + kx];
                        }
                    }
                }
                gin[(static_cast<size_t>(ic) * is.h + iy) * is.w + ix] += acc;
            }
        }
    }
}

void conv2d_backward_params(const float* gout, Shape os, const float* in, Shape is, float* gw,
                            float* gb, const ConvSpec& cs) {
    const int K = cs.k, S = cs.stride, P = cs.pad;
    for (int oc = 0; oc < os.c; ++oc) {
        for (int ic = 0; ic < is.c; ++ic) {
            for (int ky = 0; ky < K; ++ky) {
                for (int kx = 0; kx < K; ++kx) {
                    float acc = 0.0f;
                    for (int oy = 0; oy < os.h; ++oy) {
                        int iy = oy * S - P + ky;
                        if (iy < 0 || iy >= is.h) continue;
                        for (int ox = 0; ox < os.w; ++ox) {
                            int ix = ox * S - P + kx;
                            if (ix < 0 || ix >= is.w) continue;
                            acc += gout[(static_cast<size_t>(oc) * os.h + oy) * os.w + ox] *
                                   in[(static_cast<size_t>(ic) * is.h + iy) * is.w + ix];
                        }
                    }
                    gw[((static_cast<size_t>(oc) * is.c + ic) * K + ky) * K + kx] += acc;
                }
            }
        }
        if (gb) {
            float acc = 0.0f;
            for (int oy = 0; oy < os.h; ++oy)
                for (int ox = 0; ox < os.w; ++ox)
                    acc += gout[(static_cast<size_t>(oc) * os.h + oy) * os.w + ox];
            gb[oc] += acc;
        }
    }
}

void relu(const float* in, float* out, size_t n) {
    for (size_t i = 0; i < n; ++i) out[i] = in[i] > 0.0f ? in[i] : 0.0f;
}

void relu_backward(const float* gout, const float* out, float* gin, size_t n) {
    for (size_t i = 0; i < n; ++i) gin[i] += out[i] > 0.0f ? gout[i] : 0.0f;
}

void upsample2x_add(const float* src, Shape ss, float* dst, Shape ds) {
    assert(ds.h == 2 * ss.h && ds.w == 2 * ss.w && ds.c == ss.c);
    for (int c = 0; c < ds.c; ++c)
        for (int y = 0; y < ds.h; ++y)
            for (int x = 0; x < ds.w; ++x)
                dst[(static_cast<size_t>(c) * ds.h + y) * ds.w + x] +=
                    src[(static_cast<size_t>(c) * ss.h + y / 2) * ss.w + x / 2];
}

void upsample2x_add_backward(const float* gdst, Shape ds, float* gsrc, Shape ss) {
    assert(ds.h == 2 * ss.h && ds.w == 2 * ss.w && ds.c == ss.c);
    for (int c = 0; c < ss.c; ++c)
        for (int y = 0; y < ss.h; ++y)
            for (int x = 0; x < ss.w; ++x) {
                float acc = 0.0f;
                for (int dy = 0; dy < 2; ++dy)
                    for (int dx = 0; dx < 2; ++dx)
                        acc += gdst[(static_cast<size_t>(c) * ds.h + 2 * y + dy) * ds.w + 2 * x + dx];
                gsrc[(static_cast<size_t>(c) * ss.h + y) * ss.w + x] += acc;
            }
}

}  // namespace serial

// ---------------------------------------------------------------------------
// OpenMP backend. Row-oriented loops with vectorizable inner spans; every
// output element is written by exactly one thread.
// ---------------------------------------------------------------------------

namespace par {

void conv2d(const float* in, Shape is, const float* w, const float* bias, float* out, Shape os,
            const ConvSpec& cs) {
    const int K = cs.k, S = cs.stride, P = cs.pad;
    const int IC = is.c, IH = is.h, IW = is.w, OH = os.h, OW = os.w;
#pragma omp parallel for collapse(2) schedule(static)
    for (int oc = 0; oc < os.c; ++oc) {
        for (int oy = 0; oy < OH; ++oy) {
            float* orow = out + (static_cast<size_t>(oc) * OH + oy) * OW;
            const float bv = bias ? bias[oc] : 0.0f;
            for (int ox = 0; ox < OW; ++ox) orow[ox] = bv;
            for (int ic = 0; ic < IC; ++ic) {
                const float* wbase = w + (static_cast<size_t>(oc) * IC + ic) * K * K;
                for (int ky = 0; ky < K; ++ky) {
                    const int iy = oy * S - P + ky;
                    if (iy < 0 || iy >= IH) continue;
                    const float* irow = in + (static_cast<size_t>(ic) * IH + iy) * IW;
                    for (int kx = 0; kx < K; ++kx) {
                        const float wv = wbase[ky * K + kx];
                        const int lo = first_valid_ox(P, kx, S);
                        const int hi = last_valid_ox(IW, P, kx, S, OW);
                        const int off = kx - P;
                        if (S == 1) {
#pragma omp simd
                            for (int ox = lo; ox < hi; ++ox) orow[ox] += wv * irow[ox + off];
                        } else {
                            for (int ox = lo; ox < hi; ++ox) orow[ox] += wv * irow[ox * S + off];
                        }
                    }
                }
            }
        }
    }
}

void conv2d_backward_input(const float* gout, Shape os, const float* w, float* gin, Shape is,
                           const ConvSpec& cs) {
    const int K = cs.k, S = cs.stride, P = cs.pad;
    const int IC = is.c, IH = is.h, IW = is.w, OH = os.h, OW = os.w;
#pragma omp parallel for collapse(2) schedule(static)
    for (int ic = 0; ic < IC; ++ic) {
        for (int iy = 0; iy < IH; ++iy) {
            float* grow = gin + (static_cast<size_t>(ic) * IH + iy) * IW;
            for (int oc = 0; oc < os.c; ++oc) {
                const float* wbase = w + (static_cast<size_t>(oc) * IC + ic) * K * K;
                for (int ky = 0; ky < K; ++ky) {
                    const int t = iy + P - ky;
                    if (t < 0 || t % S != 0) continue;
                    const int oy = t / S;
                    if (oy >= OH) continue;
                    const float* gorow = gout + (static_cast<size_t>(oc) * OH + oy) * OW;
                    for (int kx = 0; kx < K; ++kx) {
                        const float wv = wbase[ky * K + kx];
                        const int lo = first_valid_ox(P, kx, S);
                        const int hi = last_valid_ox(IW, P, kx, S, OW);
                        const int off = kx - P;
                        if (S == 1) {
#pragma omp simd
                            for (int ox = lo; ox < hi; ++ox) grow[ox + off] += wv * gorow[ox];
                        } else {
                            for (int ox = lo; ox < hi; ++ox) grow[ox * S + off] += wv * gorow[ox];
                        }
                    }
                }
            }
        }
    }
}

void conv2d_backward_params(const float* gout, Shape os, const float* in, Shape is, float* gw,
                            float* gb, const ConvSpec& cs) {
    const int K = cs.k, S = cs.stride, P = cs.pad;
    const int IC = is.c, IH = is.h, IW = is.w, OH = os.h, OW = os.w;
#pragma omp parallel for schedule(static)
    for (int oc = 0; oc < os.c; ++oc) {
        const float* gobase = gout + static_cast<size_t>(oc) * OH * OW;
        for (int ic = 0; ic < IC; ++ic) {
            const float* ibase = in + static_cast<size_t>(ic) * IH * IW;
            for (int ky = 0; ky < K; ++ky) {
                for (int kx = 0; kx < K; ++kx) {
                    const int lo = first_valid_ox(P, kx, S);
                    const int hi = last_valid_ox(IW, P, kx, S, OW);
                    const int off = kx - P;
                    float acc = 0.0f;
                    for (int oy = 0; oy < OH; ++oy) {
                        const int iy = oy * S - P + ky;
                        if (iy < 0 || iy >= IH) continue;
                        const float* gorow = gobase + static_cast<size_t>(oy) * OW;
                        const float* irow = ibase + static_cast<size_t>(iy) * IW;
                        float racc = 0.0f;
                        if (S == 1) {
#pragma omp simd reduction(+ : racc)
                            for (int ox = lo; ox < hi; ++ox) racc += gorow[ox] * irow[ox + off];
                        } else {
                            for (int ox = lo; ox < hi; ++ox) racc += gorow[ox] * irow[ox * S + off];
                        }
                        acc += racc;
                    }
                    gw[((static_cast<size_t>(oc) * IC + ic) * K + ky) * K + kx] += acc;
                }
            }
        }
        if (gb) {
            float acc = 0.0f;
            for (int oy = 0; oy < OH; ++oy) {
                const float* gorow = gobase + static_cast<size_t>(oy) * OW;
                float racc = 0.0f;
#pragma omp simd reduction(+ : racc)
                for (int ox = 0; ox < OW; ++ox) racc += gorow[ox];
                acc += racc;
            }
            gb[oc] += acc;
        }
    }
}

void relu(const float* in, float* out, size_t n) {
#pragma omp parallel for simd schedule(static)
    for (size_t i = 0; i < n; ++i) out[i] = in[i] > 0.0f ? in[i] : 0.0f;
}

void relu_backward(const float* gout, const float* out, float* gin, size_t n) {
#pragma omp parallel for simd schedule(static)
    for (size_t i = 0; i < n; ++i) gin[i] += out[i] > 0.0f ? gout[i] : 0.0f;
}

void upsample2x_add(const float* src, Shape ss, float* dst, Shape ds) {
    assert(ds.h == 2 * ss.h && ds.w == 2 * ss.w && ds.c == ss.c);
#pragma omp parallel for collapse(2) schedule(static)
    for (int c = 0; c < ds.c; ++c) {
        for (int y = 0; y < ds.h; ++y) {
            float* drow = dst + (static_cast<size_t>(c) * ds.h + y) * ds.w;
            const float* srow = src + (static_cast<size_t>(c) * ss.h + y / 2) * ss.w;
#pragma omp simd
            for (int x = 0; x < ds.w; ++x) drow[x] += srow[x / 2];
        }
    }
}

void upsample2x_add_backward(const float* gdst, Shape ds, float* gsrc, Shape ss) {
    assert(ds.h == 2 * ss.h && ds.w == 2 * ss.w && ds.c == ss.c);
#pragma omp parallel for collapse(2) schedule(static)
    for (int c = 0; c < ss.c; ++c) {
        for (int y = 0; y < ss.h; ++y) {
            float* grow = gsrc + (static_cast<size_t>(c) * ss.h + y) * ss.w;
            const float* g0 = gdst + (static_cast<size_t>(c) * ds.h + 2 * y) * ds.w;
            const float* g1 = g0 + ds.w;
            for (int x = 0; x < ss.w; ++x)
                grow[x] += g0[2 * x] + g0[2 * x + 1] + g1[2 * x] + g1[2 * x + 1];
        }
    }
}

}  // namespace par

const Ops& get_ops(Backend backend) {
    static const Ops serial_ops = {
        &serial::conv2d,        &serial::conv2d_backward_input, &serial::conv2d_backward_params,
        &serial::relu,          &serial::relu_backward,         &serial::upsample2x_add,
        &serial::upsample2x_add_backward,
    };
    static const Ops par_ops = {
        &par::conv2d,        &par::conv2d_backward_input, &par::conv2d_backward_params,
        &par::relu,          &par::relu_backward,         &par::upsample2x_add,
        &par::upsample2x_add_backward,
    };
    return backend == Backend::Serial ? serial_ops : par_ops;
}

}  // namespace datt::kernels
