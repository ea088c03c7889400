#pragma once

#include <cstddef>

namespace datt::kernels {

struct Shape {
    int c = 0, h = 0, w = 0;
    size_t size() const { return static_cast<size_t>(c) * h * w; }
};

struct ConvSpec {
    int in_c = 0, out_c = 0, k = 3, stride = 1, pad = 1;
};

inline int conv_out_dim(int in, int k, int stride, int pad) {
    return (in + 2 * pad - k) / stride + 1;
}

// Weight layout: w[oc][ic][ky][kx] contiguous; bias[oc].
// All backward kernels ACCUMULATE (+=) into their gradient outputs; callers
// zero the buffers once per step. Forward kernels assign.
//
// Both backends compute every output element with the same per-element
// accumulation order, so results are deterministic and independent of the
// OpenMP thread count. serial:: is the plain reference implementation kept
// for tests and for auditing; par:: is the production path.

namespace serial {
void conv2d(const float* in, Shape is, const float* w, const float* bias, float* out, Shape os,
            const ConvSpec& cs);
void conv2d_backward_input(const float* gout, Shape os, const float* w, float* gin, Shape is,
                           const ConvSpec& cs);
void conv2d_backward_params(const float* gout, Shape os, const float* in, Shape is, float* gw,
                            float* gb, const ConvSpec& cs);
void relu(const float* in, float* out, size_t n);
void relu_backward(const float* gout, const float* out, float* gin, size_t n);
void upsample2x_add(const float* src, Shape ss, float* dst, Shape ds);
void upsample2x_add_backward(const float* gdst, Shape ds, float* gsrc, Shape ss);
}  // namespace serial

namespace par {
void conv2d(const float* in, Shape is, const float* w, const float* bias, float* out, Shape os,
            const ConvSpec& cs);
void conv2d_backward_input(const float* gout, Shape os, const float* w, float* gin, Shape is,
                           const ConvSpec& cs);
void conv2d_backward_params(const float* gout, Shape os, const float* in, Shape is, float* gw,
                            float* gb, const ConvSpec& cs);
void relu(const float* in, float* out, size_t n);
void relu_backward(const float* gout, const float* out, float* gin, size_t n);
void upsample2x_add(const float* src, Shape ss, float* dst, Shape ds);
void upsample2x_add_backward(const float* gdst, Shape ds, float* gsrc, Shape ss);
}  // namespace par

enum class Backend { Serial, Parallel };

struct Ops {
    void (*conv2d)(const float*, Shape, const float*, const float*, float*, Shape, const ConvSpec&);
    void (*conv2d_backward_input)(const float*, Shape, const float*, float*, Shape, const ConvSpec&);
    void (*conv2d_backward_params)(const float*, Shape, const float*, Shape, float*, float*,
                                   const ConvSpec&);
    void (*relu)(const float*, float*, size_t);
    void (*relu_backward)(const float*, const float*, float*, size_t);
    void (*upsample2x_add)(const float*, Shape, float*, Shape);
    void (*upsample2x_add_backward)(const float*, Shape, float*, Shape);
};

const Ops& get_ops(Backend backend);

}  // namespace datt::kernels
