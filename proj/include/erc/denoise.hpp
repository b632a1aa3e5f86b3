#pragma once

#include <vector>

#include "erc/config.hpp"
#include "erc/tensor.hpp"

namespace erc {

template <typename T>
struct DiffAttnHead {
  Tensor<T> wq, wk, wv;        // d x d_h each
  Tensor<T> gn_gamma, gn_beta;  // {1, d_h}, per-head GroupNorm affine
};

template <typename T>
struct DiffAttnParams {
  std::vector<DiffAttnHead<T>> heads;
  Tensor<T> wo;       // d x d
  Tensor<T> lambda_;  // {1,1}, shared across heads
  Tensor<T> gate_w;   // d x d
  Tensor<T> gate_b;   // {1, d}
  int delta = 1;
};

struct DiffAttnOptions {
  bool scale_full_d = false;   // use 1/sqrt(d) instead of 1/sqrt(d_h)
  double gn_eps = 1e-5;
  bool lambda_zero = false;    // ablation: drop the reference-map term entirely
};

// Reference keys via a temporal shift of `delta` with boundary
// replication for the first `delta` rows; masked rows untouched.
template <typename T>
Tensor<T> shift_reference_keys(const Tensor<T>& keys, int delta, const Mask* mask);

template <typename T>
struct DiffAttnTap {
  Tensor<T> out;        // pre-GroupNorm head output, N x d_h
  Tensor<T> alpha;      // N x N
  Tensor<T> alpha_ref;  // N x N (undefined under lambda_zero)
};

// One head of (alpha - lambda*alpha_ref) V with masked keys excluded from
// both softmaxes. zin lives in the full d space; the head projects it.
template <typename T>
DiffAttnTap<T> diff_attention(const Tensor<T>& zin, const DiffAttnHead<T>& head,
                              const Tensor<T>& lambda_, int delta, const Mask& mask,
                              const DiffAttnOptions& opt);

template <typename T>
struct MultiHeadDiffOut {
  Tensor<T> out;  // N x d, after W_O
  std::vector<DiffAttnTap<T>> heads;
};

// All heads share lambda; each head output is GroupNorm-ed over its d_h
// features (one group), heads are concatenated and fused by W_O.
template <typename T>
MultiHeadDiffOut<T> multi_head_diff(const Tensor<T>& zin, const DiffAttnParams<T>& p,
                                    const Mask& mask, const DiffAttnOptions& opt);

// Residual + element-wise sigmoid gate on the residual output; masked
// rows zeroed. Gate activations lie strictly in (0,1).
template <typename T>
Tensor<T> gated_filter(const Tensor<T>& zin, const Tensor<T>& zattn, const Tensor<T>& gate_w,
                       const Tensor<T>& gate_b, const Mask& mask);

// Classical filters along time over the valid (tail-padded) prefix:
// MA/median use a centered odd window with replicated boundaries, EMA is
// causal with y_0 = x_0. Replaces the differential module under ablation.
template <typename T>
Tensor<T> baseline_denoise(const Tensor<T>& z, DenoiseMode method, int window,
                           double ema_coeff, const Mask& mask);

}  // namespace erc
