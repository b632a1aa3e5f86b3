#pragma once

#include <optional>

#include "erc/config.hpp"
#include "erc/tensor.hpp"

namespace erc {

template <typename T>
struct FusionProjection {
  Tensor<T> wq, wk, wv;  // d x d each
};

template <typename T>
struct FusionParams {
  FusionProjection<T> text, audio, visual;
  Tensor<T> gate_w;  // 2d x d
};

struct FusionOptions {
  double gamma = 1.0;        // fixed balancing coefficient
  bool scale_sqrt = false;   // logits / sqrt(d) instead of the literal / d
  DegreeMode degree_mode = DegreeMode::kRow;
};

// S = softmax(Q K^T / d) with masked keys excluded and masked query rows
// zeroed.
template <typename T>
Tensor<T> self_attention_matrix(const Tensor<T>& z, const FusionProjection<T>& proj,
                                const Mask& mask, bool scale_sqrt);

// D^{-1/2} S D^{-1/2} with D = diag(row sums); `sym` uses column sums on
// the right factor instead. A valid row with zero degree is degenerate;
// masked rows read degree 1 and stay zero.
template <typename T>
Tensor<T> degree_normalize(const Tensor<T>& s, const Mask& mask,
                           DegreeMode mode = DegreeMode::kRow);

// gamma * (St_hat Sm_hat^T) + (1-gamma) * (S_t + S_m). The endpoints skip
// the unused term entirely, so gamma=0 never touches the normalized
// matrices and gamma=1 never touches the raw sum.
template <typename T>
Tensor<T> cross_modal_attention(const Tensor<T>& st_hat, const Tensor<T>& sm_hat,
                                const Tensor<T>& st, const Tensor<T>& sm, double gamma);

template <typename T>
Tensor<T> transfer_values(const Tensor<T>& s, const Tensor<T>& values, const Mask& mask);

// T = sigmoid([U_a || U_v] W_g); out = z_t + T (.) U_a + (1-T) (.) U_v.
template <typename T>
Tensor<T> gated_fuse(const Tensor<T>& zt, const Tensor<T>& ua, const Tensor<T>& uv,
                     const Tensor<T>& gate_w, const Mask& mask);

// Full text-anchored pass. Absent streams (std::nullopt) degrade
// gracefully: with one stream the transfer is added without a gate, with
// none the text features pass through.
template <typename T>
Tensor<T> diffusion_fuse(const Tensor<T>& zt_out, const std::optional<Tensor<T>>& za,
                         const std::optional<Tensor<T>>& zv, const FusionParams<T>& p,
                         const Mask& mask, const FusionOptions& opt);

}  // namespace erc
