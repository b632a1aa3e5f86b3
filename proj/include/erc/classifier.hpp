#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "erc/tensor.hpp"

namespace erc {

template <typename T>
struct HeadParams {
  Tensor<T> w;  // d x C
  Tensor<T> b;  // {1, C}
};

template <typename T>
Tensor<T> modality_logits(const Tensor<T>& z, const HeadParams<T>& head);

// Z_f = sum over present modalities of alpha_m * L_m. Coefficients may be
// plain scalars or learnable single-element tensors (LSF).
template <typename T>
struct WeightedLogits {
  std::optional<Tensor<T>> logits;
  std::optional<T> fixed_alpha;
  std::optional<Tensor<T>> learned_alpha;
};

template <typename T>
Tensor<T> fuse_logits(std::span<const WeightedLogits<T>> parts);

// Row argmax with ties broken by the lowest class index.
template <typename T>
std::vector<int> argmax_rows(const Tensor<T>& scores);

// Class-weighted masked NLL over fused probabilities (Eq.-level contract
// shared with masked_weighted_nll; log clamped at 1e-12).
template <typename T>
Tensor<T> fusion_loss(const Tensor<T>& probs, std::span<const int> labels,
                      std::span<const T> class_weights, const Mask& mask);

// Per-modality self-supervision: L_u = sum_m lambda_m * CE_m with
// lambda_m = factor * value(CE_m) frozen for the step (no gradient flows
// through lambda_m). Pass `frozen_lambdas` to pin the coefficients, e.g.
// for finite-difference verification.
template <typename T>
struct SelfSupervisedLoss {
  Tensor<T> loss;                    // scalar; zero tensor when no modality present
  std::array<double, 3> ce = {0, 0, 0};       // CE per modality slot (a, v, t)
  std::array<double, 3> lambda = {0, 0, 0};   // frozen weights actually used
};

template <typename T>
SelfSupervisedLoss<T> self_supervised_loss(
    const std::array<std::optional<Tensor<T>>, 3>& modality_probs,
    std::span<const int> labels, const Mask& mask, double factor,
    const std::optional<std::array<double, 3>>& frozen_lambdas = std::nullopt);

template <typename T>
Tensor<T> total_loss(const Tensor<T>& fusion, const Tensor<T>& self_supervised);

}  // namespace erc
