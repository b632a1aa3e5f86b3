#pragma once

#include <span>

#include "erc/tensor.hpp"

namespace erc {

// Z = H W + b, row-wise affine projection into the shared hidden space.
template <typename T>
Tensor<T> project_modality(const Tensor<T>& raw, const Tensor<T>& weight,
                           const Tensor<T>& bias);

// Row i of the output is table[ids[i]] (one-hot times matrix collapses to
// a lookup). Throws DimensionError when an id is out of range.
template <typename T>
Tensor<T> speaker_embed(std::span<const int> speaker_ids, const Tensor<T>& table);

// Z + SE + PE with masked rows zeroed after the sum.
template <typename T>
Tensor<T> compose_input(const Tensor<T>& z, const Tensor<T>& se, const Tensor<T>& pe,
                        const Mask& mask);

}  // namespace erc
