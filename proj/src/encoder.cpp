#include "erc/encoder.hpp"

namespace erc {

template <typename T>
Tensor<T> project_modality(const Tensor<T>& raw, const Tensor<T>& weight,
                           const Tensor<T>& bias) {
  return add_rowvec(matmul(raw, weight), bias);
}

template <typename T>
Tensor<T> speaker_embed(std::span<const int> speaker_ids, const Tensor<T>& table) {
  for (int id : speaker_ids) {
    if (id < 0 || id >= table.rows()) {
      throw DimensionError("speaker_embed: speaker id out of range");
    }
  }
  return take_rows(table, speaker_ids);
}

template <typename T>
Tensor<T> compose_input(const Tensor<T>& z, const Tensor<T>& se, const Tensor<T>& pe,
                        const Mask& mask) {
  return zero_masked_rows(add(add(z, se), pe), mask);
}

#define ERC_INSTANTIATE(T)                                                             \
  template Tensor<T> project_modality<T>(const Tensor<T>&, const Tensor<T>&,          \
                                         const Tensor<T>&);                           \
  template Tensor<T> speaker_embed<T>(std::span<const int>, const Tensor<T>&);        \
  template Tensor<T> compose_input<T>(const Tensor<T>&, const Tensor<T>&,             \
                                      const Tensor<T>&, const Mask&);

ERC_INSTANTIATE(float)
ERC_INSTANTIATE(double)

#undef ERC_INSTANTIATE

}  // namespace erc
