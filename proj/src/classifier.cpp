#include "erc/classifier.hpp"

namespace erc {

template <typename T>
Tensor<T> modality_logits(const Tensor<T>& z, const HeadParams<T>& head) {
  return add_rowvec(matmul(z, head.w), head.b);
}

template <typename T>
Tensor<T> fuse_logits(std::span<const WeightedLogits<T>> parts) {
  Tensor<T> acc;
  for (const auto& part : parts) {
    if (!part.logits) continue;
    Tensor<T> weighted = part.learned_alpha ? scale_by(*part.learned_alpha, *part.logits)
                                            : scale(*part.logits, part.fixed_alpha.value());
    acc = acc.defined() ? add(acc, weighted) : weighted;
  }
  if (!acc.defined()) throw ConfigError("fuse_logits: no modality present");
  return acc;
}

template <typename T>
std::vector<int> argmax_rows(const Tensor<T>& scores) {
  std::vector<int> out(static_cast<std::size_t>(scores.rows()));
  for (int i = 0; i < scores.rows(); ++i) {
    int best = 0;
    for (int j = 1; j < scores.cols(); ++j) {
      if (scores.at(i, j) > scores.at(i, best)) best = j;
    }
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

template <typename T>
Tensor<T> fusion_loss(const Tensor<T>& probs, std::span<const int> labels,
                      std::span<const T> class_weights, const Mask& mask) {
  return masked_weighted_nll(probs, labels, class_weights, mask);
}

template <typename T>
SelfSupervisedLoss<T> self_supervised_loss(
    const std::array<std::optional<Tensor<T>>, 3>& modality_probs,
    std::span<const int> labels, const Mask& mask, double factor,
    const std::optional<std::array<double, 3>>& frozen_lambdas) {
  SelfSupervisedLoss<T> out;
  const std::vector<T> unit(modality_probs[0] ? modality_probs[0]->cols()
                            : modality_probs[1] ? modality_probs[1]->cols()
                            : modality_probs[2] ? modality_probs[2]->cols()
                                                : 1,
                            T(1));
  Tensor<T> acc;
  for (std::size_t m = 0; m < modality_probs.size(); ++m) {
    if (!modality_probs[m]) continue;
    auto ce = masked_weighted_nll<T>(*modality_probs[m], labels, unit, mask);
    out.ce[m] = static_cast<double>(ce.value());
    out.lambda[m] = frozen_lambdas ? (*frozen_lambdas)[m] : factor * out.ce[m];
    auto term = scale(ce, static_cast<T>(out.lambda[m]));
    acc = acc.defined() ? add(acc, term) : term;
  }
  out.loss = acc.defined() ? acc : Tensor<T>::scalar(T(0));
  return out;
}

template <typename T>
Tensor<T> total_loss(const Tensor<T>& fusion, const Tensor<T>& self_supervised) {
  return add(fusion, self_supervised);
}

#define ERC_INSTANTIATE(T)                                                              \
  template Tensor<T> modality_logits<T>(const Tensor<T>&, const HeadParams<T>&);       \
  template Tensor<T> fuse_logits<T>(std::span<const WeightedLogits<T>>);               \
  template std::vector<int> argmax_rows<T>(const Tensor<T>&);                          \
  template Tensor<T> fusion_loss<T>(const Tensor<T>&, std::span<const int>,            \
                                    std::span<const T>, const Mask&);                  \
  template SelfSupervisedLoss<T> self_supervised_loss<T>(                              \
      const std::array<std::optional<Tensor<T>>, 3>&, std::span<const int>,            \
      const Mask&, double, const std::optional<std::array<double, 3>>&);               \
  template Tensor<T> total_loss<T>(const Tensor<T>&, const Tensor<T>&);

ERC_INSTANTIATE(float)
ERC_INSTANTIATE(double)

#undef ERC_INSTANTIATE

}  // namespace erc
