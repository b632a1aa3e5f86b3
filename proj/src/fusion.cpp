#include "erc/fusion.hpp"

#include <cmath>

namespace erc {

template <typename T>
Tensor<T> self_attention_matrix(const Tensor<T>& z, const FusionProjection<T>& proj,
                                const Mask& mask, bool scale_sqrt) {
  const int d = z.cols();
  auto q = matmul(z, proj.wq);
  auto k = matmul(z, proj.wk);
  const T inv_scale =
      scale_sqrt ? T(1) / std::sqrt(static_cast<T>(d)) : T(1) / static_cast<T>(d);
  auto s = softmax_rows(scale(matmul(q, transpose(k)), inv_scale), &mask);
  return zero_masked_rows(s, mask);
}

template <typename T>
Tensor<T> degree_normalize(const Tensor<T>& s, const Mask& mask, DegreeMode mode) {
  if (s.rows() != s.cols()) throw DimensionError("degree_normalize: square matrix required");
  if (static_cast<int>(mask.size()) != s.rows()) {
    throw DimensionError("degree_normalize: mask length must equal matrix size");
  }
  for (int i = 0; i < s.rows(); ++i) {
    if (!mask[i]) continue;
    T acc = 0;
    for (int j = 0; j < s.cols(); ++j) {
      const T v = s.at(i, j);
      if (v < T(0)) throw NumericError("degree_normalize: negative entry");
      acc += v;
    }
    if (acc <= T(0)) throw DegenerateError("degree_normalize: zero-degree valid row");
  }
  auto ones = Tensor<T>::full({s.rows(), 1}, T(1));
  auto row_deg = where_rows(mask, row_sums(s), ones);
  auto r = rsqrt(row_deg);
  if (mode == DegreeMode::kRow) {
    return mul_rowvec(mul_colvec(s, r), transpose(r));
  }
  auto col_deg = where_rows(mask, row_sums(transpose(s)), ones);
  return mul_rowvec(mul_colvec(s, r), transpose(rsqrt(col_deg)));
}

template <typename T>
Tensor<T> cross_modal_attention(const Tensor<T>& st_hat, const Tensor<T>& sm_hat,
                                const Tensor<T>& st, const Tensor<T>& sm, double gamma) {
  if (gamma < 0.0 || gamma > 1.0) {
    throw ConfigError("cross_modal_attention: gamma must lie in [0,1]");
  }
  if (gamma == 0.0) return add(st, sm);
  auto diffused = matmul(st_hat, transpose(sm_hat));
  if (gamma == 1.0) return diffused;
  return add(scale(diffused, static_cast<T>(gamma)),
             scale(add(st, sm), static_cast<T>(1.0 - gamma)));
}

template <typename T>
Tensor<T> transfer_values(const Tensor<T>& s, const Tensor<T>& values, const Mask& mask) {
  return zero_masked_rows(matmul(s, values), mask);
}

template <typename T>
Tensor<T> gated_fuse(const Tensor<T>& zt, const Tensor<T>& ua, const Tensor<T>& uv,
                     const Tensor<T>& gate_w, const Mask& mask) {
  auto gate = sigmoid(matmul(concat_cols(ua, uv), gate_w));
  auto inv_gate = sub(Tensor<T>::full(gate.shape(), T(1)), gate);
  auto mixed = add(zt, add(mul(gate, ua), mul(inv_gate, uv)));
  return zero_masked_rows(mixed, mask);
}

template <typename T>
Tensor<T> diffusion_fuse(const Tensor<T>& zt_out, const std::optional<Tensor<T>>& za,
                         const std::optional<Tensor<T>>& zv, const FusionParams<T>& p,
                         const Mask& mask, const FusionOptions& opt) {
  if (!za && !zv) return zt_out;
  auto st = self_attention_matrix(zt_out, p.text, mask, opt.scale_sqrt);
  Tensor<T> st_hat;
  if (opt.gamma > 0.0) st_hat = degree_normalize(st, mask, opt.degree_mode);

  auto transfer_from = [&](const Tensor<T>& zm, const FusionProjection<T>& proj) {
    auto sm = self_attention_matrix(zm, proj, mask, opt.scale_sqrt);
    Tensor<T> sm_hat;
    if (opt.gamma > 0.0) sm_hat = degree_normalize(sm, mask, opt.degree_mode);
    auto stm = cross_modal_attention(st_hat, sm_hat, st, sm, opt.gamma);
    return transfer_values(stm, matmul(zm, proj.wv), mask);
  };

  if (za && zv) {
    auto ua = transfer_from(*za, p.audio);
    auto uv = transfer_from(*zv, p.visual);
    return gated_fuse(zt_out, ua, uv, p.gate_w, mask);
  }
  // One-sided transfer: nothing to balance, so no gate.
  auto u = za ? transfer_from(*za, p.audio) : transfer_from(*zv, p.visual);
  return zero_masked_rows(add(zt_out, u), mask);
}

#define ERC_INSTANTIATE(T)                                                               \
  template Tensor<T> self_attention_matrix<T>(const Tensor<T>&,                         \
                                              const FusionProjection<T>&, const Mask&,  \
                                              bool);                                     \
  template Tensor<T> degree_normalize<T>(const Tensor<T>&, const Mask&, DegreeMode);    \
  template Tensor<T> cross_modal_attention<T>(const Tensor<T>&, const Tensor<T>&,       \
                                              const Tensor<T>&, const Tensor<T>&,       \
                                              double);                                  \
  template Tensor<T> transfer_values<T>(const Tensor<T>&, const Tensor<T>&,             \
                                        const Mask&);                                   \
  template Tensor<T> gated_fuse<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,\
                                   const Tensor<T>&, const Mask&);                      \
  template Tensor<T> diffusion_fuse<T>(const Tensor<T>&, const std::optional<Tensor<T>>&,\
                                       const std::optional<Tensor<T>>&,                 \
                                       const FusionParams<T>&, const Mask&,             \
                                       const FusionOptions&);

ERC_INSTANTIATE(float)
ERC_INSTANTIATE(double)

#undef ERC_INSTANTIATE

}  // namespace erc
