#include "erc/denoise.hpp"

#include <algorithm>
#include <cmath>

namespace erc {

template <typename T>
Tensor<T> shift_reference_keys(const Tensor<T>& keys, int delta, const Mask* mask) {
  return shift_rows_replicate(keys, delta, mask);
}

template <typename T>
DiffAttnTap<T> diff_attention(const Tensor<T>& zin, const DiffAttnHead<T>& head,
                              const Tensor<T>& lambda_, int delta, const Mask& mask,
                              const DiffAttnOptions& opt) {
  const int d = zin.cols();
  const int dh = head.wq.cols();
  auto q = matmul(zin, head.wq);
  auto k = matmul(zin, head.wk);
  auto v = matmul(zin, head.wv);
  const T inv_scale = T(1) / std::sqrt(static_cast<T>(opt.scale_full_d ? d : dh));

  DiffAttnTap<T> tap;
  tap.alpha = softmax_rows(scale(matmul(q, transpose(k)), inv_scale), &mask);
  if (opt.lambda_zero) {
    tap.out = matmul(tap.alpha, v);
    return tap;
  }
  auto kref = shift_reference_keys(k, delta, &mask);
  tap.alpha_ref = softmax_rows(scale(matmul(q, transpose(kref)), inv_scale), &mask);
  tap.out = matmul(sub(tap.alpha, scale_by(lambda_, tap.alpha_ref)), v);
  return tap;
}

template <typename T>
MultiHeadDiffOut<T> multi_head_diff(const Tensor<T>& zin, const DiffAttnParams<T>& p,
                                    const Mask& mask, const DiffAttnOptions& opt) {
  if (p.heads.empty()) throw ConfigError("multi_head_diff: at least one head required");
  const int d = zin.cols();
  const int dh = p.heads[0].wq.cols();
  if (dh * static_cast<int>(p.heads.size()) != d) {
    throw ConfigError("multi_head_diff: head count must divide the hidden dim");
  }
  MultiHeadDiffOut<T> out;
  Tensor<T> cat;
  for (const auto& head : p.heads) {
    auto tap = diff_attention(zin, head, p.lambda_, p.delta, mask, opt);
    auto normed = group_norm(tap.out, 1, head.gn_gamma, head.gn_beta,
                             static_cast<T>(opt.gn_eps));
    cat = cat.defined() ? concat_cols(cat, normed) : normed;
    out.heads.push_back(std::move(tap));
  }
  out.out = matmul(cat, p.wo);
  return out;
}

template <typename T>
Tensor<T> gated_filter(const Tensor<T>& zin, const Tensor<T>& zattn, const Tensor<T>& gate_w,
                       const Tensor<T>& gate_b, const Mask& mask) {
  auto zres = add(zin, zattn);
  auto gate = sigmoid(add_rowvec(matmul(zres, gate_w), gate_b));
  return zero_masked_rows(mul(zres, gate), mask);
}

namespace {

template <typename T>
int valid_prefix(const Mask& mask, const Tensor<T>& z) {
  if (static_cast<int>(mask.size()) != z.rows()) {
    throw DimensionError("baseline_denoise: mask length must equal row count");
  }
  int n = 0;
  while (n < static_cast<int>(mask.size()) && mask[n]) ++n;
  for (int i = n; i < static_cast<int>(mask.size()); ++i) {
    if (mask[i]) throw DataError("baseline_denoise: mask must be a tail-padded prefix");
  }
  return n;
}

// Row-mixing filter matrices; constant, so gradients flow through matmul.
template <typename T>
Tensor<T> moving_average_matrix(int n_valid, int n_total, int window) {
  std::vector<T> w(static_cast<std::size_t>(n_total) * n_total, T(0));
  const int r = window / 2;
  for (int t = 0; t < n_valid; ++t) {
    for (int o = -r; o <= r; ++o) {
      const int s = std::clamp(t + o, 0, n_valid - 1);  // replicated boundary
      w[static_cast<std::size_t>(t) * n_total + s] += T(1) / static_cast<T>(window);
    }
  }
  for (int t = n_valid; t < n_total; ++t) w[static_cast<std::size_t>(t) * n_total + t] = T(1);
  return Tensor<T>::from({n_total, n_total}, std::move(w));
}

template <typename T>
Tensor<T> ema_matrix(int n_valid, int n_total, double c) {
  std::vector<T> w(static_cast<std::size_t>(n_total) * n_total, T(0));
  // y_t = c x_t + (1-c) y_{t-1}, y_0 = x_0
  for (int t = 0; t < n_valid; ++t) {
    w[static_cast<std::size_t>(t) * n_total] = static_cast<T>(std::pow(1.0 - c, t));
    for (int s = 1; s <= t; ++s) {
      w[static_cast<std::size_t>(t) * n_total + s] =
          static_cast<T>(c * std::pow(1.0 - c, t - s));
    }
  }
  for (int t = n_valid; t < n_total; ++t) w[static_cast<std::size_t>(t) * n_total + t] = T(1);
  return Tensor<T>::from({n_total, n_total}, std::move(w));
}

// Median over a centered window, gradient routed to the selected entry
// (ties pick the earliest time step).
template <typename T>
Tensor<T> median_filter(const Tensor<T>& z, int n_valid, int window, const Mask& mask) {
  const int n = z.rows(), d = z.cols();
  const int r = window / 2;
  std::vector<T> out = z.data();
  std::vector<int> src(z.size());
  for (std::size_t i = 0; i < src.size(); ++i) src[i] = static_cast<int>(i) / d;
  std::vector<std::pair<T, int>> buf(static_cast<std::size_t>(window));
  for (int t = 0; t < n_valid; ++t) {
    for (int j = 0; j < d; ++j) {
      for (int o = -r; o <= r; ++o) {
        const int s = std::clamp(t + o, 0, n_valid - 1);
        buf[static_cast<std::size_t>(o + r)] = {z.at(s, j), s};
      }
      std::sort(buf.begin(), buf.end());
      const auto& m = buf[static_cast<std::size_t>(r)];
      out[static_cast<std::size_t>(t) * d + j] = m.first;
      src[static_cast<std::size_t>(t) * d + j] = m.second;
    }
  }
  auto res = make_result<T>(z.shape(), std::move(out), "median_filter", {z});
  if (auto* tape = GradTape<T>::active(); tape && on_grad_path(z)) {
    auto dz = z.raw(), dr = res.raw();
    tape->push(
        "median_filter",
        [dz, dr, d, src = std::move(src)]() {
          if (dr->grad.empty()) return;
          auto& g = grad_buffer(dz);
          for (std::size_t i = 0; i < src.size(); ++i) {
            g[static_cast<std::size_t>(src[i]) * d + static_cast<int>(i) % d] += dr->grad[i];
          }
        },
        {z, res});
  }
  (void)mask;
  return res;
}

}  // namespace

template <typename T>
Tensor<T> baseline_denoise(const Tensor<T>& z, DenoiseMode method, int window,
                           double ema_coeff, const Mask& mask) {
  const int n_valid = valid_prefix(mask, z);
  if (n_valid == 0) throw DegenerateError("baseline_denoise: all rows masked");
  switch (method) {
    case DenoiseMode::kMovingAverage:
      if (window < 1 || window % 2 == 0) {
        throw ConfigError("baseline_denoise: MA window must be odd and >= 1");
      }
      return zero_masked_rows(
          matmul(moving_average_matrix<T>(n_valid, z.rows(), window), z), mask);
    case DenoiseMode::kExponential:
      if (ema_coeff <= 0.0 || ema_coeff >= 1.0) {
        throw ConfigError("baseline_denoise: EMA coefficient must lie in (0,1)");
      }
      return zero_masked_rows(matmul(ema_matrix<T>(n_valid, z.rows(), ema_coeff), z), mask);
    case DenoiseMode::kMedian:
      if (window < 1 || window % 2 == 0) {
        throw ConfigError("baseline_denoise: median window must be odd and >= 1");
      }
      return zero_masked_rows(median_filter(z, n_valid, window, mask), mask);
    default:
      throw ConfigError("baseline_denoise: method must be ma, ema or median");
  }
}

#define ERC_INSTANTIATE(T)                                                                \
  template Tensor<T> shift_reference_keys<T>(const Tensor<T>&, int, const Mask*);        \
  template DiffAttnTap<T> diff_attention<T>(const Tensor<T>&, const DiffAttnHead<T>&,    \
                                            const Tensor<T>&, int, const Mask&,          \
                                            const DiffAttnOptions&);                     \
  template MultiHeadDiffOut<T> multi_head_diff<T>(const Tensor<T>&,                      \
                                                  const DiffAttnParams<T>&, const Mask&, \
                                                  const DiffAttnOptions&);               \
  template Tensor<T> gated_filter<T>(const Tensor<T>&, const Tensor<T>&,                 \
                                     const Tensor<T>&, const Tensor<T>&, const Mask&);   \
  template Tensor<T> baseline_denoise<T>(const Tensor<T>&, DenoiseMode, int, double,     \
                                         const Mask&);

ERC_INSTANTIATE(float)
ERC_INSTANTIATE(double)

#undef ERC_INSTANTIATE

}  // namespace erc
