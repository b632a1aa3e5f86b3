#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "erc/error.hpp"

namespace erc {

// Row validity mask; 1 = real utterance, 0 = padding.
using Mask = std::vector<std::uint8_t>;

template <typename T>
struct TensorData {
  std::vector<int> shape;
  std::vector<T> data;
  std::vector<T> grad;  // empty until backward touches this tensor
  bool requires_grad = false;
  bool on_tape = false;  // produced by a recorded op in the active tape
};

// Dense row-major tensor handle with shared storage. Everything the
// pipeline needs is rank 1 or 2; scalars are stored as {1,1}. Values are
// validated to be finite on construction and after every primitive.
template <typename T>
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::vector<int> shape);
  static Tensor full(std::vector<int> shape, T value);
  static Tensor from(std::vector<int> shape, std::vector<T> data);
  static Tensor scalar(T value);
  // Leaf parameter: requires_grad set, participates in backward.
  static Tensor param(std::vector<int> shape, std::vector<T> data);

  bool defined() const { return static_cast<bool>(d_); }
  const std::vector<int>& shape() const { return d_->shape; }
  int ndim() const { return static_cast<int>(d_->shape.size()); }
  std::size_t size() const { return d_->data.size(); }
  int rows() const;
  int cols() const;

  std::vector<T>& data() { return d_->data; }
  const std::vector<T>& data() const { return d_->data; }
  T value() const;  // single-element tensors only

  T at(int r, int c) const { return d_->data[static_cast<std::size_t>(r) * cols() + c]; }

  bool requires_grad() const { return d_->requires_grad; }
  bool has_grad() const { return !d_->grad.empty(); }
  // Gradient of the last backward pass; zeros if the tensor was not
  // reached from the loss.
  std::vector<T> grad() const;

  std::shared_ptr<TensorData<T>> raw() const { return d_; }

 private:
  explicit Tensor(std::shared_ptr<TensorData<T>> d) : d_(std::move(d)) {}
  std::shared_ptr<TensorData<T>> d_;

  template <typename U>
  friend class GradTape;
  template <typename U>
  friend Tensor<U> make_result(std::vector<int>, std::vector<U>, const char*,
                               std::initializer_list<Tensor<U>>);
};

// Reverse-mode tape. Constructing a tape activates recording on the
// current thread (tapes nest as a stack); destruction deactivates it.
// Confine each tape to one thread; tape-free forwards are safe to run
// concurrently.
template <typename T>
class GradTape {
 public:
  GradTape();
  ~GradTape();
  GradTape(const GradTape&) = delete;
  GradTape& operator=(const GradTape&) = delete;

  // Replays the tape in reverse from a scalar loss, assigning grads to
  // every requires_grad tensor reachable from it. Previous grads on
  // touched tensors are discarded first.
  void backward(const Tensor<T>& loss);

  std::size_t node_count() const { return nodes_.size(); }

  static GradTape* active();

  // Internal: used by primitives to record a backward closure.
  void push(const char* op, std::function<void()> fn,
            std::initializer_list<Tensor<T>> touched);

 private:
  struct Node {
    const char* op;
    std::function<void()> fn;
  };
  std::vector<Node> nodes_;
  std::vector<std::shared_ptr<TensorData<T>>> touched_;
};

// ---- primitive-building helpers --------------------------------------------

// Builds an op result: validates finiteness (NumericError names the op)
// and propagates tape linkage from the inputs.
template <typename T>
Tensor<T> make_result(std::vector<int> shape, std::vector<T> data, const char* op,
                      std::initializer_list<Tensor<T>> inputs);

// Lazily sized gradient accumulator for use inside backward closures.
template <typename T>
inline std::vector<T>& grad_buffer(const std::shared_ptr<TensorData<T>>& d) {
  if (d->grad.empty()) d->grad.assign(d->data.size(), T(0));
  return d->grad;
}

// True when a gradient can reach this tensor (leaf param or recorded op).
template <typename T>
inline bool on_grad_path(const Tensor<T>& t) {
  return t.raw()->requires_grad || t.raw()->on_tape;
}

// ---- primitives -----------------------------------------------------------
// Every primitive validates shapes, checks its output for non-finite
// values (NumericError names the offending op), and records a gradient
// rule when a tape is active and an operand requires grad.

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> transpose(const Tensor<T>& x);
template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);
// x: {n,c} plus row vector v: {1,c} broadcast over rows.
template <typename T>
Tensor<T> add_rowvec(const Tensor<T>& x, const Tensor<T>& v);
template <typename T>
Tensor<T> scale(const Tensor<T>& x, T c);
// s is a single-element tensor (e.g. a learnable scalar); out = s * x.
template <typename T>
Tensor<T> scale_by(const Tensor<T>& s, const Tensor<T>& x);
template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x);
template <typename T>
Tensor<T> elu(const Tensor<T>& x);
template <typename T>
Tensor<T> leaky_relu(const Tensor<T>& x, T slope);

// Row-wise softmax with optional column validity mask. Masked entries are
// exactly 0 and receive no gradient; rows are computed with
// max-subtraction. Throws DegenerateError when no column is valid.
template <typename T>
Tensor<T> softmax_rows(const Tensor<T>& x, const Mask* col_mask = nullptr);

// Per-row GroupNorm over the feature dimension: the c features of each
// row are split into `groups` contiguous groups, each normalized to zero
// mean / unit variance (population variance, + eps) and then scaled by
// gamma and shifted by beta (both length c). A zero-variance group
// normalizes to 0, i.e. the output is beta there.
template <typename T>
Tensor<T> group_norm(const Tensor<T>& x, int groups, const Tensor<T>& gamma,
                     const Tensor<T>& beta, T eps);

template <typename T>
Tensor<T> sum(const Tensor<T>& x);
template <typename T>
Tensor<T> concat_cols(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> slice_cols(const Tensor<T>& x, int first, int count);
// out[i] = x[idx[i]]; duplicate indices accumulate gradient.
template <typename T>
Tensor<T> take_rows(const Tensor<T>& x, std::span<const int> idx);
template <typename T>
Tensor<T> zero_masked_rows(const Tensor<T>& x, const Mask& m);
// Per-row select: out[i] = take_a[i] ? a[i] : b[i].
template <typename T>
Tensor<T> where_rows(const Mask& take_a, const Tensor<T>& a, const Tensor<T>& b);

// Temporal reference shift with boundary replication: row t reads row
// t-delta when t >= delta, otherwise itself. Masked rows are left
// untouched. delta >= 1.
template <typename T>
Tensor<T> shift_rows_replicate(const Tensor<T>& x, int delta, const Mask* m = nullptr);

template <typename T>
Tensor<T> row_sums(const Tensor<T>& x);  // {n,1}
template <typename T>
Tensor<T> rsqrt(const Tensor<T>& x);
// Scale row i of x by v[i] (v: {n,1}).
template <typename T>
Tensor<T> mul_colvec(const Tensor<T>& x, const Tensor<T>& v);
// Scale column j of x by v[j] (v: {1,c}).
template <typename T>
Tensor<T> mul_rowvec(const Tensor<T>& x, const Tensor<T>& v);

// Softmax over groups of entries: scores {e,1}, segment[i] in
// [0,n_segments). Each segment's entries form one softmax; empty segments
// are fine.
template <typename T>
Tensor<T> segment_softmax(const Tensor<T>& scores, std::span<const int> segment,
                          int n_segments);
// out[t] = sum over entries e with target[e]==t of w[e] * rows[e].
// Targets with no entries yield zero rows.
template <typename T>
Tensor<T> segment_weighted_rowsum(const Tensor<T>& w, const Tensor<T>& rows,
                                  std::span<const int> target, int n_rows_out);

// Class-weighted masked NLL: -(1/n_valid) * sum over valid rows of
// w[label] * log(max(probs[i,label], 1e-12)). Throws DegenerateError when
// every row is masked.
template <typename T>
Tensor<T> masked_weighted_nll(const Tensor<T>& probs, std::span<const int> labels,
                              std::span<const T> class_weights, const Mask& m);

// Inverted dropout; identity when rate == 0.
template <typename T>
Tensor<T> dropout(const Tensor<T>& x, T rate, std::mt19937_64& rng);

// Calls backward on the tape currently active for T.
template <typename T>
void backward(const Tensor<T>& loss);

// Central-difference gradient verification. Runs f once under a fresh
// tape to collect analytic grads of `wrt`, then perturbs every coordinate
// by +-h and returns the max over coordinates of
// |analytic - numeric| / (|analytic| + 1e-8). Call with T = double.
template <typename T>
double finite_diff_check(const std::function<Tensor<T>()>& f,
                         std::span<const Tensor<T>> wrt, T h);
template <typename T>
double finite_diff_check(const std::function<Tensor<T>()>& f, const Tensor<T>& x, T h);

// Sinusoidal position table, {n,d} with d even; entries lie in [-1,1].
// Constant (never recorded on the tape).
template <typename T>
Tensor<T> positional_encoding(int n, int d);

}  // namespace erc
