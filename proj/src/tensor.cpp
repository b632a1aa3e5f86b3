#include "erc/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <sstream>

namespace erc {

namespace {

template <typename T>
std::size_t shape_size(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int s : shape) {
    if (s <= 0) throw DimensionError("tensor shape entries must be positive");
    n *= static_cast<std::size_t>(s);
  }
  if (shape.empty()) throw DimensionError("tensor shape must not be empty");
  return n;
}

template <typename T>
void check_finite(const char* op, const std::vector<T>& v) {
  for (T x : v) {
    if (!std::isfinite(x)) {
      throw NumericError(std::string(op) + ": non-finite value produced");
    }
  }
}

template <typename T>
GradTape<T>*& tape_slot() {
  thread_local GradTape<T>* slot = nullptr;
  return slot;
}

template <typename T>
std::vector<GradTape<T>*>& tape_stack() {
  thread_local std::vector<GradTape<T>*> stack;
  return stack;
}

}  // namespace

template <typename T>
Tensor<T> make_result(std::vector<int> shape, std::vector<T> data, const char* op,
                      std::initializer_list<Tensor<T>> inputs) {
  check_finite(op, data);
  auto d = std::make_shared<TensorData<T>>();
  d->shape = std::move(shape);
  d->data = std::move(data);
  if (GradTape<T>::active()) {
    for (const auto& in : inputs) {
      if (in.raw()->requires_grad || in.raw()->on_tape) {
        d->on_tape = true;
        break;
      }
    }
  }
  return Tensor<T>(std::move(d));
}

// ---- Tensor ----------------------------------------------------------------

template <typename T>
Tensor<T> Tensor<T>::zeros(std::vector<int> shape) {
  std::size_t n = shape_size<T>(shape);
  auto d = std::make_shared<TensorData<T>>();
  d->shape = std::move(shape);
  d->data.assign(n, T(0));
  return Tensor(std::move(d));
}

template <typename T>
Tensor<T> Tensor<T>::full(std::vector<int> shape, T value) {
  auto t = zeros(std::move(shape));
  std::fill(t.data().begin(), t.data().end(), value);
  check_finite("full", t.data());
  return t;
}

template <typename T>
Tensor<T> Tensor<T>::from(std::vector<int> shape, std::vector<T> data) {
  std::size_t n = shape_size<T>(shape);
  if (n != data.size()) {
    throw DimensionError("tensor data length does not match shape");
  }
  check_finite("from", data);
  auto d = std::make_shared<TensorData<T>>();
  d->shape = std::move(shape);
  d->data = std::move(data);
  return Tensor(std::move(d));
}

template <typename T>
Tensor<T> Tensor<T>::scalar(T value) {
  return from({1, 1}, {value});
}

template <typename T>
Tensor<T> Tensor<T>::param(std::vector<int> shape, std::vector<T> data) {
  auto t = from(std::move(shape), std::move(data));
  t.d_->requires_grad = true;
  return t;
}

template <typename T>
int Tensor<T>::rows() const {
  return d_->shape[0];
}

template <typename T>
int Tensor<T>::cols() const {
  return ndim() >= 2 ? d_->shape[1] : 1;
}

template <typename T>
T Tensor<T>::value() const {
  if (size() != 1) throw DimensionError("value() requires a single-element tensor");
  return d_->data[0];
}

template <typename T>
std::vector<T> Tensor<T>::grad() const {
  if (d_->grad.empty()) return std::vector<T>(d_->data.size(), T(0));
  return d_->grad;
}

// ---- GradTape ---------------------------------------------------------------

template <typename T>
GradTape<T>::GradTape() {
  tape_stack<T>().push_back(this);
  tape_slot<T>() = this;
}

template <typename T>
GradTape<T>::~GradTape() {
  auto& stack = tape_stack<T>();
  stack.pop_back();
  tape_slot<T>() = stack.empty() ? nullptr : stack.back();
}

template <typename T>
GradTape<T>* GradTape<T>::active() {
  return tape_slot<T>();
}

template <typename T>
void GradTape<T>::push(const char* op, std::function<void()> fn,
                       std::initializer_list<Tensor<T>> touched) {
  nodes_.push_back(Node{op, std::move(fn)});
  for (const auto& t : touched) touched_.push_back(t.raw());
}

template <typename T>
void GradTape<T>::backward(const Tensor<T>& loss) {
  if (!loss.defined() || loss.size() != 1) {
    throw DimensionError("backward: loss must be a scalar tensor");
  }
  if (!std::isfinite(loss.value())) {
    throw NumericError("backward: loss is non-finite");
  }
  for (auto& d : touched_) d->grad.clear();
  loss.raw()->grad.assign(1, T(1));
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    it->fn();
  }
  for (auto& d : touched_) {
    if (!d->requires_grad || d->grad.empty()) continue;
    for (T g : d->grad) {
      if (!std::isfinite(g)) {
        throw NumericError("backward: non-finite gradient produced");
      }
    }
  }
}

template <typename T>
void backward(const Tensor<T>& loss) {
  auto* tape = GradTape<T>::active();
  if (!tape) throw Error("backward: no active tape");
  tape->backward(loss);
}

// ---- primitives -------------------------------------------------------------

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.ndim() != 2 || b.ndim() != 2 || a.cols() != b.rows()) {
    std::ostringstream os;
    os << "matmul: inner dimensions disagree (" << a.rows() << "x" << a.cols() << " vs "
       << b.rows() << "x" << b.cols() << ")";
    throw DimensionError(os.str());
  }
  const int m = a.rows(), k = a.cols(), n = b.cols();
  std::vector<T> out(static_cast<std::size_t>(m) * n, T(0));
  const T* pa = a.data().data();
  const T* pb = b.data().data();
  for (int i = 0; i < m; ++i) {
    T* po = out.data() + static_cast<std::size_t>(i) * n;
    for (int p = 0; p < k; ++p) {
      const T av = pa[static_cast<std::size_t>(i) * k + p];
      if (av == T(0)) continue;
      const T* pr = pb + static_cast<std::size_t>(p) * n;
      for (int j = 0; j < n; ++j) po[j] += av * pr[j];
    }
  }
  auto res = make_result<T>({m, n}, std::move(out), "matmul", {a, b});
  if (auto* tape = GradTape<T>::active(); tape && (on_grad_path(a) || on_grad_path(b))) {
    auto da = a.raw(), db = b.raw(), dr = res.raw();
    bool ga = on_grad_path(a), gb = on_grad_path(b);
    tape->push(
        "matmul",
        [da, db, dr, m, k, n, ga, gb]() {
          if (dr->grad.empty()) return;
          const T* g = dr->grad.data();
          if (ga) {
            auto& gda = grad_buffer(da);
            const T* pb2 = db->data.data();
            for (int i = 0; i < m; ++i)
              for (int p = 0; p < k; ++p) {
                T acc = 0;
                const T* gr = g + static_cast<std::size_t>(i) * n;
                const T* br = pb2 + static_cast<std::size_t>(p) * n;
                for (int j = 0; j < n; ++j) acc += gr[j] * br[j];
                gda[static_cast<std::size_t>(i) * k + p] += acc;
              }
          }
          if (gb) {
            auto& gdb = grad_buffer(db);
            const T* pa2 = da->data.data();
            for (int p = 0; p < k; ++p)
              for (int i = 0; i < m; ++i) {
                const T av = pa2[static_cast<std::size_t>(i) * k + p];
                if (av == T(0)) continue;
                const T* gr = g + static_cast<std::size_t>(i) * n;
                T* br = gdb.data() + static_cast<std::size_t>(p) * n;
                for (int j = 0; j < n; ++j) br[j] += av * gr[j];
              }
          }
        },
        {a, b, res});
  }
  return res;
}

template <typename T>
Tensor<T> transpose(const Tensor<T>& x) {
  if (x.ndim() != 2) throw DimensionError("transpose: rank-2 tensor required");
  const int m = x.rows(), n = x.cols();
  std::vector<T> out(x.size());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      out[static_cast<std::size_t>(j) * m + i] = x.data()[static_cast<std::size_t>(i) * n + j];
  auto res = make_result<T>({n, m}, std::move(out), "transpose", {x});
  if (auto* tape = GradTape<T>::active(); tape && on_grad_path(x)) {
    auto dx = x.raw(), dr = res.raw();
    tape->push(
        "transpose",
        [dx, dr, m, n]() {
          if (dr->grad.empty()) return;
          auto& g = grad_buffer(dx);
          for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j)
              g[static_cast<std::size_t>(i) * n + j] +=
                  dr->grad[static_cast<std::size_t>(j) * m + i];
        },
        {x, res});
  }
  return res;
}

namespace {

template <typename T>
void require_same_shape(const char* op, const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": operand shapes differ");
  }
}

template <typename T, typename FwdFn, typename BwdFn>
Tensor<T> binary_pointwise(const char* op, const Tensor<T>& a, const Tensor<T>& b,
                           FwdFn fwd, BwdFn bwd) {
  require_same_shape(op, a, b);
  std::vector<T> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(a.data()[i], b.data()[i]);
  auto res = make_result<T>(a.shape(), std::move(out), op, {a, b});
  if (auto* tape = GradTape<T>::active(); tape && (on_grad_path(a) || on_grad_path(b))) {
    auto da = a.raw(), db = b.raw(), dr = res.raw();
    bool ga = on_grad_path(a), gb = on_grad_path(b);
    tape->push(
        op,
        [da, db, dr, ga, gb, bwd]() {
          if (dr->grad.empty()) return;
          for (std::size_t i = 0; i < dr->grad.size(); ++i) {
            auto [va, vb] = bwd(da->data[i], db->data[i]);
            if (ga) grad_buffer(da)[i] += dr->grad[i] * va;
            if (gb) grad_buffer(db)[i] += dr->grad[i] * vb;
          }
        },
        {a, b, res});
  }
  return res;
}

template <typename T, typename FwdFn, typename BwdFn>
Tensor<T> unary_pointwise(const char* op, const Tensor<T>& x, FwdFn fwd, BwdFn bwd) {
  std::vector<T> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(x.data()[i]);
  auto res = make_result<T>(x.shape(), std::move(out), op, {x});
  if (auto* tape = GradTape<T>::active(); tape && on_grad_path(x)) {
    auto dx = x.raw(), dr = res.raw();
    tape->push(
        op,
        [dx, dr, bwd]() {
          if (dr->grad.empty()) return;
          auto& g = grad_buffer(dx);
          for (std::size_t i = 0; i < dr->grad.size(); ++i)
            g[i] += dr->grad[i] * bwd(dx->data[i], dr->data[i]);
        },
        {x, res});
  }
  return res;
}

}  // namespace

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  return binary_pointwise<T>(
      "add", a, b, [](T x, T y) { return x + y; },
      [](T, T) { return std::pair<T, T>(T(1), T(1)); });
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  return binary_pointwise<T>(
      "sub", a, b, [](T x, T y) { return x - y; },
      [](T, T) { return std::pair<T, T>(T(1), T(-1)); });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  return binary_pointwise<T>(
      "mul", a, b, [](T x, T y) { return x * y; },
      [](T x, T y) { return std::pair<T, T>(y, x); });
}

template <typename T>
Tensor<T> add_rowvec(const Tensor<T>& x, const Tensor<T>& v) {
  if (x.ndim() != 2 || v.size() != static_cast<std::size_t>(x.cols())) {
    throw DimensionError("add_rowvec: v must have one entry per column of x");
  }
  const int m = x.rows(), n = x.cols();
  std::vector<T> out(x.size());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      out[static_cast<std::size_t>(i) * n + j] =
          x.data()[static_cast<std::size_t>(i) * n + j] + v.data()[j];
  auto res = make_result<T>(x.shape(), std::move(out), "add_rowvec", {x, v});
  if (auto* tape = GradTape<T>::active(); tape && (on_grad_path(x) || on_grad_path(v))) {
    auto dx = x.raw(), dv = v.raw(), dr = res.raw();
    bool gx = on_grad_path(x), gv = on_grad_path(v);
    tape->push(
        "add_rowvec",
        [dx, dv, dr, m, n, gx, gv]() {
          if (dr->grad.empty()) return;
          if (gx) {
            auto& g = grad_buffer(dx);
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += dr->grad[i];
          }
          if (gv) {
            auto& g = grad_buffer(dv);
            for (int i = 0; i < m; ++i)
              for (int j = 0; j < n; ++j) g[j] += dr->grad[static_cast<std::size_t>(i) * n + j];
          }
        },
        {x, v, res});
  }
  return res;
}

template <typename T>
Tensor<T> scale(const Tensor<T>& x, T c) {
  if (!std::isfinite(c)) throw NumericError("scale: non-finite coefficient");
  return unary_pointwise<T>(
      "scale", x, [c](T v) { return c * v; }, [c](T, T) { return c; });
}

template <typename T>
Tensor<T> scale_by(const Tensor<T>& s, const Tensor<T>& x) {
  if (s.size() != 1) throw DimensionError("scale_by: s must be a single-element tensor");
  const T sv = s.value();
  std::vector<T> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sv * x.data()[i];
  auto res = make_result<T>(x.shape(), std::move(out), "scale_by", {s, x});
  if (auto* tape = GradTape<T>::active(); tape && (on_grad_path(s) || on_grad_path(x))) {
    auto ds = s.raw(), dx = x.raw(), dr = res.raw();
    bool gs = on_grad_path(s), gx = on_grad_path(x);
    tape->push(
        "scale_by",
        [ds, dx, dr, gs, gx]() {
          if (dr->grad.empty()) return;
          const T sv2 = ds->data[0];
          if (gx) {
            auto& g = grad_buffer(dx);
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += sv2 * dr->grad[i];
          }
          if (gs) {
            T acc = 0;
            for (std::size_t i = 0; i < dr->grad.size(); ++i) acc += dr->grad[i] * dx->data[i];
            grad_buffer(ds)[0] += acc;
          }
        },
        {s, x, res});
  }
  return res;
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x) {
  return unary_pointwise<T>(
      "sigmoid", x,
      [](T v) {
        if (v >= T(0)) {
          const T e = std::exp(-v);
          return T(1) / (T(1) + e);
        }
        const T e = std::exp(v);
        return e / (T(1) + e);
      },
      [](T, T y) { return y * (T(1) - y); });
}

template <typename T>
Tensor<T> elu(const Tensor<T>& x) {
  return unary_pointwise<T>(
      "elu", x, [](T v) { return v > T(0) ? v : std::expm1(v); },
      [](T v, T y) { return v > T(0) ? T(1) : y + T(1); });
}

template <typename T>
Tensor<T> leaky_relu(const Tensor<T>& x, T slope) {
  return unary_pointwise<T>(
      "leaky_relu", x, [slope](T v) { return v > T(0) ? v : slope * v; },
      [slope](T v, T) { return v > T(0) ? T(1) : slope; });
}

template <typename T>
Tensor<T> softmax_rows(const Tensor<T>& x, const Mask* col_mask) {
  if (x.ndim() != 2) throw DimensionError("softmax_rows: rank-2 tensor required");
  const int m = x.rows(), n = x.cols();
  if (col_mask) {
    if (static_cast<int>(col_mask->size()) != n) {
      throw DimensionError("softmax_rows: mask length must equal column count");
    }
    bool any = false;
    for (auto v : *col_mask) any = any || v;
    if (!any) throw DegenerateError("softmax_rows: all columns masked");
  }
  std::vector<T> out(x.size(), T(0));
  for (int i = 0; i < m; ++i) {
    const T* xi = x.data().data() + static_cast<std::size_t>(i) * n;
    T* oi = out.data() + static_cast<std::size_t>(i) * n;
    T mx = -std::numeric_limits<T>::infinity();
    for (int j = 0; j < n; ++j)
      if (!col_mask || (*col_mask)[j]) mx = std::max(mx, xi[j]);
    T denom = 0;
    for (int j = 0; j < n; ++j) {
      if (col_mask && !(*col_mask)[j]) continue;
      oi[j] = std::exp(xi[j] - mx);
      denom += oi[j];
    }
    for (int j = 0; j < n; ++j) oi[j] /= denom;
    if (col_mask)
      for (int j = 0; j < n; ++j)
        if (!(*col_mask)[j]) oi[j] = T(0);
  }
  Mask mask_copy = col_mask ? *col_mask : Mask();
  auto res = make_result<T>(x.shape(), std::move(out), "softmax_rows", {x});
  if (auto* tape = GradTape<T>::active(); tape && on_grad_path(x)) {
    auto dx = x.raw(), dr = res.raw();
    tape->push(
        "softmax_rows",
        [dx, dr, m, n, mask_copy]() {
          if (dr->grad.empty()) return;
          auto& g = grad_buffer(dx);
          for (int i = 0; i < m; ++i) {
            const T* y = dr->data.data() + static_cast<std::size_t>(i) * n;
            const T* gy = dr->grad.data() + static_cast<std::size_t>(i) * n;
            T dot = 0;
            for (int j = 0; j < n; ++j) {
              if (!mask_copy.empty() && !mask_copy[j]) continue;
              dot += gy[j] * y[j];
            }
            T* gi = g.data() + static_cast<std::size_t>(i) * n;
            for (int j = 0; j < n; ++j) {
              if (!mask_copy.empty() && !mask_copy[j]) continue;
              gi[j] += y[j] * (gy[j] - dot);
            }
          }
        },
        {x, res});
  }
  return res;
}

template <typename T>
Tensor<T> group_norm(const Tensor<T>& x, int groups, const Tensor<T>& gamma,
                     const Tensor<T>& beta, T eps) {
  if (x.ndim() != 2) throw DimensionError("group_norm: rank-2 tensor required");
  const int m = x.rows(), n = x.cols();
  if (groups <= 0 || n % groups != 0) {
    throw ConfigError("group_norm: feature count must be divisible by groups");
  }
  if (eps <= T(0)) throw ConfigError("group_norm: eps must be positive");
  if (gamma.size() != static_cast<std::size_t>(n) || beta.size() != static_cast<std::size_t>(n)) {
    throw DimensionError("group_norm: gamma/beta must have one entry per feature");
  }
  const int gsz = n / groups;
  std::vector<T> out(x.size());
  std::vector<T> norm(x.size());   // pre-affine normalized values, kept for backward
  std::vector<T> inv_std(static_cast<std::size_t>(m) * groups);
  for (int i = 0; i < m; ++i) {
    for (int g = 0; g < groups; ++g) {
      const std::size_t base = static_cast<std::size_t>(i) * n + static_cast<std::size_t>(g) * gsz;
      T mean = 0;
      for (int j = 0; j < gsz; ++j) mean += x.data()[base + j];
      mean /= static_cast<T>(gsz);
      T var = 0;
      for (int j = 0; j < gsz; ++j) {
        const T d = x.data()[base + j] - mean;
        var += d * d;
      }
      var /= static_cast<T>(gsz);
      const T istd = T(1) / std::sqrt(var + eps);
      inv_std[static_cast<std::size_t>(i) * groups + g] = istd;
      for (int j = 0; j < gsz; ++j) {
        const T y = (x.data()[base + j] - mean) * istd;
        norm[base + j] = y;
        const int col = g * gsz + j;
        out[base + j] = gamma.data()[col] * y + beta.data()[col];
      }
    }
  }
  auto res = make_result<T>(x.shape(), std::move(out), "group_norm", {x, gamma, beta});
  if (auto* tape = GradTape<T>::active();
      tape && (on_grad_path(x) || on_grad_path(gamma) || on_grad_path(beta))) {
    auto dx = x.raw(), dg = gamma.raw(), db = beta.raw(), dr = res.raw();
    bool gx = on_grad_path(x), gg = on_grad_path(gamma), gb = on_grad_path(beta);
    tape->push(
        "group_norm",
        [dx, dg, db, dr, m, n, groups, gsz, gx, gg, gb, norm = std::move(norm),
         inv_std = std::move(inv_std)]() {
          if (dr->grad.empty()) return;
          for (int i = 0; i < m; ++i) {
            for (int g = 0; g < groups; ++g) {
              const std::size_t base =
                  static_cast<std::size_t>(i) * n + static_cast<std::size_t>(g) * gsz;
              const T istd = inv_std[static_cast<std::size_t>(i) * groups + g];
              // dy = dout * gamma; dx = istd * (dy - mean(dy) - y*mean(dy*y))
              T mean_dy = 0, mean_dyy = 0;
              for (int j = 0; j < gsz; ++j) {
                const int col = g * gsz + j;
                const T dy = dr->grad[base + j] * dg->data[col];
                mean_dy += dy;
                mean_dyy += dy * norm[base + j];
              }
              mean_dy /= static_cast<T>(gsz);
              mean_dyy /= static_cast<T>(gsz);
              for (int j = 0; j < gsz; ++j) {
                const int col = g * gsz + j;
                const T go = dr->grad[base + j];
                if (gx) {
                  const T dy = go * dg->data[col];
                  grad_buffer(dx)[base + j] += istd * (dy - mean_dy - norm[base + j] * mean_dyy);
                }
                if (gg) grad_buffer(dg)[col] += go * norm[base + j];
                if (gb) grad_buffer(db)[col] += go;
              }
            }
          }
        },
        {x, gamma, beta, res});
  }
  return res;
}

template <typename T>
Tensor<T> sum(const Tensor<T>& x) {
  T acc = 0;
  for (T v : x.data()) acc += v;
  auto res = make_result<T>({1, 1}, {acc}, "sum", {x});
  if (auto* tape = GradTape<T>::active(); tape && on_grad_path(x)) {
    auto dx = x.raw(), dr = res.raw();
    tape->push(
        "sum",
        [dx, dr]() {
          if (dr->grad.empty()) return;
          auto& g = grad_buffer(dx);
          for (auto& v : g) v += dr->grad[0];
        },
        {x, res});
  }
  return res;
}

template <typename T>
Tensor<T> concat_cols(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.ndim() != 2 || b.ndim() != 2 || a.rows() != b.rows()) {
    throw DimensionError("concat_cols: row counts differ");
  }
  const int m = a.rows(), na = a.cols(), nb = b.cols();
  std::vector<T> out(static_cast<std::size_t>(m) * (na + nb));
  for (int i = 0; i < m; ++i) {
    std::copy_n(a.data().begin() + static_cast<std::size_t>(i) * na, na,
                out.begin() + static_cast<std::size_t>(i) * (na + nb));
    std::copy_n(b.data().begin() + static_cast<std::size_t>(i) * nb, nb,
                out.begin() + static_cast<std::size_t>(i) * (na + nb) + na);
  }
  auto res = make_result<T>({m, na + nb}, std::move(out), "concat_cols", {a, b});
  if (auto* tape = GradTape<T>::active(); tape && (on_grad_path(a) || on_grad_path(b))) {
    auto da = a.raw(), db = b.raw(), dr = res.raw();
    bool ga = on_grad_path(a), gb = on_grad_path(b);
    tape->push(
        "concat_cols",
        [da, db, dr, m, na, nb, ga, gb]() {
          if (dr->grad.empty()) return;
          for (int i = 0; i < m; ++i) {
            const T* g = dr->grad.data() + static_cast<std::size_t>(i) * (na + nb);
            if (ga) {
              auto& gd = grad_buffer(da);
              for (int j = 0; j < na; ++j) gd[static_cast<std::size_t>(i) * na + j] += g[j];
            }
            if (gb) {
              auto& gd = grad_buffer(db);
              for (int j = 0; j < nb; ++j) gd[static_cast<std::size_t>(i) * nb + j] += g[na + j];
            }
          }
        },
        {a, b, res});
  }
  return res;
}

template <typename T>
Tensor<T> slice_cols(const Tensor<T>& x, int first, int count) {
  if (x.ndim() != 2 || first < 0 || count <= 0 || first + count > x.cols()) {
    throw DimensionError("slice_cols: column range out of bounds");
  }
  const int m = x.rows(), n = x.cols();
  std::vector<T> out(static_cast<std::size_t>(m) * count);
  for (int i = 0; i < m; ++i)
    std::copy_n(x.data().begin() + static_cast<std::size_t>(i) * n + first, count,
                out.begin() + static_cast<std::size_t>(i) * count);
  auto res = make_result<T>({m, count}, std::move(out), "slice_cols", {x});
  if (auto* tape = GradTape<T>::active(); tape && on_grad_path(x)) {
    auto dx = x.raw(), dr = res.raw();
    tape->push(
        "slice_cols",
        [dx, dr, m, n, first, count]() {
          if (dr->grad.empty()) return;
          auto& g = grad_buffer(dx);
          for (int i = 0; i < m; ++i)
            for (int j = 0; j < count; ++j)
              g[static_cast<std::size_t>(i) * n + first + j] +=
                  dr->grad[static_cast<std::size_t>(i) * count + j];
        },
        {x, res});
  }
  return res;
}

template <typename T>
Tensor<T> take_rows(const Tensor<T>& x, std::span<const int> idx) {
  if (x.ndim() != 2) throw DimensionError("take_rows: rank-2 tensor required");
  const int m = x.rows(), n = x.cols();
  for (int i : idx) {
    if (i < 0 || i >= m) throw DimensionError("take_rows: row index out of range");
  }
  std::vector<T> out(idx.size() * static_cast<std::size_t>(n));
  for (std::size_t r = 0; r < idx.size(); ++r)
    std::copy_n(x.data().begin() + static_cast<std::size_t>(idx[r]) * n, n,
                out.begin() + r * n);
  std::vector<int> idx_copy(idx.begin(), idx.end());
  auto res =
      make_result<T>({static_cast<int>(idx.size()), n}, std::move(out), "take_rows", {x});
  if (auto* tape = GradTape<T>::active(); tape && on_grad_path(x)) {
    auto dx = x.raw(), dr = res.raw();
    tape->push(
        "take_rows",
        [dx, dr, n, idx_copy = std::move(idx_copy)]() {
          if (dr->grad.empty()) return;
          auto& g = grad_buffer(dx);
          for (std::size_t r = 0; r < idx_copy.size(); ++r)
            for (int j = 0; j < n; ++j)
              g[static_cast<std::size_t>(idx_copy[r]) * n + j] += dr->grad[r * n + j];
        },
        {x, res});
  }
  return res;
}

template <typename T>
Tensor<T> zero_masked_rows(const Tensor<T>& x, const Mask& m) {
  if (x.ndim() != 2 || static_cast<int>(m.size()) != x.rows()) {
    throw DimensionError("zero_masked_rows: mask length must equal row count");
  }
  const int rows = x.rows(), n = x.cols();
  std::vector<T> out = x.data();
  for (int i = 0; i < rows; ++i) {
    if (!m[i]) std::fill_n(out.begin() + static_cast<std::size_t>(i) * n, n, T(0));
  }
  Mask mc = m;
  auto res = make_result<T>(x.shape(), std::move(out), "zero_masked_rows", {x});
  if (auto* tape = GradTape<T>::active(); tape && on_grad_path(x)) {
    auto dx = x.raw(), dr = res.raw();
    tape->push(
        "zero_masked_rows",
        [dx, dr, rows, n, mc = std::move(mc)]() {
          if (dr->grad.empty()) return;
          auto& g = grad_buffer(dx);
          for (int i = 0; i < rows; ++i) {
            if (!mc[i]) continue;
            for (int j = 0; j < n; ++j)
              g[static_cast<std::size_t>(i) * n + j] +=
                  dr->grad[static_cast<std::size_t>(i) * n + j];
          }
        },
        {x, res});
  }
  return res;
}

template <typename T>
Tensor<T> where_rows(const Mask& take_a, const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape("where_rows", a, b);
  if (a.ndim() != 2 || static_cast<int>(take_a.size()) != a.rows()) {
    throw DimensionError("where_rows: selector length must equal row count");
  }
  const int m = a.rows(), n = a.cols();
  std::vector<T> out(a.size());
  for (int i = 0; i < m; ++i) {
    const auto& src = take_a[i] ? a.data() : b.data();
    std::copy_n(src.begin() + static_cast<std::size_t>(i) * n, n,
                out.begin() + static_cast<std::size_t>(i) * n);
  }
  Mask sel = take_a;
  auto res = make_result<T>(a.shape(), std::move(out), "where_rows", {a, b});
  if (auto* tape = GradTape<T>::active(); tape && (on_grad_path(a) || on_grad_path(b))) {
    auto da = a.raw(), db = b.raw(), dr = res.raw();
    bool ga = on_grad_path(a), gb = on_grad_path(b);
    tape->push(
        "where_rows",
        [da, db, dr, m, n, ga, gb, sel = std::move(sel)]() {
          if (dr->grad.empty()) return;
          for (int i = 0; i < m; ++i) {
            const bool ta = sel[i];
            if (ta && !ga) continue;
            if (!ta && !gb) continue;
            auto& g = ta ? grad_buffer(da) : grad_buffer(db);
            for (int j = 0; j < n; ++j)
              g[static_cast<std::size_t>(i) * n + j] +=
                  dr->grad[static_cast<std::size_t>(i) * n + j];
          }
        },
        {a, b, res});
  }
  return res;
}

template <typename T>
Tensor<T> shift_rows_replicate(const Tensor<T>& x, int delta, const Mask* m) {
  if (x.ndim() != 2) throw DimensionError("shift_rows_replicate: rank-2 tensor required");
  if (delta < 1) throw ConfigError("shift_rows_replicate: delta must be >= 1");
  if (m && static_cast<int>(m->size()) != x.rows()) {
    throw DimensionError("shift_rows_replicate: mask length must equal row count");
  }
  const int rows = x.rows(), n = x.cols();
  std::vector<int> src(static_cast<std::size_t>(rows));
  for (int t = 0; t < rows; ++t) {
    const bool masked = m && !(*m)[t];
    src[t] = (!masked && t >= delta) ? t - delta : t;
  }
  std::vector<T> out(x.size());
  for (int t = 0; t < rows; ++t)
    std::copy_n(x.data().begin() + static_cast<std::size_t>(src[t]) * n, n,
                out.begin() + static_cast<std::size_t>(t) * n);
  auto res = make_result<T>(x.shape(), std::move(out), "shift_rows_replicate", {x});
  if (auto* tape = GradTape<T>::active(); tape && on_grad_path(x)) {
    auto dx = x.raw(), dr = res.raw();
    tape->push(
        "shift_rows_replicate",
        [dx, dr, rows, n, src = std::move(src)]() {
          if (dr->grad.empty()) return;
          auto& g = grad_buffer(dx);
          for (int t = 0; t < rows; ++t)
            for (int j = 0; j < n; ++j)
              g[static_cast<std::size_t>(src[t]) * n + j] +=
                  dr->grad[static_cast<std::size_t>(t) * n + j];
        },
        {x, res});
  }
  return res;
}

template <typename T>
Tensor<T> row_sums(const Tensor<T>& x) {
  if (x.ndim() != 2) throw DimensionError("row_sums: rank-2 tensor required");
  const int m = x.rows(), n = x.cols();
  std::vector<T> out(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    T acc = 0;
    for (int j = 0; j < n; ++j) acc += x.data()[static_cast<std::size_t>(i) * n + j];
    out[static_cast<std::size_t>(i)] = acc;
  }
  auto res = make_result<T>({m, 1}, std::move(out), "row_sums", {x});
  if (auto* tape = GradTape<T>::active(); tape && on_grad_path(x)) {
    auto dx = x.raw(), dr = res.raw();
    tape->push(
        "row_sums",
        [dx, dr, m, n]() {
          if (dr->grad.empty()) return;
          auto& g = grad_buffer(dx);
          for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j)
              g[static_cast<std::size_t>(i) * n + j] += dr->grad[static_cast<std::size_t>(i)];
        },
        {x, res});
  }
  return res;
}

template <typename T>
Tensor<T> rsqrt(const Tensor<T>& x) {
  for (T v : x.data()) {
    if (v <= T(0)) throw NumericError("rsqrt: non-positive input");
  }
  return unary_pointwise<T>(
      "rsqrt", x, [](T v) { return T(1) / std::sqrt(v); },
      [](T, T y) { return T(-0.5) * y * y * y; });
}

template <typename T>
Tensor<T> mul_colvec(const Tensor<T>& x, const Tensor<T>& v) {
  if (x.ndim() != 2 || v.size() != static_cast<std::size_t>(x.rows())) {
    throw DimensionError("mul_colvec: v must have one entry per row of x");
  }
  const int m = x.rows(), n = x.cols();
  std::vector<T> out(x.size());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      out[static_cast<std::size_t>(i) * n + j] =
          x.data()[static_cast<std::size_t>(i) * n + j] * v.data()[static_cast<std::size_t>(i)];
  auto res = make_result<T>(x.shape(), std::move(out), "mul_colvec", {x, v});
  if (auto* tape = GradTape<T>::active(); tape && (on_grad_path(x) || on_grad_path(v))) {
    auto dx = x.raw(), dv = v.raw(), dr = res.raw();
    bool gx = on_grad_path(x), gv = on_grad_path(v);
    tape->push(
        "mul_colvec",
        [dx, dv, dr, m, n, gx, gv]() {
          if (dr->grad.empty()) return;
          for (int i = 0; i < m; ++i) {
            T acc = 0;
            for (int j = 0; j < n; ++j) {
              const std::size_t k = static_cast<std::size_t>(i) * n + j;
              if (gx) grad_buffer(dx)[k] += dr->grad[k] * dv->data[static_cast<std::size_t>(i)];
              acc += dr->grad[k] * dx->data[k];
            }
            if (gv) grad_buffer(dv)[static_cast<std::size_t>(i)] += acc;
          }
        },
        {x, v, res});
  }
  return res;
}

template <typename T>
Tensor<T> mul_rowvec(const Tensor<T>& x, const Tensor<T>& v) {
  if (x.ndim() != 2 || v.size() != static_cast<std::size_t>(x.cols())) {
    throw DimensionError("mul_rowvec: v must have one entry per column of x");
  }
  const int m = x.rows(), n = x.cols();
  std::vector<T> out(x.size());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      out[static_cast<std::size_t>(i) * n + j] =
          x.data()[static_cast<std::size_t>(i) * n + j] * v.data()[static_cast<std::size_t>(j)];
  auto res = make_result<T>(x.shape(), std::move(out), "mul_rowvec", {x, v});
  if (auto* tape = GradTape<T>::active(); tape && (on_grad_path(x) || on_grad_path(v))) {
    auto dx = x.raw(), dv = v.raw(), dr = res.raw();
    bool gx = on_grad_path(x), gv = on_grad_path(v);
    tape->push(
        "mul_rowvec",
        [dx, dv, dr, m, n, gx, gv]() {
          if (dr->grad.empty()) return;
          for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) {
              const std::size_t k = static_cast<std::size_t>(i) * n + j;
              if (gx) grad_buffer(dx)[k] += dr->grad[k] * dv->data[static_cast<std::size_t>(j)];
              if (gv) grad_buffer(dv)[static_cast<std::size_t>(j)] += dr->grad[k] * dx->data[k];
            }
        },
        {x, v, res});
  }
  return res;
}

template <typename T>
Tensor<T> segment_softmax(const Tensor<T>& scores, std::span<const int> segment,
                          int n_segments) {
  if (scores.cols() != 1 || scores.size() != segment.size()) {
    throw DimensionError("segment_softmax: scores must be {e,1} with one segment id each");
  }
  for (int s : segment) {
    if (s < 0 || s >= n_segments) throw DimensionError("segment_softmax: segment id out of range");
  }
  const std::size_t e = scores.size();
  std::vector<T> mx(static_cast<std::size_t>(n_segments), -std::numeric_limits<T>::infinity());
  for (std::size_t i = 0; i < e; ++i)
    mx[segment[i]] = std::max(mx[segment[i]], scores.data()[i]);
  std::vector<T> denom(static_cast<std::size_t>(n_segments), T(0));
  std::vector<T> out(e);
  for (std::size_t i = 0; i < e; ++i) {
    out[i] = std::exp(scores.data()[i] - mx[segment[i]]);
    denom[segment[i]] += out[i];
  }
  for (std::size_t i = 0; i < e; ++i) out[i] /= denom[segment[i]];
  std::vector<int> seg(segment.begin(), segment.end());
  auto res = make_result<T>(scores.shape(), std::move(out), "segment_softmax", {scores});
  if (auto* tape = GradTape<T>::active(); tape && on_grad_path(scores)) {
    auto dx = scores.raw(), dr = res.raw();
    tape->push(
        "segment_softmax",
        [dx, dr, n_segments, seg = std::move(seg)]() {
          if (dr->grad.empty()) return;
          std::vector<T> dot(static_cast<std::size_t>(n_segments), T(0));
          for (std::size_t i = 0; i < seg.size(); ++i)
            dot[seg[i]] += dr->grad[i] * dr->data[i];
          auto& g = grad_buffer(dx);
          for (std::size_t i = 0; i < seg.size(); ++i)
            g[i] += dr->data[i] * (dr->grad[i] - dot[seg[i]]);
        },
        {scores, res});
  }
  return res;
}

template <typename T>
Tensor<T> segment_weighted_rowsum(const Tensor<T>& w, const Tensor<T>& rows,
                                  std::span<const int> target, int n_rows_out) {
  if (w.cols() != 1 || w.size() != target.size() ||
      rows.rows() != static_cast<int>(target.size())) {
    throw DimensionError("segment_weighted_rowsum: w, rows and target sizes disagree");
  }
  for (int t : target) {
    if (t < 0 || t >= n_rows_out)
      throw DimensionError("segment_weighted_rowsum: target out of range");
  }
  const int n = rows.cols();
  std::vector<T> out(static_cast<std::size_t>(n_rows_out) * n, T(0));
  for (std::size_t e = 0; e < target.size(); ++e) {
    const T we = w.data()[e];
    const T* r = rows.data().data() + e * static_cast<std::size_t>(n);
    T* o = out.data() + static_cast<std::size_t>(target[e]) * n;
    for (int j = 0; j < n; ++j) o[j] += we * r[j];
  }
  std::vector<int> tgt(target.begin(), target.end());
  auto res = make_result<T>({n_rows_out, n}, std::move(out), "segment_weighted_rowsum",
                            {w, rows});
  if (auto* tape = GradTape<T>::active(); tape && (on_grad_path(w) || on_grad_path(rows))) {
    auto dw = w.raw(), drows = rows.raw(), dr = res.raw();
    bool gw = on_grad_path(w), gr = on_grad_path(rows);
    tape->push(
        "segment_weighted_rowsum",
        [dw, drows, dr, n, gw, gr, tgt = std::move(tgt)]() {
          if (dr->grad.empty()) return;
          for (std::size_t e = 0; e < tgt.size(); ++e) {
            const T* g = dr->grad.data() + static_cast<std::size_t>(tgt[e]) * n;
            if (gw) {
              T acc = 0;
              const T* r = drows->data.data() + e * static_cast<std::size_t>(n);
              for (int j = 0; j < n; ++j) acc += g[j] * r[j];
              grad_buffer(dw)[e] += acc;
            }
            if (gr) {
              auto& gd = grad_buffer(drows);
              const T we = dw->data[e];
              for (int j = 0; j < n; ++j) gd[e * static_cast<std::size_t>(n) + j] += we * g[j];
            }
          }
        },
        {w, rows, res});
  }
  return res;
}

template <typename T>
Tensor<T> masked_weighted_nll(const Tensor<T>& probs, std::span<const int> labels,
                              std::span<const T> class_weights, const Mask& m) {
  if (probs.ndim() != 2 || probs.rows() != static_cast<int>(labels.size()) ||
      m.size() != labels.size()) {
    throw DimensionError("masked_weighted_nll: probs, labels and mask sizes disagree");
  }
  const int rows = probs.rows(), c = probs.cols();
  if (static_cast<int>(class_weights.size()) != c) {
    throw DimensionError("masked_weighted_nll: one weight per class required");
  }
  constexpr double kLogFloor = 1e-12;
  int n_valid = 0;
  for (auto v : m) n_valid += v ? 1 : 0;
  if (n_valid == 0) throw DegenerateError("masked_weighted_nll: all rows masked");
  T acc = 0;
  for (int i = 0; i < rows; ++i) {
    if (!m[i]) continue;
    const int y = labels[i];
    if (y < 0 || y >= c) throw DataError("masked_weighted_nll: label out of range");
    const T p = probs.data()[static_cast<std::size_t>(i) * c + y];
    acc -= class_weights[y] * std::log(std::max(p, static_cast<T>(kLogFloor)));
  }
  acc /= static_cast<T>(n_valid);
  std::vector<int> lab(labels.begin(), labels.end());
  std::vector<T> cw(class_weights.begin(), class_weights.end());
  Mask mc = m;
  auto res = make_result<T>({1, 1}, {acc}, "masked_weighted_nll", {probs});
  if (auto* tape = GradTape<T>::active(); tape && on_grad_path(probs)) {
    auto dp = probs.raw(), dr = res.raw();
    tape->push(
        "masked_weighted_nll",
        [dp, dr, c, n_valid, lab = std::move(lab), cw = std::move(cw), mc = std::move(mc)]() {
          if (dr->grad.empty()) return;
          const T g = dr->grad[0];
          auto& gd = grad_buffer(dp);
          for (std::size_t i = 0; i < lab.size(); ++i) {
            if (!mc[i]) continue;
            const int y = lab[i];
            const T p = dp->data[i * c + y];
            if (p <= static_cast<T>(kLogFloor)) continue;  // clamped region: flat
            gd[i * c + y]
                += g * (-cw[y] / (static_cast<T>(n_valid) * p));
          }
        },
        {probs, res});
  }
  return res;
}

template <typename T>
Tensor<T> dropout(const Tensor<T>& x, T rate, std::mt19937_64& rng) {
  if (rate < T(0) || rate >= T(1)) throw ConfigError("dropout: rate must lie in [0,1)");
  if (rate == T(0)) return x;
  std::bernoulli_distribution drop(static_cast<double>(rate));
  const T inv_keep = T(1) / (T(1) - rate);
  std::vector<T> keep(x.size());
  std::vector<T> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    keep[i] = drop(rng) ? T(0) : inv_keep;
    out[i] = x.data()[i] * keep[i];
  }
  auto res = make_result<T>(x.shape(), std::move(out), "dropout", {x});
  if (auto* tape = GradTape<T>::active(); tape && on_grad_path(x)) {
    auto dx = x.raw(), dr = res.raw();
    tape->push(
        "dropout",
        [dx, dr, keep = std::move(keep)]() {
          if (dr->grad.empty()) return;
          auto& g = grad_buffer(dx);
          for (std::size_t i = 0; i < g.size(); ++i) g[i] += dr->grad[i] * keep[i];
        },
        {x, res});
  }
  return res;
}

// ---- verification oracle ----------------------------------------------------

template <typename T>
double finite_diff_check(const std::function<Tensor<T>()>& f,
                         std::span<const Tensor<T>> wrt, T h) {
  if (h < T(1e-7) || h > T(1e-3)) throw ConfigError("finite_diff_check: h out of [1e-7,1e-3]");
  std::vector<std::vector<T>> analytic;
  {
    GradTape<T> tape;
    Tensor<T> loss = f();
    tape.backward(loss);
    for (const auto& t : wrt) analytic.push_back(t.grad());
  }
  double worst = 0.0;
  for (std::size_t ti = 0; ti < wrt.size(); ++ti) {
    auto& data = const_cast<Tensor<T>&>(wrt[ti]).data();
    for (std::size_t i = 0; i < data.size(); ++i) {
      const T orig = data[i];
      data[i] = orig + h;
      const double fp = static_cast<double>(f().value());
      data[i] = orig - h;
      const double fm = static_cast<double>(f().value());
      data[i] = orig;
      const double numeric = (fp - fm) / (2.0 * static_cast<double>(h));
      const double a = static_cast<double>(analytic[ti][i]);
      const double rel = std::abs(a - numeric) / (std::abs(a) + 1e-8);
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

template <typename T>
double finite_diff_check(const std::function<Tensor<T>()>& f, const Tensor<T>& x, T h) {
  std::vector<Tensor<T>> wrt{x};
  return finite_diff_check<T>(f, std::span<const Tensor<T>>(wrt), h);
}

template <typename T>
Tensor<T> positional_encoding(int n, int d) {
  if (n <= 0) throw DimensionError("positional_encoding: n must be positive");
  if (d <= 0 || d % 2 != 0) throw ConfigError("positional_encoding: d must be even");
  std::vector<T> out(static_cast<std::size_t>(n) * d);
  for (int pos = 0; pos < n; ++pos) {
    for (int i = 0; i < d / 2; ++i) {
      const double angle =
          pos / std::pow(10000.0, (2.0 * i) / static_cast<double>(d));
      out[static_cast<std::size_t>(pos) * d + 2 * i] = static_cast<T>(std::sin(angle));
      out[static_cast<std::size_t>(pos) * d + 2 * i + 1] = static_cast<T>(std::cos(angle));
    }
  }
  return Tensor<T>::from({n, d}, std::move(out));
}

// ---- instantiations ---------------------------------------------------------

#define ERC_INSTANTIATE(T)                                                              \
  template class Tensor<T>;                                                             \
  template class GradTape<T>;                                                           \
  template Tensor<T> make_result<T>(std::vector<int>, std::vector<T>, const char*,      \
                                    std::initializer_list<Tensor<T>>);                  \
  template Tensor<T> matmul<T>(const Tensor<T>&, const Tensor<T>&);                     \
  template Tensor<T> transpose<T>(const Tensor<T>&);                                    \
  template Tensor<T> add<T>(const Tensor<T>&, const Tensor<T>&);                        \
  template Tensor<T> sub<T>(const Tensor<T>&, const Tensor<T>&);                        \
  template Tensor<T> mul<T>(const Tensor<T>&, const Tensor<T>&);                        \
  template Tensor<T> add_rowvec<T>(const Tensor<T>&, const Tensor<T>&);                 \
  template Tensor<T> scale<T>(const Tensor<T>&, T);                                     \
  template Tensor<T> scale_by<T>(const Tensor<T>&, const Tensor<T>&);                   \
  template Tensor<T> sigmoid<T>(const Tensor<T>&);                                      \
  template Tensor<T> elu<T>(const Tensor<T>&);                                          \
  template Tensor<T> leaky_relu<T>(const Tensor<T>&, T);                                \
  template Tensor<T> softmax_rows<T>(const Tensor<T>&, const Mask*);                    \
  template Tensor<T> group_norm<T>(const Tensor<T>&, int, const Tensor<T>&,             \
                                   const Tensor<T>&, T);                                \
  template Tensor<T> sum<T>(const Tensor<T>&);                                          \
  template Tensor<T> concat_cols<T>(const Tensor<T>&, const Tensor<T>&);                \
  template Tensor<T> slice_cols<T>(const Tensor<T>&, int, int);                         \
  template Tensor<T> take_rows<T>(const Tensor<T>&, std::span<const int>);              \
  template Tensor<T> zero_masked_rows<T>(const Tensor<T>&, const Mask&);                \
  template Tensor<T> where_rows<T>(const Mask&, const Tensor<T>&, const Tensor<T>&);    \
  template Tensor<T> shift_rows_replicate<T>(const Tensor<T>&, int, const Mask*);       \
  template Tensor<T> row_sums<T>(const Tensor<T>&);                                     \
  template Tensor<T> rsqrt<T>(const Tensor<T>&);                                        \
  template Tensor<T> mul_colvec<T>(const Tensor<T>&, const Tensor<T>&);                 \
  template Tensor<T> mul_rowvec<T>(const Tensor<T>&, const Tensor<T>&);                 \
  template Tensor<T> segment_softmax<T>(const Tensor<T>&, std::span<const int>, int);   \
  template Tensor<T> segment_weighted_rowsum<T>(const Tensor<T>&, const Tensor<T>&,    \
                                                std::span<const int>, int);             \
  template Tensor<T> masked_weighted_nll<T>(const Tensor<T>&, std::span<const int>,     \
                                            std::span<const T>, const Mask&);           \
  template Tensor<T> dropout<T>(const Tensor<T>&, T, std::mt19937_64&);                 \
  template void backward<T>(const Tensor<T>&);                                          \
  template double finite_diff_check<T>(const std::function<Tensor<T>()>&,               \
                                       std::span<const Tensor<T>>, T);                  \
  template double finite_diff_check<T>(const std::function<Tensor<T>()>&,               \
                                       const Tensor<T>&, T);                            \
  template Tensor<T> positional_encoding<T>(int, int);

ERC_INSTANTIATE(float)
ERC_INSTANTIATE(double)

#undef ERC_INSTANTIATE

}  // namespace erc
