#pragma once

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "erc/tensor.hpp"

namespace erc {

// Ordered, named registry of every learnable tensor. Order is the
// construction order and is what the optimizer and checkpoint rely on.
template <typename T>
class ParamStore {
 public:
  Tensor<T> add(const std::string& name, Tensor<T> t) {
    items_.emplace_back(name, t);
    return t;
  }

  const std::vector<std::pair<std::string, Tensor<T>>>& items() const { return items_; }

  Tensor<T>* find(const std::string& name) {
    for (auto& [n, t] : items_) {
      if (n == name) return &t;
    }
    return nullptr;
  }

  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (const auto& [name, t] : items_) n += t.size();
    return n;
  }

 private:
  std::vector<std::pair<std::string, Tensor<T>>> items_;
};

// uniform(+-sqrt(6/(fan_in+fan_out))) symmetric init for affine weights.
template <typename T>
Tensor<T> xavier_uniform(std::vector<int> shape, int fan_in, int fan_out,
                         std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / (fan_in + fan_out));
  std::uniform_real_distribution<double> u(-bound, bound);
  std::size_t n = 1;
  for (int s : shape) n *= static_cast<std::size_t>(s);
  std::vector<T> v(n);
  for (auto& x : v) x = static_cast<T>(u(rng));
  return Tensor<T>::param(std::move(shape), std::move(v));
}

template <typename T>
Tensor<T> normal_init(std::vector<int> shape, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, stddev);
  std::size_t n = 1;
  for (int s : shape) n *= static_cast<std::size_t>(s);
  std::vector<T> v(n);
  for (auto& x : v) x = static_cast<T>(g(rng));
  return Tensor<T>::param(std::move(shape), std::move(v));
}

template <typename T>
Tensor<T> const_param(std::vector<int> shape, T value) {
  std::size_t n = 1;
  for (int s : shape) n *= static_cast<std::size_t>(s);
  return Tensor<T>::param(std::move(shape), std::vector<T>(n, value));
}

}  // namespace erc
