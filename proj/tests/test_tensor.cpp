#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "erc/tensor.hpp"

using erc::GradTape;
using erc::Mask;
using erc::Tensor;

namespace {

Tensor<double> rand_tensor(std::vector<int> shape, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  std::size_t n = 1;
  for (int s : shape) n *= static_cast<std::size_t>(s);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return Tensor<double>::param(std::move(shape), std::move(v));
}

}  // namespace

TEST_CASE("matmul basics") {
  auto eye = Tensor<double>::from({2, 2}, {1, 0, 0, 1});
  auto a = Tensor<double>::from({2, 2}, {3, -1, 2, 5});
  auto r = erc::matmul(eye, a);
  CHECK(r.data() == a.data());

  auto b = Tensor<double>::from({2, 2}, {1, 2, 3, 4});
  auto c = Tensor<double>::from({2, 1}, {0, 1});
  auto r2 = erc::matmul(b, c);
  CHECK(r2.data() == std::vector<double>{2, 4});

  auto z = erc::matmul(Tensor<double>::zeros({2, 3}), Tensor<double>::full({3, 2}, 1.0));
  CHECK(z.data() == std::vector<double>(4, 0.0));

  CHECK_THROWS_AS(erc::matmul(Tensor<double>::zeros({2, 3}), Tensor<double>::zeros({2, 3})),
                  erc::DimensionError);
}

TEST_CASE("softmax rows") {
  auto flat = erc::softmax_rows(Tensor<double>::from({1, 3}, {0, 0, 0}));
  for (double v : flat.data()) CHECK(v == doctest::Approx(1.0 / 3.0));

  auto stable = erc::softmax_rows(Tensor<double>::from({1, 2}, {1000, 0}));
  CHECK(stable.data()[0] == doctest::Approx(1.0));
  CHECK(stable.data()[1] == doctest::Approx(0.0));

  auto closed = erc::softmax_rows(Tensor<double>::from({1, 2}, {std::log(2.0), 0}));
  CHECK(closed.data()[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(closed.data()[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  Mask m{1, 0, 1};
  auto masked = erc::softmax_rows(Tensor<double>::from({2, 3}, {5, 100, 5, 1, -3, 2}), &m);
  CHECK(masked.at(0, 1) == 0.0);
  CHECK(masked.at(1, 1) == 0.0);
  CHECK(masked.at(0, 0) + masked.at(0, 2) == doctest::Approx(1.0).epsilon(1e-9));

  Mask none{0, 0};
  CHECK_THROWS_AS(erc::softmax_rows(Tensor<double>::zeros({1, 2}), &none),
                  erc::DegenerateError);
}

TEST_CASE("softmax unmasked rows sum to one (property)") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int it = 0; it < 50; ++it) {
    std::vector<double> v(24);
    for (auto& x : v) x = u(rng);
    auto s = erc::softmax_rows(Tensor<double>::from({4, 6}, v));
    for (int i = 0; i < 4; ++i) {
      double acc = 0;
      for (int j = 0; j < 6; ++j) acc += s.at(i, j);
      CHECK(std::abs(acc - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("group norm") {
  auto gamma = Tensor<double>::full({1, 4}, 1.0);
  auto beta = Tensor<double>::zeros({1, 4});

  auto constant = erc::group_norm(Tensor<double>::full({1, 4}, 3.25), 1, gamma, beta, 1e-5);
  for (double v : constant.data()) CHECK(v == doctest::Approx(0.0));

  auto g2 = Tensor<double>::full({1, 2}, 1.0);
  auto b2 = Tensor<double>::zeros({1, 2});
  auto pm = erc::group_norm(Tensor<double>::from({1, 2}, {1, -1}), 1, g2, b2, 1e-5);
  CHECK(pm.data()[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(pm.data()[1] == doctest::Approx(-1.0).epsilon(1e-4));

  auto beta_only = erc::group_norm(Tensor<double>::from({1, 4}, {9, -2, 4, 4}), 2,
                                   Tensor<double>::zeros({1, 4}),
                                   Tensor<double>::from({1, 4}, {7, 7, 7, 7}), 1e-5);
  for (double v : beta_only.data()) CHECK(v == doctest::Approx(7.0));

  CHECK_THROWS_AS(erc::group_norm(Tensor<double>::zeros({1, 4}), 3, gamma, beta, 1e-5),
                  erc::ConfigError);
}

TEST_CASE("group norm moments (property)") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> dist(0.0, 2.0);
  const int d = 12, groups = 3, gsz = d / groups;
  std::vector<double> v(2 * d);
  for (auto& x : v) x = dist(rng);
  auto out = erc::group_norm(Tensor<double>::from({2, d}, v), groups,
                             Tensor<double>::full({1, d}, 1.0),
                             Tensor<double>::zeros({1, d}), 1e-8);
  for (int i = 0; i < 2; ++i) {
    for (int g = 0; g < groups; ++g) {
      double mean = 0, var = 0;
      for (int j = 0; j < gsz; ++j) mean += out.at(i, g * gsz + j);
      mean /= gsz;
      for (int j = 0; j < gsz; ++j) {
        double dd = out.at(i, g * gsz + j) - mean;
        var += dd * dd;
      }
      var /= gsz;
      CHECK(std::abs(mean) < 1e-6);
      CHECK(std::abs(var - 1.0) < 1e-4);
    }
  }
}

TEST_CASE("backward basics") {
  {
    GradTape<double> tape;
    auto x = Tensor<double>::param({1, 3}, {4, -1, 2});
    auto loss = erc::sum(x);
    tape.backward(loss);
    CHECK(x.grad() == std::vector<double>{1, 1, 1});
  }
  {
    GradTape<double> tape;
    auto x = Tensor<double>::param({1, 2}, {1, 2});
    auto loss = erc::sum(erc::mul(x, x));
    tape.backward(loss);
    CHECK(x.grad() == std::vector<double>{2, 4});
  }
  {
    GradTape<double> tape;
    auto x = Tensor<double>::param({1, 1}, {0});
    auto loss = erc::sum(erc::sigmoid(x));
    tape.backward(loss);
    CHECK(x.grad()[0] == doctest::Approx(0.25));
  }
  {
    GradTape<double> tape;
    auto x = Tensor<double>::param({2, 2}, {1, 2, 3, 4});
    CHECK_THROWS_AS(tape.backward(x), erc::DimensionError);
  }
}

TEST_CASE("finite difference oracle") {
  auto x = Tensor<double>::param({1, 3}, {0.5, -1.25, 2.0});
  auto f = [&]() { return erc::sum(erc::mul(x, x)); };
  CHECK(erc::finite_diff_check<double>(f, x, 1e-5) < 1e-6);

  auto c = Tensor<double>::param({1, 2}, {3.0, -7.0});
  auto fconst = [&]() { return Tensor<double>::scalar(2.5); };
  CHECK(erc::finite_diff_check<double>(fconst, c, 1e-5) == 0.0);
}

TEST_CASE("per-primitive gradient checks") {
  std::mt19937_64 rng(23);
  const double h = 1e-5;
  const double tol = 1e-4;

  auto a = rand_tensor({3, 4}, rng);
  auto b = rand_tensor({4, 2}, rng);
  std::vector<Tensor<double>> ab{a, b};
  CHECK(erc::finite_diff_check<double>(
            [&]() { return erc::sum(erc::matmul(a, b)); }, ab, h) < tol);

  auto x = rand_tensor({3, 4}, rng);
  auto y = rand_tensor({3, 4}, rng);
  std::vector<Tensor<double>> xy{x, y};
  CHECK(erc::finite_diff_check<double>(
            [&]() { return erc::sum(erc::mul(erc::sub(x, y), erc::add(x, y))); }, xy, h) < tol);

  auto v = rand_tensor({1, 4}, rng);
  std::vector<Tensor<double>> xv{x, v};
  CHECK(erc::finite_diff_check<double>(
            [&]() { return erc::sum(erc::sigmoid(erc::add_rowvec(x, v))); }, xv, h) < tol);

  CHECK(erc::finite_diff_check<double>(
            [&]() { return erc::sum(erc::elu(x)); }, x, h) < tol);
  CHECK(erc::finite_diff_check<double>(
            [&]() { return erc::sum(erc::mul(erc::leaky_relu(x, 0.2), x)); }, x, h) < tol);

  Mask cm{1, 1, 0, 1};
  CHECK(erc::finite_diff_check<double>(
            [&]() { return erc::sum(erc::mul(erc::softmax_rows(x, &cm), y)); }, xy, h) < tol);

  auto gamma = rand_tensor({1, 4}, rng);
  auto beta = rand_tensor({1, 4}, rng);
  std::vector<Tensor<double>> gn{x, gamma, beta};
  CHECK(erc::finite_diff_check<double>(
            [&]() {
              return erc::sum(erc::mul(erc::group_norm(x, 2, gamma, beta, 1e-5), y));
            },
            gn, h) < tol);

  auto s = rand_tensor({1, 1}, rng);
  std::vector<Tensor<double>> sx{s, x};
  CHECK(erc::finite_diff_check<double>(
            [&]() { return erc::sum(erc::scale_by(s, x)); }, sx, h) < tol);

  CHECK(erc::finite_diff_check<double>(
            [&]() { return erc::sum(erc::mul(erc::concat_cols(x, y), erc::concat_cols(y, x))); },
            xy, h) < tol);
  CHECK(erc::finite_diff_check<double>(
            [&]() { return erc::sum(erc::slice_cols(x, 1, 2)); }, x, h) < tol);

  std::vector<int> idx{2, 0, 2, 1};
  CHECK(erc::finite_diff_check<double>(
            [&]() {
              auto taken = erc::take_rows(x, idx);
              return erc::sum(erc::mul(taken, taken));
            },
            x, h) < tol);

  Mask rows{1, 0, 1};
  CHECK(erc::finite_diff_check<double>(
            [&]() { return erc::sum(erc::zero_masked_rows(x, rows)); }, x, h) < tol);
  CHECK(erc::finite_diff_check<double>(
            [&]() { return erc::sum(erc::mul(erc::where_rows(rows, x, y), x)); }, xy, h) < tol);

  CHECK(erc::finite_diff_check<double>(
            [&]() { return erc::sum(erc::mul(erc::shift_rows_replicate(x, 1), y)); }, x, h) < tol);

  auto pos = rand_tensor({3, 4}, rng);
  for (auto& vv : pos.data()) vv = std::abs(vv) + 0.5;
  CHECK(erc::finite_diff_check<double>(
            [&]() { return erc::sum(erc::mul_colvec(x, erc::rsqrt(erc::row_sums(pos)))); },
            std::vector<Tensor<double>>{x, pos}, h) < tol);
  CHECK(erc::finite_diff_check<double>(
            [&]() {
              return erc::sum(erc::mul_rowvec(x, erc::transpose(erc::row_sums(erc::transpose(x)))));
            },
            x, h) < tol);

  // Grouped softmax and aggregation over a toy edge set.
  auto sc = rand_tensor({5, 1}, rng);
  auto rowsrc = rand_tensor({5, 4}, rng);
  std::vector<int> seg{0, 0, 1, 2, 2};
  std::vector<Tensor<double>> se{sc, rowsrc};
  CHECK(erc::finite_diff_check<double>(
            [&]() {
              auto alpha = erc::segment_softmax(sc, seg, 3);
              auto agg = erc::segment_weighted_rowsum(alpha, rowsrc, seg, 3);
              return erc::sum(erc::mul(agg, erc::take_rows(rowsrc, std::vector<int>{0, 1, 2})));
            },
            se, h) < tol);

  // NLL through a softmax head.
  auto logits = rand_tensor({3, 3}, rng);
  std::vector<int> labels{0, 2, 1};
  std::vector<double> weights{1.0, 0.5, 2.0};
  Mask lm{1, 1, 1};
  CHECK(erc::finite_diff_check<double>(
            [&]() {
              auto probs = erc::softmax_rows(logits);
              return erc::masked_weighted_nll<double>(probs, labels, weights, lm);
            },
            logits, h) < tol);
}

TEST_CASE("non-finite values abort with the op name") {
  CHECK_THROWS_AS(Tensor<double>::from({1, 1}, {std::nan("")}), erc::NumericError);
  auto big = Tensor<double>::full({1, 2}, 1e308);
  CHECK_THROWS_AS(erc::mul(big, big), erc::NumericError);
  try {
    erc::mul(big, big);
  } catch (const erc::NumericError& e) {
    CHECK(std::string(e.what()).find("mul") != std::string::npos);
  }
}

TEST_CASE("primitives are deterministic") {
  std::mt19937_64 rng(99);
  auto a = rand_tensor({4, 4}, rng);
  auto b = rand_tensor({4, 4}, rng);
  auto r1 = erc::matmul(erc::softmax_rows(a), erc::group_norm(b, 2,
                        Tensor<double>::full({1, 4}, 1.0), Tensor<double>::zeros({1, 4}), 1e-5));
  auto r2 = erc::matmul(erc::softmax_rows(a), erc::group_norm(b, 2,
                        Tensor<double>::full({1, 4}, 1.0), Tensor<double>::zeros({1, 4}), 1e-5));
  CHECK(r1.data() == r2.data());
}

TEST_CASE("positional encoding table") {
  auto pe = erc::positional_encoding<double>(4, 6);
  for (int i = 0; i < 3; ++i) {
    CHECK(pe.at(0, 2 * i) == doctest::Approx(0.0));
    CHECK(pe.at(0, 2 * i + 1) == doctest::Approx(1.0));
  }
  CHECK(pe.at(1, 0) == doctest::Approx(std::sin(1.0)).epsilon(1e-9));
  for (double v : pe.data()) {
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }
  CHECK_THROWS_AS(erc::positional_encoding<double>(4, 5), erc::ConfigError);
}
