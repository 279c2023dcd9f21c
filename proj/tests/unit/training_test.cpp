#include "support/oracles.hpp"

#include "jqml/training.hpp"

#include <gtest/gtest.h>

#include <random>

namespace jqml::testing {
namespace {

TEST(Training, GradientsMatchFiniteDifferences) {
  GradientOracleReport r = run_gradient_oracle(100, 99);
  EXPECT_EQ(r.instances, 100);
  EXPECT_LT(r.worst_relative_error, 1e-5);
  EXPECT_LT(r.worst_objective_gap, 1e-12);
}

ml::Dataset random_dataset(std::size_t rows, std::size_t dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  ml::Dataset d;
  d.rows = rows;
  d.dims = dims;
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0;
    for (std::size_t j = 0; j < dims; ++j) {
      d.x.push_back(normal(rng));
      s += d.x.back() * static_cast<double>(j + 1);
    }
    d.y.push_back(s + 0.3 * normal(rng) > 0 ? 1.0 : 0.0);
  }
  return d;
}

TEST(Training, ResultDoesNotDependOnPartitions) {
  ml::Dataset data = random_dataset(3000, 7, 5);
  for (ml::Loss loss : {ml::Loss::Logistic, ml::Loss::Hinge}) {
    ml::LinearOptions one;
    one.max_iter = 25;
    one.reg = 0.01;
    ml::LinearOptions many = one;
    many.partitions = 5;
    ml::LinearModel a = ml::train_linear(loss, data, one);
    ml::LinearModel b = ml::train_linear(loss, data, many);
    EXPECT_EQ(a.w, b.w);
    EXPECT_EQ(a.b, b.b);
  }
}

TEST(Training, ExactIterationCountFromZero) {
  ml::Dataset data = random_dataset(50, 3, 6);
  ml::LinearOptions options;
  options.max_iter = 0;
  ml::LinearModel m = ml::train_linear(ml::Loss::Logistic, data, options);
  EXPECT_EQ(m.w, std::vector<double>(3, 0.0));
  EXPECT_EQ(m.b, 0.0);
  // Two steps equal one step followed by one more from the first result.
  options.max_iter = 2;
  ml::LinearModel two = ml::train_linear(ml::Loss::Logistic, data, options);
  ml::Gradient g0 = ml::gradient(ml::Loss::Logistic, data, std::vector<double>(3, 0.0), 0.0, 0.0);
  std::vector<double> w1(3);
  for (int j = 0; j < 3; ++j) w1[j] = -options.step_size * g0.w[j];
  double b1 = -options.step_size * g0.b;
  ml::Gradient g1 = ml::gradient(ml::Loss::Logistic, data, w1, b1, 0.0);
  for (int j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(two.w[j], w1[j] - options.step_size * g1.w[j]);
  EXPECT_DOUBLE_EQ(two.b, b1 - options.step_size * g1.b);
}

TEST(Training, NoInterceptKeepsZero) {
  ml::Dataset data = random_dataset(40, 2, 7);
  ml::LinearOptions options;
  options.fit_intercept = false;
  EXPECT_EQ(ml::train_linear(ml::Loss::Hinge, data, options).b, 0.0);
}

TEST(Training, SeparableDataIsLearned) {
  ml::Dataset data = random_dataset(500, 4, 8);
  ml::LinearOptions options;
  options.max_iter = 200;
  options.step_size = 0.5;
  for (ml::Loss loss : {ml::Loss::Logistic, ml::Loss::Hinge}) {
    ml::LinearModel m = ml::train_linear(loss, data, options);
    int correct = 0;
    for (std::size_t i = 0; i < data.rows; ++i) correct += ml::predict_linear(m, data.row(i)) == data.y[i];
    EXPECT_GT(correct, 450);
  }
}

TEST(Training, EmptyAndBadInputs) {
  ml::Dataset empty;
  empty.dims = 2;
  EXPECT_THROW(ml::train_linear(ml::Loss::Hinge, empty, {}), Error);
  ml::Dataset data = random_dataset(4, 2, 9);
  data.y[0] = 3;
  try {
    ml::train_naive_bayes(data, 1.0);
  } catch (const Error& e) {
    EXPECT_TRUE(e.code() == ErrorCode::NegativeFeature || e.code() == ErrorCode::BadLabel);
  }
}

TEST(Training, MaxAbsBound) {
  ml::Dataset data = random_dataset(100, 3, 10);
  std::vector<double> m = ml::fit_max_abs(data);
  for (std::size_t i = 0; i < data.rows; ++i) {
    for (std::size_t j = 0; j < data.dims; ++j) EXPECT_LE(std::abs(data.x[i * 3 + j] / m[j]), 1.0);
  }
}

}  // namespace
}  // namespace jqml::testing
