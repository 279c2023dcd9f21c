#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace jqml::ml {

/// Dense row-major design matrix with 0/1 labels.
struct Dataset {
  std::size_t rows = 0;
  std::size_t dims = 0;
  std::vector<double> x;  // rows * dims
  std::vector<double> y;  // rows

  std::span<const double> row(std::size_t i) const { return {x.data() + i * dims, dims}; }
};

enum class Loss { Logistic, Hinge };

/// Objective (1/n) sum_i l(z_i, y_i) + (reg/2) |w|^2 with z = w.x + b. The
/// intercept is not regularized.
double objective(Loss loss, const Dataset& data, std::span<const double> w, double b, double reg);

struct Gradient {
  std::vector<double> w;
  double b = 0.0;
};

/// Full-batch (sub)gradient of objective(). Rows are accumulated in blocks of
/// kBlockRows and block sums are combined by a pairwise tree, so the result
/// does not depend on `partitions`.
Gradient gradient(Loss loss, const Dataset& data, std::span<const double> w, double b, double reg,
                  std::size_t partitions = 1);

inline constexpr std::size_t kBlockRows = 256;

struct LinearOptions {
  int max_iter = 10;
  double step_size = 0.1;
  double reg = 0.0;
  bool fit_intercept = true;
  std::optional<std::vector<double>> lower_w;
  std::optional<std::vector<double>> upper_w;
  std::optional<double> lower_b;
  std::optional<double> upper_b;
  std::size_t partitions = 1;
};

struct LinearModel {
  std::vector<double> w;
  double b = 0.0;
};

/// Zero-initialized projected gradient descent for exactly max_iter steps.
LinearModel train_linear(Loss loss, const Dataset& data, const LinearOptions& options);

/// 1 when w.x + b >= 0.
double predict_linear(const LinearModel& model, std::span<const double> x);

struct NaiveBayesModel {
  std::vector<double> classes;  // sorted distinct labels
  std::vector<double> log_priors;
  std::vector<std::vector<double>> theta;
};

/// Multinomial naive Bayes with additive smoothing. Labels may be any
/// nonnegative integral values. Throws NEGATIVE_FEATURE or BAD_LABEL.
NaiveBayesModel train_naive_bayes(const Dataset& data, double smoothing);
double predict_naive_bayes(const NaiveBayesModel& model, std::span<const double> x);

/// Per-dimension maximum absolute value.
std::vector<double> fit_max_abs(const Dataset& data);

}  // namespace jqml::ml
