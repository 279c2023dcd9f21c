#include "jqml/training.hpp"

#include "jqml/error.hpp"
#include "jqml/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace jqml::ml {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

void require_rows(const Dataset& data) {
  if (data.rows == 0) fail(ErrorCode::EmptyTrainingSet, "the training set is empty");
}

/// Sums per-block vectors with a fixed pairwise tree.
std::vector<double> tree_sum(std::vector<std::vector<double>> parts) {
  while (parts.size() > 1) {
    std::size_t half = parts.size() / 2;
    for (std::size_t i = 0; i < half; ++i) {
      auto& a = parts[2 * i];
      const auto& b = parts[2 * i + 1];
      for (std::size_t j = 0; j < a.size(); ++j) a[j] += b[j];
      if (i != 2 * i) parts[i] = std::move(a);
    }
    if (parts.size() % 2 == 1) {
      parts[half] = std::move(parts.back());
      parts.resize(half + 1);
    } else {
      parts.resize(half);
    }
  }
  return parts.empty() ? std::vector<double>{} : std::move(parts.front());
}

}  // namespace

double objective(Loss loss, const Dataset& data, std::span<const double> w, double b, double reg) {
  require_rows(data);
  double total = 0.0;
  for (std::size_t i = 0; i < data.rows; ++i) {
    double z = dot(w, data.row(i)) + b;
    double y = data.y[i];
    if (loss == Loss::Logistic) {
      total += softplus(z) - y * z;
    } else {
      double t = 2.0 * y - 1.0;
      total += std::max(0.0, 1.0 - t * z);
    }
  }
  return total / static_cast<double>(data.rows) + 0.5 * reg * dot(w, w);
}

Gradient gradient(Loss loss, const Dataset& data, std::span<const double> w, double b, double reg,
                  std::size_t partitions) {
  require_rows(data);
  const std::size_t d = data.dims;
  const std::size_t blocks = (data.rows + kBlockRows - 1) / kBlockRows;
  std::vector<std::vector<double>> parts(blocks, std::vector<double>(d + 1, 0.0));
  for_each_range(blocks, partitions, [&](std::size_t first, std::size_t last, std::size_t) {
    for (std::size_t blk = first; blk < last; ++blk) {
      auto& acc = parts[blk];
      std::size_t end = std::min(data.rows, (blk + 1) * kBlockRows);
      for (std::size_t i = blk * kBlockRows; i < end; ++i) {
        auto x = data.row(i);
        double z = dot(w, x) + b;
        double coef;
        if (loss == Loss::Logistic) {
          coef = sigmoid(z) - data.y[i];
        } else {
          double t = 2.0 * data.y[i] - 1.0;
          coef = t * z < 1.0 ? -t : 0.0;
        }
        if (coef == 0.0) continue;
        for (std::size_t j = 0; j < d; ++j) acc[j] += coef * x[j];
        acc[d] += coef;
      }
    }
  });
  std::vector<double> sum = tree_sum(std::move(parts));
  const double inv_n = 1.0 / static_cast<double>(data.rows);
  Gradient g;
  g.w.resize(d);
  for (std::size_t j = 0; j < d; ++j) g.w[j] = sum[j] * inv_n + reg * w[j];
  g.b = sum[d] * inv_n;
  return g;
}

LinearModel train_linear(Loss loss, const Dataset& data, const LinearOptions& options) {
  require_rows(data);
  LinearModel model;
  model.w.assign(data.dims, 0.0);
  auto project = [&] {
    for (std::size_t j = 0; j < data.dims; ++j) {
      if (options.lower_w) model.w[j] = std::max(model.w[j], (*options.lower_w)[j]);
      if (options.upper_w) model.w[j] = std::min(model.w[j], (*options.upper_w)[j]);
    }
    if (options.lower_b) model.b = std::max(model.b, *options.lower_b);
    if (options.upper_b) model.b = std::min(model.b, *options.upper_b);
  };
  for (int iter = 0; iter < options.max_iter; ++iter) {
    Gradient g = gradient(loss, data, model.w, model.b, options.reg, options.partitions);
    for (std::size_t j = 0; j < data.dims; ++j) model.w[j] -= options.step_size * g.w[j];
    if (options.fit_intercept) model.b -= options.step_size * g.b;
    project();
    if (!options.fit_intercept) model.b = 0.0;
  }
  return model;
}

double predict_linear(const LinearModel& model, std::span<const double> x) {
  return dot(model.w, x) + model.b >= 0.0 ? 1.0 : 0.0;
}

NaiveBayesModel train_naive_bayes(const Dataset& data, double smoothing) {
  require_rows(data);
  for (double v : data.x) {
    if (v < 0) fail(ErrorCode::NegativeFeature, "naive Bayes requires nonnegative feature values");
  }
  std::map<double, std::size_t> class_index;
  for (double label : data.y) {
    if (!(label >= 0) || label != std::floor(label)) {
      fail(ErrorCode::BadLabel, "naive Bayes labels must be nonnegative integers");
    }
    class_index.emplace(label, 0);
  }
  NaiveBayesModel model;
  for (auto& [label, index] : class_index) {
    index = model.classes.size();
    model.classes.push_back(label);
  }
  const std::size_t k = model.classes.size();
  const std::size_t d = data.dims;
  std::vector<double> counts(k, 0.0);
  std::vector<std::vector<double>> sums(k, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < data.rows; ++i) {
    std::size_t c = class_index[data.y[i]];
    counts[c] += 1.0;
    auto x = data.row(i);
    for (std::size_t j = 0; j < d; ++j) sums[c][j] += x[j];
  }
  model.log_priors.resize(k);
  model.theta.assign(k, std::vector<double>(d, 0.0));
  for (std::size_t c = 0; c < k; ++c) {
    model.log_priors[c] = std::log(counts[c] / static_cast<double>(data.rows));
    double total = 0.0;
    for (double s : sums[c]) total += s;
    double denom = std::log(total + smoothing * static_cast<double>(d));
    for (std::size_t j = 0; j < d; ++j) model.theta[c][j] = std::log(sums[c][j] + smoothing) - denom;
  }
  return model;
}

double predict_naive_bayes(const NaiveBayesModel& model, std::span<const double> x) {
  for (double v : x) {
    if (v < 0) fail(ErrorCode::NegativeFeature, "naive Bayes requires nonnegative feature values");
  }
  std::size_t best = 0;
  double best_score = -INFINITY;
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    double score = model.log_priors[c] + dot(model.theta[c], x);
    if (score > best_score) {
      best_score = score;
      best = c;
    }
  }
  return model.classes[best];
}

std::vector<double> fit_max_abs(const Dataset& data) {
  require_rows(data);
  std::vector<double> m(data.dims, 0.0);
  for (std::size_t i = 0; i < data.rows; ++i) {
    auto x = data.row(i);
    for (std::size_t j = 0; j < data.dims; ++j) m[j] = std::max(m[j], std::abs(x[j]));
  }
  return m;
}

}  // namespace jqml::ml
