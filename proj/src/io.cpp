#include "jqml/io.hpp"

#include "jqml/error.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

namespace jqml::io {

std::string libsvm_line(double label, std::span<const double> features) {
  std::string line = format_double(label);
  for (std::size_t j = 0; j < features.size(); ++j) {
    if (features[j] == 0.0) continue;
    line += ' ';
    line += std::to_string(j + 1);
    line += ':';
    line += format_double(features[j]);
  }
  return line;
}

void write_libsvm(const Frame& frame, const std::string& label_col, const std::string& features_col,
                  std::ostream& out) {
  const ColumnVector& labels = frame.column(frame.require_column(label_col));
  const ColumnVector& features = frame.column(frame.require_column(features_col));
  if (!labels.type().is_numeric()) {
    fail(ErrorCode::TypeError, "label column \"" + label_col + "\" has type " + labels.type().to_string());
  }
  if (features.type().tag != FrameColumnType::Tag::Array || !features.child(0).type().is_numeric()) {
    fail(ErrorCode::NonNumericInput,
         "features column \"" + features_col + "\" has type " + features.type().to_string());
  }
  const ColumnVector& values = features.child(0);
  std::vector<double> row;
  for (std::size_t i = 0; i < frame.row_count(); ++i) {
    row.clear();
    for (std::uint64_t k = features.offsets()[i]; k < features.offsets()[i + 1]; ++k) {
      row.push_back(values.numeric(k));
    }
    out << libsvm_line(labels.numeric(i), row) << '\n';
  }
}

void write_libsvm(const Frame& frame, const std::string& label_col, const std::string& features_col,
                  const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot open \"" + path + "\" for writing");
  write_libsvm(frame, label_col, features_col, out);
  if (!out.flush()) fail(ErrorCode::IoError, "cannot write \"" + path + "\"");
}

namespace {

/// Uniform double in [0, 1) from the top 53 bits.
double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::string fixed3(double v) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.3f", v);
  std::string s(buf.data());
  if (s == "-0.000") s = "0.000";
  return s;
}

constexpr std::array<const char*, 8> kTags = {"animal", "pet", "white", "sky", "tree", "car", "people", "water"};

}  // namespace

void generate_dataset(const DatasetSpec& spec, std::ostream& out) {
  std::mt19937_64 rng(spec.seed);
  const double unit = spec.dims > 0 ? 1.0 / std::sqrt(static_cast<double>(spec.dims)) : 0.0;
  std::vector<double> x(spec.dims);
  for (std::uint64_t i = 0; i < spec.rows; ++i) {
    bool positive = uniform(rng) < 0.5;
    // Signed distance to the separating hyperplane sum(x)/sqrt(d) = 0.
    double t = spec.margin / 2 + 2.0 * uniform(rng);
    if (!positive) t = -t;
    double along = 0.0;
    for (auto& v : x) {
      v = 2.0 * uniform(rng) - 1.0;
      along += v * unit;
    }
    for (auto& v : x) v += (t - along) * unit;

    std::string line;
    std::size_t tag_count = 1 + static_cast<std::size_t>(uniform(rng) * 3);
    std::size_t class_slot = static_cast<std::size_t>(uniform(rng) * static_cast<double>(tag_count + 1));
    for (std::size_t k = 0; k <= tag_count; ++k) {
      if (!line.empty()) line += ',';
      const char* tag = k == class_slot ? (positive ? "outdoor" : "indoor")
                                        : kTags[static_cast<std::size_t>(uniform(rng) * kTags.size())];
      line += tag;
      line += ':';
      line += fixed3(uniform(rng));
    }
    for (double v : x) {
      line += ' ';
      line += fixed3(v);
    }
    out << line << '\n';
  }
}

void generate_dataset(const DatasetSpec& spec, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot open \"" + path + "\" for writing");
  generate_dataset(spec, out);
  if (!out.flush()) fail(ErrorCode::IoError, "cannot write \"" + path + "\"");
}

}  // namespace jqml::io
