#pragma once

#include "jqml/frame.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

namespace jqml::io {

/// `<label> 1:<v1> 2:<v2> ...` with zero entries omitted.
std::string libsvm_line(double label, std::span<const double> features);

/// One LibSVM line per row. Throws UNKNOWN_COLUMN, NON_NUMERIC_INPUT or
/// TYPE_ERROR (non-numeric label).
void write_libsvm(const Frame& frame, const std::string& label_col, const std::string& features_col,
                  std::ostream& out);
/// Throws IO_ERROR in addition.
void write_libsvm(const Frame& frame, const std::string& label_col, const std::string& features_col,
                  const std::string& path);

/// Two linearly separable classes in the messy text format
/// `tag:score,tag:score,... v1 v2 ... vd`.
struct DatasetSpec {
  std::uint64_t rows = 0;
  std::uint64_t dims = 0;
  double margin = 1.0;
  std::uint64_t seed = 0;
};

void generate_dataset(const DatasetSpec& spec, std::ostream& out);
/// Throws IO_ERROR.
void generate_dataset(const DatasetSpec& spec, const std::string& path);

}  // namespace jqml::io
