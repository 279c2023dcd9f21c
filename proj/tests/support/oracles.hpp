#pragma once

#include "jqml/error.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace jqml::testing {

/// One row of the JSONiq-to-frame type table, transcribed by hand.
struct TypeRow {
  std::string jsoniq;      // type label as printed in the table
  std::string descriptor;  // compact schema (JSON) for that row
  std::string frame_type;  // expected top-level frame type name
};

// gtest prints parameters with these; otherwise it dumps raw bytes.
inline void PrintTo(const TypeRow& row, std::ostream* os) { *os << row.jsoniq; }

const std::vector<TypeRow>& type_table();

/// Empty when map_frame_type() reproduces the row, else a description.
std::optional<std::string> check_type_row(const TypeRow& row);

/// One row of the native-parameter table. Values are query expressions.
struct ParamRow {
  std::string native;     // native type name in the table
  std::string item_type;  // item type in the table
  std::string component;  // registry component carrying a parameter of that type
  std::string param;      // parameter name; "" means the whole parameter object
  std::string good;
  std::string bad;
  ErrorCode bad_code;
};

inline void PrintTo(const ParamRow& row, std::ostream* os) { *os << row.native; }

const std::vector<ParamRow>& param_table();

/// Accepts `good` and rejects `bad` with the row's code, or says what went wrong.
std::optional<std::string> check_param_row(const ParamRow& row);

/// Finite-difference check of the analytic training gradients.
struct GradientOracleReport {
  int instances = 0;
  int redraws = 0;
  double worst_relative_error = 0.0;
  /// Largest gap between the library objective and the naive one.
  double worst_objective_gap = 0.0;
};

/// `instances` random problems with d <= 5 and n <= 20, both losses each.
GradientOracleReport run_gradient_oracle(int instances, std::uint64_t seed, double h = 1e-6);

}  // namespace jqml::testing
