#pragma once

#include "jqml/ast.hpp"
#include "jqml/function.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace jqml {

/// Arguments and environment of one builtin invocation.
struct BuiltinCall {
  std::vector<Sequence>& args;
  /// Mode assigned to the call site (annotate builds a frame only in Frame).
  ExecutionMode mode;
  CallContext& ctx;
  SourcePos pos;
};

using BuiltinImpl = std::function<Sequence(BuiltinCall&)>;

struct BuiltinSpec {
  std::string name;
  FunctionSignature signature;
  /// Mode of a call site. Frame producers fall back to LocalSeq when the
  /// policy forbids frames.
  ExecutionMode mode = ExecutionMode::LocalSeq;
  /// Pure per-row function that may appear in a lowered frame predicate.
  bool row_scalar = false;
  BuiltinImpl impl;

  std::size_t arity() const { return signature.arity(); }
};

const std::vector<BuiltinSpec>& builtin_catalog();

/// Index into builtin_catalog(), matched by name and arity.
std::optional<int> find_builtin(std::string_view name, std::size_t arity);

}  // namespace jqml
