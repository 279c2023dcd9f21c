#pragma once

#include "jqml/ast.hpp"

#include <cstddef>

namespace jqml {

/// Which physical strategies inference may assign.
enum class ModePolicy {
  /// Frames everywhere it is sound, including predicate and where lowering.
  Auto,
  /// Never assign Frame.
  ForceLocal,
  /// Frames for annotate and dynamic calls, but no predicate/where lowering.
  Frame,
};

std::string_view policy_name(ModePolicy policy);

/// Binds static calls and function references to builtins or prolog
/// declarations and checks variable scoping. Free variables of the main body
/// are recorded in `module.externals`. Throws UNKNOWN_FUNCTION or
/// UNDEFINED_VARIABLE.
void resolve_names(Module& module);

/// Fills `static_type` on every expression.
void infer_static_types(Module& module);

struct InferenceReport {
  /// Sweeps over the whole module until function-level modes stopped changing.
  int passes = 0;
};

/// Assigns an execution mode to every expression, iterating over user
/// functions to a fixpoint. Requires resolve_names() and
/// infer_static_types().
InferenceReport infer_execution_modes(Module& module, ModePolicy policy);

/// The expression references the row only through `row_var` (or `$$` when
/// `row_var` is empty), literals and row-scalar builtins.
bool is_row_local(const Expr& expr, std::string_view row_var);

/// True when `expr` always yields a single boolean.
bool has_boolean_root(const Expr& expr);

/// Top-level keys looked up on the row reference; empty with `all` set when
/// the row is used in any other way.
struct RowProjection {
  std::vector<std::string> keys;
  bool all = false;
};
RowProjection row_projection(const Expr& expr, std::string_view row_var);

/// The single `for $r in E (where C)* return $r` shape that can run as a
/// frame filter.
bool is_filter_flwor(const FlworExpr& flwor);

}  // namespace jqml
