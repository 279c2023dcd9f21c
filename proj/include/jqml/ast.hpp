#pragma once

#include "jqml/atomic.hpp"
#include "jqml/error.hpp"
#include "jqml/types.hpp"

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace jqml {

/// Physical strategy assigned to an expression. Unset only exists while
/// inference runs.
enum class ExecutionMode : std::uint8_t { Unset, LocalOne, LocalSeq, Frame };

std::string_view mode_name(ExecutionMode mode);

/// Least upper bound: LocalOne < LocalSeq, Frame < LocalSeq, Unset is bottom.
ExecutionMode join_modes(ExecutionMode a, ExecutionMode b);

/// Owning pointer with value semantics (deep copy, deep equality).
template <class T>
class Box {
 public:
  Box() = default;
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT
  Box(const Box& other) : ptr_(other.ptr_ ? std::make_unique<T>(*other.ptr_) : nullptr) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = other.ptr_ ? std::make_unique<T>(*other.ptr_) : nullptr;
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;
  ~Box() = default;

  T& operator*() { return *ptr_; }
  const T& operator*() const { return *ptr_; }
  T* operator->() { return ptr_.get(); }
  const T* operator->() const { return ptr_.get(); }
  T* get() { return ptr_.get(); }
  const T* get() const { return ptr_.get(); }
  explicit operator bool() const { return static_cast<bool>(ptr_); }

  friend bool operator==(const Box& a, const Box& b) {
    if (!a.ptr_ || !b.ptr_) return !a.ptr_ && !b.ptr_;
    return *a.ptr_ == *b.ptr_;
  }

 private:
  std::unique_ptr<T> ptr_;
};

struct Expr;

struct LiteralExpr {
  AtomicValue value;
  bool operator==(const LiteralExpr& other) const { return value == other.value; }
};

struct VarRefExpr {
  std::string name;
  bool operator==(const VarRefExpr&) const = default;
};

/// `$$`
struct ContextItemExpr {
  bool operator==(const ContextItemExpr&) const = default;
};

/// `e1, e2, ...`; `()` has no items.
struct CommaExpr {
  std::vector<Expr> items;
  bool operator==(const CommaExpr&) const;
};

struct ForClause {
  std::string var;
  std::string position_var;  // empty when there is no `at`
  Box<Expr> in;
  bool operator==(const ForClause&) const = default;
};

struct LetClause {
  std::string var;
  Box<Expr> value;
  bool operator==(const LetClause&) const = default;
};

struct WhereClause {
  Box<Expr> condition;
  bool operator==(const WhereClause&) const = default;
};

struct OrderByClause {
  Box<Expr> key;
  bool descending = false;
  bool operator==(const OrderByClause&) const = default;
};

using Clause = std::variant<ForClause, LetClause, WhereClause, OrderByClause>;

struct FlworExpr {
  std::vector<Clause> clauses;
  Box<Expr> result;
  bool operator==(const FlworExpr&) const = default;
};

struct IfExpr {
  Box<Expr> condition;
  Box<Expr> then_branch;
  Box<Expr> else_branch;
  bool operator==(const IfExpr&) const = default;
};

struct LogicExpr {
  bool is_and = false;
  Box<Expr> lhs;
  Box<Expr> rhs;
  bool operator==(const LogicExpr&) const = default;
};

struct NotExpr {
  Box<Expr> operand;
  bool operator==(const NotExpr&) const = default;
};

struct ComparisonExpr {
  CompareOp op = CompareOp::Eq;
  Box<Expr> lhs;
  Box<Expr> rhs;
  bool operator==(const ComparisonExpr&) const = default;
};

struct ArithmeticExpr {
  ArithOp op = ArithOp::Add;
  Box<Expr> lhs;
  Box<Expr> rhs;
  bool operator==(const ArithmeticExpr&) const = default;
};

struct NegateExpr {
  Box<Expr> operand;
  bool operator==(const NegateExpr&) const = default;
};

struct RangeExpr {
  Box<Expr> low;
  Box<Expr> high;
  bool operator==(const RangeExpr&) const = default;
};

struct ObjectEntry {
  Box<Expr> key;
  Box<Expr> value;
  bool operator==(const ObjectEntry&) const = default;
};

struct ObjectExpr {
  std::vector<ObjectEntry> entries;
  bool operator==(const ObjectExpr&) const = default;
};

/// `{| e |}`
struct MergedObjectExpr {
  Box<Expr> content;
  bool operator==(const MergedObjectExpr&) const = default;
};

/// `[e]`; content is empty for `[]`.
struct ArrayExpr {
  Box<Expr> content;
  bool operator==(const ArrayExpr&) const = default;
};

/// `base[condition]` with `$$` bound inside the condition.
struct PredicateExpr {
  Box<Expr> base;
  Box<Expr> condition;
  bool operator==(const PredicateExpr&) const = default;
};

/// `base.key`; an NCName key is stored as a string literal.
struct LookupExpr {
  Box<Expr> base;
  Box<Expr> key;
  bool operator==(const LookupExpr&) const = default;
};

/// Target of a resolved static call or function reference.
struct FunctionBinding {
  enum class Kind { Unresolved, Builtin, Declared };
  Kind kind = Kind::Unresolved;
  int index = -1;
};

struct StaticCallExpr {
  std::string name;
  std::vector<Expr> args;
  FunctionBinding binding;
  bool operator==(const StaticCallExpr&) const;
};

struct DynamicCallExpr {
  Box<Expr> target;
  std::vector<Expr> args;
  bool operator==(const DynamicCallExpr&) const;
};

/// `name#arity`
struct FunctionRefExpr {
  std::string name;
  int arity = 0;
  FunctionBinding binding;
  bool operator==(const FunctionRefExpr& other) const {
    return name == other.name && arity == other.arity;
  }
};

struct Expr {
  using Node = std::variant<LiteralExpr, VarRefExpr, ContextItemExpr, CommaExpr, FlworExpr, IfExpr,
                            LogicExpr, NotExpr, ComparisonExpr, ArithmeticExpr, NegateExpr,
                            RangeExpr, ObjectExpr, MergedObjectExpr, ArrayExpr, PredicateExpr,
                            LookupExpr, StaticCallExpr, DynamicCallExpr, FunctionRefExpr>;

  Node node;
  SourcePos pos;

  // Filled by analysis.
  ExecutionMode mode = ExecutionMode::Unset;
  SequenceType static_type;

  template <class T>
  bool is() const {
    return std::holds_alternative<T>(node);
  }
  template <class T>
  const T& as() const {
    return std::get<T>(node);
  }
  template <class T>
  T& as() {
    return std::get<T>(node);
  }

  /// Structural equality; positions and annotations are ignored.
  bool operator==(const Expr& other) const { return node == other.node; }
};

inline bool CommaExpr::operator==(const CommaExpr& other) const { return items == other.items; }
inline bool StaticCallExpr::operator==(const StaticCallExpr& other) const {
  return name == other.name && args == other.args;
}
inline bool DynamicCallExpr::operator==(const DynamicCallExpr& other) const {
  return target == other.target && args == other.args;
}

struct Param {
  std::string name;
  std::optional<SequenceType> type;
  bool operator==(const Param&) const = default;
};

struct FunctionDecl {
  std::string name;
  std::vector<Param> params;
  std::optional<SequenceType> result;
  Expr body;
  SourcePos pos;

  // Filled by analysis.
  std::vector<ExecutionMode> param_modes;
  ExecutionMode body_mode = ExecutionMode::Unset;

  std::size_t arity() const { return params.size(); }
  bool operator==(const FunctionDecl& other) const {
    return name == other.name && params == other.params && result == other.result &&
           body == other.body;
  }
};

struct Module {
  std::vector<FunctionDecl> functions;
  Expr body;
  /// Free variables of the body, in first-use order (filled by resolution).
  std::vector<std::string> externals;

  bool operator==(const Module& other) const {
    return functions == other.functions && body == other.body;
  }
};

}  // namespace jqml
