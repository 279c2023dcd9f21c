#include "jqml/analysis.hpp"

#include "jqml/builtins.hpp"

#include <algorithm>

namespace jqml {

std::string_view mode_name(ExecutionMode mode) {
  switch (mode) {
    case ExecutionMode::Unset: return "UNSET";
    case ExecutionMode::LocalOne: return "LOCAL_ONE";
    case ExecutionMode::LocalSeq: return "LOCAL_SEQ";
    case ExecutionMode::Frame: return "FRAME";
  }
  return "?";
}

ExecutionMode join_modes(ExecutionMode a, ExecutionMode b) {
  if (a == ExecutionMode::Unset) return b;
  if (b == ExecutionMode::Unset) return a;
  if (a == b) return a;
  return ExecutionMode::LocalSeq;
}

std::string_view policy_name(ModePolicy policy) {
  switch (policy) {
    case ModePolicy::Auto: return "auto";
    case ModePolicy::ForceLocal: return "force-local";
    case ModePolicy::Frame: return "frame";
  }
  return "?";
}

namespace {

constexpr std::string_view kContextName = "$$";

/// Calls `fn` on every direct child expression, in source order.
template <class E, class Fn>
void for_each_child(E& expr, Fn&& fn) {
  std::visit(
      [&](auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, CommaExpr>) {
          for (auto& item : node.items) fn(item);
        } else if constexpr (std::is_same_v<T, FlworExpr>) {
          for (auto& clause : node.clauses) {
            std::visit(
                [&](auto& c) {
                  using C = std::decay_t<decltype(c)>;
                  if constexpr (std::is_same_v<C, ForClause>) fn(*c.in);
                  if constexpr (std::is_same_v<C, LetClause>) fn(*c.value);
                  if constexpr (std::is_same_v<C, WhereClause>) fn(*c.condition);
                  if constexpr (std::is_same_v<C, OrderByClause>) fn(*c.key);
                },
                clause);
          }
          fn(*node.result);
        } else if constexpr (std::is_same_v<T, IfExpr>) {
          fn(*node.condition);
          fn(*node.then_branch);
          fn(*node.else_branch);
        } else if constexpr (std::is_same_v<T, LogicExpr> || std::is_same_v<T, ComparisonExpr> ||
                             std::is_same_v<T, ArithmeticExpr>) {
          fn(*node.lhs);
          fn(*node.rhs);
        } else if constexpr (std::is_same_v<T, NotExpr> || std::is_same_v<T, NegateExpr>) {
          fn(*node.operand);
        } else if constexpr (std::is_same_v<T, RangeExpr>) {
          fn(*node.low);
          fn(*node.high);
        } else if constexpr (std::is_same_v<T, ObjectExpr>) {
          for (auto& entry : node.entries) {
            fn(*entry.key);
            fn(*entry.value);
          }
        } else if constexpr (std::is_same_v<T, MergedObjectExpr>) {
          fn(*node.content);
        } else if constexpr (std::is_same_v<T, ArrayExpr>) {
          if (node.content) fn(*node.content);
        } else if constexpr (std::is_same_v<T, PredicateExpr>) {
          fn(*node.base);
          fn(*node.condition);
        } else if constexpr (std::is_same_v<T, LookupExpr>) {
          fn(*node.base);
          fn(*node.key);
        } else if constexpr (std::is_same_v<T, StaticCallExpr>) {
          for (auto& arg : node.args) fn(arg);
        } else if constexpr (std::is_same_v<T, DynamicCallExpr>) {
          fn(*node.target);
          for (auto& arg : node.args) fn(arg);
        }
      },
      expr.node);
}

std::vector<std::string> clause_vars(const Clause& clause) {
  if (const auto* f = std::get_if<ForClause>(&clause)) {
    std::vector<std::string> out{f->var};
    if (!f->position_var.empty()) out.push_back(f->position_var);
    return out;
  }
  if (const auto* l = std::get_if<LetClause>(&clause)) return {l->var};
  return {};
}

// ------------------------------------------------------------- resolution

class Resolver {
 public:
  explicit Resolver(Module& module) : module_(module) {}

  void run() {
    for (FunctionDecl& decl : module_.functions) {
      in_function_ = true;
      scope_.clear();
      for (const Param& p : decl.params) scope_.push_back(p.name);
      expr(decl.body);
    }
    in_function_ = false;
    scope_.clear();
    module_.externals.clear();
    expr(module_.body);
  }

 private:
  bool in_scope(std::string_view name) const {
    return std::find(scope_.begin(), scope_.end(), name) != scope_.end();
  }

  void bind_call(const std::string& name, std::size_t arity, FunctionBinding& binding, SourcePos pos) {
    for (std::size_t i = 0; i < module_.functions.size(); ++i) {
      if (module_.functions[i].name == name && module_.functions[i].arity() == arity) {
        binding = {FunctionBinding::Kind::Declared, static_cast<int>(i)};
        return;
      }
    }
    if (auto index = find_builtin(name, arity)) {
      binding = {FunctionBinding::Kind::Builtin, *index};
      return;
    }
    fail(ErrorCode::UnknownFunction, "unknown function " + name + "#" + std::to_string(arity), pos);
  }

  void variable(const std::string& name, SourcePos pos) {
    if (in_scope(name)) return;
    if (std::find(forbidden_.begin(), forbidden_.end(), name) != forbidden_.end()) {
      fail(ErrorCode::UndefinedVariable, "$" + name + " is used before it is bound", pos);
    }
    if (in_function_) fail(ErrorCode::UndefinedVariable, "undefined variable $" + name, pos);
    auto& ext = module_.externals;
    if (std::find(ext.begin(), ext.end(), name) == ext.end()) ext.push_back(name);
  }

  void expr(Expr& e) {
    if (auto* v = std::get_if<VarRefExpr>(&e.node)) {
      variable(v->name, e.pos);
      return;
    }
    if (e.is<ContextItemExpr>()) {
      if (context_depth_ == 0) {
        fail(ErrorCode::UndefinedVariable, "$$ is only defined inside a predicate", e.pos);
      }
      return;
    }
    if (auto* call = std::get_if<StaticCallExpr>(&e.node)) {
      bind_call(call->name, call->args.size(), call->binding, e.pos);
      for (Expr& arg : call->args) expr(arg);
      return;
    }
    if (auto* ref = std::get_if<FunctionRefExpr>(&e.node)) {
      bind_call(ref->name, static_cast<std::size_t>(ref->arity), ref->binding, e.pos);
      return;
    }
    if (auto* pred = std::get_if<PredicateExpr>(&e.node)) {
      expr(*pred->base);
      ++context_depth_;
      expr(*pred->condition);
      --context_depth_;
      return;
    }
    if (auto* flwor = std::get_if<FlworExpr>(&e.node)) {
      std::size_t scope_size = scope_.size();
      for (std::size_t k = 0; k < flwor->clauses.size(); ++k) {
        std::size_t forbidden_size = forbidden_.size();
        for (std::size_t j = k; j < flwor->clauses.size(); ++j) {
          for (auto& name : clause_vars(flwor->clauses[j])) {
            if (!in_scope(name)) forbidden_.push_back(name);
          }
        }
        Clause& clause = flwor->clauses[k];
        std::visit(
            [&](auto& c) {
              using C = std::decay_t<decltype(c)>;
              if constexpr (std::is_same_v<C, ForClause>) expr(*c.in);
              if constexpr (std::is_same_v<C, LetClause>) expr(*c.value);
              if constexpr (std::is_same_v<C, WhereClause>) expr(*c.condition);
              if constexpr (std::is_same_v<C, OrderByClause>) expr(*c.key);
            },
            clause);
        forbidden_.resize(forbidden_size);
        for (auto& name : clause_vars(clause)) scope_.push_back(name);
      }
      expr(*flwor->result);
      scope_.resize(scope_size);
      return;
    }
    for_each_child(e, [&](Expr& child) { expr(child); });
  }

  Module& module_;
  bool in_function_ = false;
  int context_depth_ = 0;
  std::vector<std::string> scope_;
  std::vector<std::string> forbidden_;
};

// ------------------------------------------------------------------ typing

SequenceType with_occurrence(SequenceType t, Occurrence o) {
  t.occurrence = o;
  return t;
}

FunctionSignature declared_signature(const FunctionDecl& decl) {
  FunctionSignature sig;
  for (const Param& p : decl.params) sig.params.push_back(p.type.value_or(SequenceType::item_star()));
  sig.result = decl.result.value_or(SequenceType::item_star());
  return sig;
}

class Typer {
 public:
  explicit Typer(Module& module) : module_(module) {}

  void run() {
    for (FunctionDecl& decl : module_.functions) {
      scope_.clear();
      for (const Param& p : decl.params) {
        scope_.emplace_back(p.name, p.type.value_or(SequenceType::item_star()));
      }
      type(decl.body);
    }
    scope_.clear();
    type(module_.body);
  }

 private:
  SequenceType lookup(const std::string& name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (it->first == name) return it->second;
    }
    // External variables are bound to a single item.
    return with_occurrence(SequenceType::item_star(), Occurrence::One);
  }

  SequenceType type(Expr& e) {
    e.static_type = compute(e);
    return e.static_type;
  }

  SequenceType compute(Expr& e) {
    using Test = SequenceType::ItemTest;
    auto item_one = with_occurrence(SequenceType::item_star(), Occurrence::One);
    auto item_opt = with_occurrence(SequenceType::item_star(), Occurrence::ZeroOrOne);

    if (auto* lit = std::get_if<LiteralExpr>(&e.node)) {
      return SequenceType::atomic_one(lit->value.kind());
    }
    if (auto* v = std::get_if<VarRefExpr>(&e.node)) return lookup(v->name);
    if (e.is<ContextItemExpr>()) return item_one;
    if (auto* flwor = std::get_if<FlworExpr>(&e.node)) {
      std::size_t scope_size = scope_.size();
      bool only_lets = true;
      for (Clause& clause : flwor->clauses) {
        if (auto* f = std::get_if<ForClause>(&clause)) {
          only_lets = false;
          SequenceType in = type(*f->in);
          scope_.emplace_back(f->var, with_occurrence(in, Occurrence::One));
          if (!f->position_var.empty()) {
            scope_.emplace_back(f->position_var, SequenceType::atomic_one(AtomicKind::Integer));
          }
        } else if (auto* l = std::get_if<LetClause>(&clause)) {
          scope_.emplace_back(l->var, type(*l->value));
        } else if (auto* w = std::get_if<WhereClause>(&clause)) {
          only_lets = false;
          type(*w->condition);
        } else if (auto* o = std::get_if<OrderByClause>(&clause)) {
          only_lets = false;
          type(*o->key);
        }
      }
      SequenceType result = type(*flwor->result);
      scope_.resize(scope_size);
      if (only_lets) return result;
      return with_occurrence(result, Occurrence::ZeroOrMore);
    }
    if (auto* pred = std::get_if<PredicateExpr>(&e.node)) {
      SequenceType base = type(*pred->base);
      scope_.emplace_back(std::string(kContextName), with_occurrence(base, Occurrence::One));
      type(*pred->condition);
      scope_.pop_back();
      return with_occurrence(base, base.is_single() ? Occurrence::ZeroOrOne : Occurrence::ZeroOrMore);
    }

    std::vector<SequenceType> children;
    for_each_child(e, [&](Expr& child) { children.push_back(type(child)); });

    return std::visit(
        [&](auto& node) -> SequenceType {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, CommaExpr> || std::is_same_v<T, RangeExpr>) {
            if constexpr (std::is_same_v<T, RangeExpr>) {
              return with_occurrence(SequenceType::atomic_one(AtomicKind::Integer),
                                     Occurrence::ZeroOrMore);
            }
            return SequenceType::item_star();
          } else if constexpr (std::is_same_v<T, IfExpr>) {
            if (children[1] == children[2]) return children[1];
            return SequenceType::item_star();
          } else if constexpr (std::is_same_v<T, LogicExpr> || std::is_same_v<T, NotExpr>) {
            return SequenceType::atomic_one(AtomicKind::Boolean);
          } else if constexpr (std::is_same_v<T, ComparisonExpr>) {
            return with_occurrence(SequenceType::atomic_one(AtomicKind::Boolean),
                                   Occurrence::ZeroOrOne);
          } else if constexpr (std::is_same_v<T, ArithmeticExpr> || std::is_same_v<T, NegateExpr>) {
            return item_opt;
          } else if constexpr (std::is_same_v<T, ObjectExpr> || std::is_same_v<T, MergedObjectExpr>) {
            return SequenceType::object_one();
          } else if constexpr (std::is_same_v<T, ArrayExpr>) {
            SequenceType t;
            t.test = Test::Array;
            t.occurrence = Occurrence::One;
            return t;
          } else if constexpr (std::is_same_v<T, LookupExpr>) {
            return children[0].is_single() ? item_opt : SequenceType::item_star();
          } else if constexpr (std::is_same_v<T, StaticCallExpr>) {
            if (node.binding.kind == FunctionBinding::Kind::Builtin) {
              return builtin_catalog()[node.binding.index].signature.result;
            }
            const FunctionDecl& decl = module_.functions[node.binding.index];
            return decl.result.value_or(SequenceType::item_star());
          } else if constexpr (std::is_same_v<T, DynamicCallExpr>) {
            const SequenceType& target = children[0];
            if (target.is_function() && target.signature) return target.signature->result;
            return SequenceType::item_star();
          } else if constexpr (std::is_same_v<T, FunctionRefExpr>) {
            if (node.binding.kind == FunctionBinding::Kind::Builtin) {
              return SequenceType::function_one(builtin_catalog()[node.binding.index].signature);
            }
            return SequenceType::function_one(declared_signature(module_.functions[node.binding.index]));
          } else {
            return SequenceType::item_star();
          }
        },
        e.node);
  }

  Module& module_;
  std::vector<std::pair<std::string, SequenceType>> scope_;
};

// ------------------------------------------------------------------- modes

class ModeInference {
 public:
  ModeInference(Module& module, ModePolicy policy) : module_(module), policy_(policy) {}

  InferenceReport run() {
    InferenceReport report;
    for (FunctionDecl& decl : module_.functions) {
      decl.param_modes.assign(decl.arity(), ExecutionMode::Unset);
      decl.body_mode = ExecutionMode::Unset;
    }
    mark_referenced();
    sweep_until_stable(report);

    // Functions that were never called (or only recurse) fall back to the
    // most general mode, then modes are propagated once more.
    bool defaulted = false;
    for (FunctionDecl& decl : module_.functions) {
      for (auto& m : decl.param_modes) {
        if (m == ExecutionMode::Unset) {
          m = ExecutionMode::LocalSeq;
          defaulted = true;
        }
      }
      if (decl.body_mode == ExecutionMode::Unset) {
        decl.body_mode = ExecutionMode::LocalSeq;
        defaulted = true;
      }
    }
    if (defaulted) sweep_until_stable(report);

    for (FunctionDecl& decl : module_.functions) finalize(decl.body);
    finalize(module_.body);
    return report;
  }

 private:
  void sweep_until_stable(InferenceReport& report) {
    do {
      changed_ = false;
      ++report.passes;
      for (FunctionDecl& decl : module_.functions) {
        scope_.clear();
        for (std::size_t i = 0; i < decl.arity(); ++i) {
          scope_.emplace_back(decl.params[i].name, decl.param_modes[i]);
        }
        ExecutionMode body = join_modes(decl.body_mode, infer(decl.body));
        if (body != decl.body_mode) {
          decl.body_mode = body;
          changed_ = true;
        }
      }
      scope_.clear();
      infer(module_.body);
    } while (changed_);
  }

  /// Functions reachable through `name#arity` may receive anything.
  void mark_referenced() {
    auto visit = [&](auto& self, Expr& e) -> void {
      if (auto* ref = std::get_if<FunctionRefExpr>(&e.node)) {
        if (ref->binding.kind == FunctionBinding::Kind::Declared) {
          for (auto& m : module_.functions[ref->binding.index].param_modes) {
            m = ExecutionMode::LocalSeq;
          }
        }
      }
      for_each_child(e, [&](Expr& child) { self(self, child); });
    };
    for (FunctionDecl& decl : module_.functions) visit(visit, decl.body);
    visit(visit, module_.body);
  }

  void finalize(Expr& e) {
    if (e.mode == ExecutionMode::Unset) e.mode = ExecutionMode::LocalSeq;
    for_each_child(e, [&](Expr& child) { finalize(child); });
  }

  ExecutionMode lookup(const std::string& name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (it->first == name) return it->second;
    }
    return ExecutionMode::LocalOne;
  }

  bool frames_allowed() const { return policy_ != ModePolicy::ForceLocal; }
  bool lowering_allowed() const { return policy_ == ModePolicy::Auto; }

  ExecutionMode infer(Expr& e) {
    e.mode = compute(e);
    return e.mode;
  }

  ExecutionMode compute(Expr& e) {
    using M = ExecutionMode;
    if (auto* v = std::get_if<VarRefExpr>(&e.node)) return lookup(v->name);
    if (auto* flwor = std::get_if<FlworExpr>(&e.node)) {
      std::size_t scope_size = scope_.size();
      bool only_lets = true;
      for (Clause& clause : flwor->clauses) {
        if (auto* f = std::get_if<ForClause>(&clause)) {
          only_lets = false;
          infer(*f->in);
          scope_.emplace_back(f->var, M::LocalOne);
          if (!f->position_var.empty()) scope_.emplace_back(f->position_var, M::LocalOne);
        } else if (auto* l = std::get_if<LetClause>(&clause)) {
          scope_.emplace_back(l->var, infer(*l->value));
        } else if (auto* w = std::get_if<WhereClause>(&clause)) {
          only_lets = false;
          infer(*w->condition);
        } else if (auto* o = std::get_if<OrderByClause>(&clause)) {
          only_lets = false;
          infer(*o->key);
        }
      }
      M result = infer(*flwor->result);
      scope_.resize(scope_size);
      if (only_lets) return result;
      if (lowering_allowed() && is_filter_flwor(*flwor)) {
        const auto& first = std::get<ForClause>(flwor->clauses.front());
        M input = first.in->mode;
        if (input == M::Unset) return M::Unset;
        if (input != M::Frame) return M::LocalSeq;
        for (std::size_t k = 1; k < flwor->clauses.size(); ++k) {
          const Expr& cond = *std::get<WhereClause>(flwor->clauses[k]).condition;
          if (!is_row_local(cond, first.var)) return M::LocalSeq;
        }
        return M::Frame;
      }
      return M::LocalSeq;
    }
    if (auto* pred = std::get_if<PredicateExpr>(&e.node)) {
      M base = infer(*pred->base);
      scope_.emplace_back(std::string(kContextName), M::LocalOne);
      infer(*pred->condition);
      scope_.pop_back();
      if (base == M::Unset) return M::Unset;
      if (base == M::Frame && lowering_allowed() && is_row_local(*pred->condition, "") &&
          has_boolean_root(*pred->condition)) {
        return M::Frame;
      }
      return base == M::LocalOne ? M::LocalOne : M::LocalSeq;
    }

    std::vector<M> children;
    for_each_child(e, [&](Expr& child) { children.push_back(infer(child)); });

    return std::visit(
        [&](auto& node) -> M {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, CommaExpr> || std::is_same_v<T, RangeExpr>) {
            return M::LocalSeq;
          } else if constexpr (std::is_same_v<T, IfExpr>) {
            return join_modes(children[1], children[2]);
          } else if constexpr (std::is_same_v<T, LookupExpr>) {
            if (children[0] == M::Unset) return M::Unset;
            return children[0] == M::LocalOne ? M::LocalOne : M::LocalSeq;
          } else if constexpr (std::is_same_v<T, StaticCallExpr>) {
            if (node.binding.kind == FunctionBinding::Kind::Builtin) {
              M mode = builtin_catalog()[node.binding.index].mode;
              if (mode == M::Frame && !frames_allowed()) return M::LocalSeq;
              return mode;
            }
            FunctionDecl& decl = module_.functions[node.binding.index];
            for (std::size_t i = 0; i < children.size(); ++i) {
              M joined = join_modes(decl.param_modes[i], children[i]);
              if (joined != decl.param_modes[i]) {
                decl.param_modes[i] = joined;
                changed_ = true;
              }
            }
            return decl.body_mode;
          } else if constexpr (std::is_same_v<T, DynamicCallExpr>) {
            const SequenceType& target = node.target->static_type;
            if (!target.is_function() || !target.signature) return M::LocalSeq;
            const FunctionSignature& sig = *target.signature;
            if (sig.result.is_single()) return M::LocalOne;
            if (shape_of(sig) == FunctionShape::Transformer && !node.args.empty()) {
              M first = node.args.front().mode;
              if (first == M::Unset) return M::Unset;
              if (first == M::Frame && frames_allowed()) return M::Frame;
            }
            return M::LocalSeq;
          } else {
            // Literals, constructors, operators, `$$` and function references.
            return M::LocalOne;
          }
        },
        e.node);
  }

  Module& module_;
  ModePolicy policy_;
  bool changed_ = false;
  std::vector<std::pair<std::string, ExecutionMode>> scope_;
};

bool is_row_ref(const Expr& e, std::string_view row_var) {
  if (row_var.empty()) return e.is<ContextItemExpr>();
  return e.is<VarRefExpr>() && e.as<VarRefExpr>().name == row_var;
}

void collect_projection(const Expr& e, std::string_view row_var, RowProjection& out) {
  if (const auto* lookup = std::get_if<LookupExpr>(&e.node)) {
    if (is_row_ref(*lookup->base, row_var) && lookup->key->is<LiteralExpr>() &&
        lookup->key->as<LiteralExpr>().value.is_string()) {
      const std::string& key = lookup->key->as<LiteralExpr>().value.as_string();
      if (std::find(out.keys.begin(), out.keys.end(), key) == out.keys.end()) {
        out.keys.push_back(key);
      }
      return;
    }
  }
  if (is_row_ref(e, row_var)) {
    out.all = true;
    return;
  }
  for_each_child(e, [&](const Expr& child) { collect_projection(child, row_var, out); });
}

}  // namespace

void resolve_names(Module& module) { Resolver(module).run(); }

void infer_static_types(Module& module) { Typer(module).run(); }

InferenceReport infer_execution_modes(Module& module, ModePolicy policy) {
  return ModeInference(module, policy).run();
}

bool is_row_local(const Expr& expr, std::string_view row_var) {
  if (expr.is<ContextItemExpr>()) return row_var.empty();
  if (const auto* v = std::get_if<VarRefExpr>(&expr.node)) return !row_var.empty() && v->name == row_var;
  if (const auto* call = std::get_if<StaticCallExpr>(&expr.node)) {
    if (call->binding.kind != FunctionBinding::Kind::Builtin) return false;
    if (!builtin_catalog()[call->binding.index].row_scalar) return false;
  } else if (expr.is<FlworExpr>() || expr.is<PredicateExpr>() || expr.is<DynamicCallExpr>() ||
             expr.is<FunctionRefExpr>()) {
    return false;
  }
  bool ok = true;
  for_each_child(expr, [&](const Expr& child) { ok = ok && is_row_local(child, row_var); });
  return ok;
}

bool has_boolean_root(const Expr& expr) {
  if (expr.is<ComparisonExpr>() || expr.is<LogicExpr>() || expr.is<NotExpr>()) return true;
  if (const auto* lit = std::get_if<LiteralExpr>(&expr.node)) return lit->value.is_boolean();
  if (const auto* call = std::get_if<StaticCallExpr>(&expr.node)) {
    if (call->binding.kind != FunctionBinding::Kind::Builtin) return false;
    const SequenceType& result = builtin_catalog()[call->binding.index].signature.result;
    return result.test == SequenceType::ItemTest::Atomic && result.atomic == AtomicKind::Boolean &&
           result.is_single();
  }
  return false;
}

RowProjection row_projection(const Expr& expr, std::string_view row_var) {
  RowProjection out;
  collect_projection(expr, row_var, out);
  if (out.all) out.keys.clear();
  return out;
}

bool is_filter_flwor(const FlworExpr& flwor) {
  if (flwor.clauses.empty()) return false;
  const auto* first = std::get_if<ForClause>(&flwor.clauses.front());
  if (!first || !first->position_var.empty()) return false;
  for (std::size_t k = 1; k < flwor.clauses.size(); ++k) {
    if (!std::holds_alternative<WhereClause>(flwor.clauses[k])) return false;
  }
  return flwor.result->is<VarRefExpr>() && flwor.result->as<VarRefExpr>().name == first->var;
}

}  // namespace jqml
