#include "jqml/builtins.hpp"
#include "jqml/engine.hpp"
#include "jqml/error.hpp"
#include "jqml/frame.hpp"
#include "jqml/parser.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace jqml {

namespace {

constexpr std::string_view kContextName = "$$";

struct Binding {
  std::string_view name;
  Sequence value;
  std::shared_ptr<const Binding> next;
};
using Env = std::shared_ptr<const Binding>;

Env extend(Env env, std::string_view name, Sequence value) {
  return std::make_shared<const Binding>(Binding{name, std::move(value), std::move(env)});
}

const Sequence& lookup(const Env& env, std::string_view name) {
  for (const Binding* b = env.get(); b; b = b->next.get()) {
    if (b->name == name) return b->value;
  }
  fail(ErrorCode::UndefinedVariable, "variable $" + std::string(name) + " is not bound");
}

/// Binding form of a value: replayable, with lazy streams collected under the cap.
Sequence settle(const Sequence& value, std::size_t cap) {
  if (value.is_lazy()) return materialize_sequence(value, cap);
  return value;
}

class Evaluator;

class TupleCursor {
 public:
  virtual ~TupleCursor() = default;
  virtual std::optional<Env> next() = 0;
};

class Evaluator : public CallContext {
 public:
  Evaluator(std::shared_ptr<const Program> program)
      : program_(std::move(program)), current_(program_.get()) {}

  Sequence eval(const Expr& e, const Env& env) {
    try {
      return eval_node(e, env);
    } catch (const Error& err) {
      if (err.pos().valid()) throw;
      throw err.with_pos(e.pos);
    }
  }

  Sequence call(const FunctionItem& fn, std::vector<Sequence> args) override {
    return fn.invoke(*this, std::move(args));
  }
  std::size_t materialization_cap() const override { return program_->options.cap; }
  std::size_t partitions() const override { return program_->options.partitions; }
  bool frames_allowed() const { return program_->options.policy != ModePolicy::ForceLocal; }

  Sequence call_declared(const std::shared_ptr<const Program>& program, int index,
                         std::vector<Sequence>& args) {
    const FunctionDecl& decl = program->module.functions[static_cast<std::size_t>(index)];
    Env env;
    for (std::size_t i = 0; i < decl.arity(); ++i) {
      env = extend(env, decl.params[i].name, settle(args[i], materialization_cap()));
    }
    if (program.get() == current_) return eval(decl.body, env);
    const Program* saved = current_;
    current_ = program.get();
    try {
      Sequence out = materialize_sequence(eval(decl.body, env), materialization_cap());
      current_ = saved;
      return out;
    } catch (...) {
      current_ = saved;
      throw;
    }
  }

  bool ebv(const Expr& e, const Env& env) {
    try {
      return effective_boolean_value(eval(e, env));
    } catch (const Error& err) {
      if (err.pos().valid()) throw;
      throw err.with_pos(e.pos);
    }
  }

  /// At most one atomic value; objects, arrays and functions are rejected.
  std::optional<AtomicValue> atomize_one(const Expr& e, const Env& env, std::string_view what) {
    Sequence seq = eval(e, env);
    std::optional<Item> item;
    if (seq.is_single()) {
      item = seq.item();
    } else {
      auto cursor = seq.open();
      item = cursor->next();
      if (item && cursor->next()) {
        fail(ErrorCode::TypeError, std::string(what) + " expects at most one item, got a sequence", e.pos);
      }
    }
    if (!item) return std::nullopt;
    if (!item->is_atomic()) {
      fail(ErrorCode::TypeError, std::string(what) + " is not defined for " + item->type_name(), e.pos);
    }
    return item->atomic();
  }

  const Program& current() const { return *current_; }

 private:
  Sequence eval_node(const Expr& e, const Env& env);
  Sequence eval_flwor(const Expr& e, const FlworExpr& flwor, const Env& env);
  Sequence eval_predicate(const Expr& e, const PredicateExpr& pred, const Env& env);
  Sequence eval_lookup(const LookupExpr& lookup, const Env& env);
  Sequence eval_object(const ObjectExpr& object, const Env& env);
  Sequence eval_merged(const MergedObjectExpr& merged, const Env& env);
  Sequence eval_static_call(const Expr& e, const StaticCallExpr& call, const Env& env);
  Sequence eval_dynamic_call(const Expr& e, const DynamicCallExpr& call, const Env& env);
  Sequence eval_function_ref(const FunctionRefExpr& ref);

  std::shared_ptr<const Frame> filter_frame(const Frame& frame, std::vector<const Expr*> conditions,
                                            std::string_view var, const Env& env);

  std::shared_ptr<const Program> program_;
  const Program* current_;
};

// ---- item cursors ----

class ConcatCursor : public ItemCursor {
 public:
  ConcatCursor(Evaluator& ev, const std::vector<Expr>& items, Env env)
      : ev_(ev), items_(items), env_(std::move(env)) {}
  std::optional<Item> next() override {
    while (true) {
      if (current_) {
        if (auto item = current_->next()) return item;
        current_.reset();
      }
      if (index_ >= items_.size()) return std::nullopt;
      current_ = ev_.eval(items_[index_++], env_).open();
    }
  }

 private:
  Evaluator& ev_;
  const std::vector<Expr>& items_;
  Env env_;
  std::size_t index_ = 0;
  std::shared_ptr<ItemCursor> current_;
};

class RangeCursor : public ItemCursor {
 public:
  RangeCursor(BigInt low, BigInt high) : next_(std::move(low)), high_(std::move(high)) {}
  std::optional<Item> next() override {
    if (next_ > high_) return std::nullopt;
    Item out(AtomicValue::integer(next_));
    ++next_;
    return out;
  }

 private:
  BigInt next_;
  BigInt high_;
};

class PredicateCursor : public ItemCursor {
 public:
  PredicateCursor(Evaluator& ev, std::shared_ptr<ItemCursor> source, const Expr& condition, Env env)
      : ev_(ev), source_(std::move(source)), condition_(condition), env_(std::move(env)) {}
  std::optional<Item> next() override {
    while (auto item = source_->next()) {
      ++position_;
      Sequence r = ev_.eval(condition_, extend(env_, kContextName, Sequence::single(*item)));
      if (keep(r)) return item;
    }
    return std::nullopt;
  }

 private:
  bool keep(const Sequence& r) const {
    std::optional<Item> only;
    if (r.is_single()) {
      only = r.item();
    } else if (!r.is_frame()) {
      auto cursor = r.open();
      only = cursor->next();
      if (!only) return false;
      if (cursor->next()) only.reset();
    }
    if (only && only->is_atomic() && only->atomic().is_numeric()) {
      return compare_atomic(only->atomic(), AtomicValue::integer(position_), false) ==
             std::partial_ordering::equivalent;
    }
    try {
      if (only) return effective_boolean_value(Sequence::single(*only));
      if (r.is_frame()) return effective_boolean_value(r);
      fail(ErrorCode::EbvError, "effective boolean value of a sequence of more than one item");
    } catch (const Error& err) {
      if (err.pos().valid()) throw;
      throw err.with_pos(condition_.pos);
    }
  }

  Evaluator& ev_;
  std::shared_ptr<ItemCursor> source_;
  const Expr& condition_;
  Env env_;
  std::int64_t position_ = 0;
};

class LookupCursor : public ItemCursor {
 public:
  LookupCursor(std::shared_ptr<ItemCursor> source, std::string key)
      : source_(std::move(source)), key_(std::move(key)) {}
  std::optional<Item> next() override {
    while (auto item = source_->next()) {
      if (!item->is_object()) continue;
      if (const Item* v = item->object().find(key_)) return *v;
    }
    return std::nullopt;
  }

 private:
  std::shared_ptr<ItemCursor> source_;
  std::string key_;
};

/// `for $v in E where C ... return $v` evaluated item by item.
class FilterCursor : public ItemCursor {
 public:
  FilterCursor(Evaluator& ev, std::shared_ptr<ItemCursor> source, std::string_view var,
               std::vector<const Expr*> conditions, Env env)
      : ev_(ev), source_(std::move(source)), var_(var), conditions_(std::move(conditions)),
        env_(std::move(env)) {}
  std::optional<Item> next() override {
    while (auto item = source_->next()) {
      Env row = extend(env_, var_, Sequence::single(*item));
      bool keep = true;
      for (const Expr* c : conditions_) {
        if (!ev_.ebv(*c, row)) {
          keep = false;
          break;
        }
      }
      if (keep) return item;
    }
    return std::nullopt;
  }

 private:
  Evaluator& ev_;
  std::shared_ptr<ItemCursor> source_;
  std::string_view var_;
  std::vector<const Expr*> conditions_;
  Env env_;
};

// ---- tuple cursors ----

class StartCursor : public TupleCursor {
 public:
  explicit StartCursor(Env env) : env_(std::move(env)) {}
  std::optional<Env> next() override {
    if (done_) return std::nullopt;
    done_ = true;
    return env_;
  }

 private:
  Env env_;
  bool done_ = false;
};

class ForCursor : public TupleCursor {
 public:
  ForCursor(Evaluator& ev, std::unique_ptr<TupleCursor> parent, const ForClause& clause)
      : ev_(ev), parent_(std::move(parent)), clause_(clause) {}
  std::optional<Env> next() override {
    while (true) {
      if (items_) {
        if (auto item = items_->next()) {
          ++position_;
          Env env = extend(*tuple_, clause_.var, Sequence::single(std::move(*item)));
          if (!clause_.position_var.empty()) {
            env = extend(env, clause_.position_var, Sequence::single(Item::integer(position_)));
          }
          return env;
        }
        items_.reset();
      }
      tuple_ = parent_->next();
      if (!tuple_) return std::nullopt;
      items_ = ev_.eval(*clause_.in, *tuple_).open();
      position_ = 0;
    }
  }

 private:
  Evaluator& ev_;
  std::unique_ptr<TupleCursor> parent_;
  const ForClause& clause_;
  std::optional<Env> tuple_;
  std::shared_ptr<ItemCursor> items_;
  std::int64_t position_ = 0;
};

class LetCursor : public TupleCursor {
 public:
  LetCursor(Evaluator& ev, std::unique_ptr<TupleCursor> parent, const LetClause& clause)
      : ev_(ev), parent_(std::move(parent)), clause_(clause) {}
  std::optional<Env> next() override {
    auto tuple = parent_->next();
    if (!tuple) return std::nullopt;
    Sequence value = settle(ev_.eval(*clause_.value, *tuple), ev_.materialization_cap());
    return extend(*tuple, clause_.var, std::move(value));
  }

 private:
  Evaluator& ev_;
  std::unique_ptr<TupleCursor> parent_;
  const LetClause& clause_;
};

class WhereCursor : public TupleCursor {
 public:
  WhereCursor(Evaluator& ev, std::unique_ptr<TupleCursor> parent, const WhereClause& clause)
      : ev_(ev), parent_(std::move(parent)), clause_(clause) {}
  std::optional<Env> next() override {
    while (auto tuple = parent_->next()) {
      if (ev_.ebv(*clause_.condition, *tuple)) return tuple;
    }
    return std::nullopt;
  }

 private:
  Evaluator& ev_;
  std::unique_ptr<TupleCursor> parent_;
  const WhereClause& clause_;
};

/// Orders sort keys: the empty key first, then by value.
int compare_keys(const std::optional<AtomicValue>& a, const std::optional<AtomicValue>& b) {
  if (!a || !b) return (a ? 1 : 0) - (b ? 1 : 0);
  auto order = compare_atomic(*a, *b, false);
  if (order == std::partial_ordering::less) return -1;
  if (order == std::partial_ordering::greater) return 1;
  if (order == std::partial_ordering::unordered) {
    // NaN sorts below every other number.
    bool an = a->is_numeric() && a->to_double() != a->to_double();
    bool bn = b->is_numeric() && b->to_double() != b->to_double();
    return (an ? 0 : 1) - (bn ? 0 : 1);
  }
  return 0;
}

class OrderByCursor : public TupleCursor {
 public:
  OrderByCursor(Evaluator& ev, std::unique_ptr<TupleCursor> parent, const OrderByClause& clause, SourcePos pos)
      : ev_(ev), parent_(std::move(parent)), clause_(clause), pos_(pos) {}
  std::optional<Env> next() override {
    if (!sorted_) sort();
    if (index_ >= tuples_.size()) return std::nullopt;
    return std::move(tuples_[index_++].second);
  }

 private:
  void sort() {
    sorted_ = true;
    std::size_t cap = ev_.materialization_cap();
    while (auto tuple = parent_->next()) {
      if (tuples_.size() >= cap) {
        fail(ErrorCode::MaterializationCapExceeded,
             "order by exceeds the materialization cap of " + std::to_string(cap) + " items", pos_);
      }
      auto key = ev_.atomize_one(*clause_.key, *tuple, "order by");
      tuples_.emplace_back(std::move(key), std::move(*tuple));
    }
    bool descending = clause_.descending;
    std::stable_sort(tuples_.begin(), tuples_.end(), [descending](const auto& a, const auto& b) {
      int c = compare_keys(a.first, b.first);
      return descending ? c > 0 : c < 0;
    });
  }

  Evaluator& ev_;
  std::unique_ptr<TupleCursor> parent_;
  const OrderByClause& clause_;
  SourcePos pos_;
  bool sorted_ = false;
  std::vector<std::pair<std::optional<AtomicValue>, Env>> tuples_;
  std::size_t index_ = 0;
};

class ReturnCursor : public ItemCursor {
 public:
  ReturnCursor(Evaluator& ev, std::unique_ptr<TupleCursor> tuples, const Expr& result)
      : ev_(ev), tuples_(std::move(tuples)), result_(result) {}
  std::optional<Item> next() override {
    while (true) {
      if (current_) {
        if (auto item = current_->next()) return item;
        current_.reset();
      }
      auto tuple = tuples_->next();
      if (!tuple) return std::nullopt;
      current_ = ev_.eval(result_, *tuple).open();
    }
  }

 private:
  Evaluator& ev_;
  std::unique_ptr<TupleCursor> tuples_;
  const Expr& result_;
  std::shared_ptr<ItemCursor> current_;
};

/// Keeps the evaluator alive for as long as a lazy result is being read.
class OwningCursor : public ItemCursor {
 public:
  OwningCursor(std::shared_ptr<Evaluator> ev, std::shared_ptr<ItemCursor> source)
      : ev_(std::move(ev)), source_(std::move(source)) {}
  std::optional<Item> next() override { return source_->next(); }

 private:
  std::shared_ptr<Evaluator> ev_;
  std::shared_ptr<ItemCursor> source_;
};

// ---- evaluation ----

Sequence single_or_empty(std::optional<AtomicValue> value) {
  return value ? Sequence::single(Item(std::move(*value))) : Sequence::empty();
}

Sequence Evaluator::eval_node(const Expr& e, const Env& env) {
  return std::visit(
      [&](const auto& node) -> Sequence {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, LiteralExpr>) {
          return Sequence::single(Item(node.value));
        } else if constexpr (std::is_same_v<T, VarRefExpr>) {
          return lookup(env, node.name);
        } else if constexpr (std::is_same_v<T, ContextItemExpr>) {
          return lookup(env, kContextName);
        } else if constexpr (std::is_same_v<T, CommaExpr>) {
          if (node.items.empty()) return Sequence::empty();
          return Sequence::stream(std::make_shared<ConcatCursor>(*this, node.items, env));
        } else if constexpr (std::is_same_v<T, FlworExpr>) {
          return eval_flwor(e, node, env);
        } else if constexpr (std::is_same_v<T, IfExpr>) {
          return ebv(*node.condition, env) ? eval(*node.then_branch, env) : eval(*node.else_branch, env);
        } else if constexpr (std::is_same_v<T, LogicExpr>) {
          bool lhs = ebv(*node.lhs, env);
          if (node.is_and && !lhs) return Sequence::single(Item::boolean(false));
          if (!node.is_and && lhs) return Sequence::single(Item::boolean(true));
          return Sequence::single(Item::boolean(ebv(*node.rhs, env)));
        } else if constexpr (std::is_same_v<T, NotExpr>) {
          return Sequence::single(Item::boolean(!ebv(*node.operand, env)));
        } else if constexpr (std::is_same_v<T, ComparisonExpr>) {
          auto lhs = atomize_one(*node.lhs, env, "comparison");
          auto rhs = atomize_one(*node.rhs, env, "comparison");
          if (!lhs || !rhs) return Sequence::empty();
          return Sequence::single(Item::boolean(compare_atomic(node.op, *lhs, *rhs)));
        } else if constexpr (std::is_same_v<T, ArithmeticExpr>) {
          auto lhs = atomize_one(*node.lhs, env, "arithmetic");
          auto rhs = atomize_one(*node.rhs, env, "arithmetic");
          if (!lhs || !rhs) return Sequence::empty();
          if (lhs->is_null() || rhs->is_null()) return Sequence::single(Item::null());
          return Sequence::single(Item(arithmetic(node.op, *lhs, *rhs)));
        } else if constexpr (std::is_same_v<T, NegateExpr>) {
          auto v = atomize_one(*node.operand, env, "unary minus");
          if (v && v->is_null()) return Sequence::single(Item::null());
          return single_or_empty(v ? std::optional<AtomicValue>(negate(*v)) : std::nullopt);
        } else if constexpr (std::is_same_v<T, RangeExpr>) {
          auto low = atomize_one(*node.low, env, "range");
          auto high = atomize_one(*node.high, env, "range");
          if (!low || !high) return Sequence::empty();
          if (!is_integer_kind(low->kind()) || !is_integer_kind(high->kind())) {
            fail(ErrorCode::TypeError, "range bounds must be integers");
          }
          return Sequence::stream(std::make_shared<RangeCursor>(low->as_integer(), high->as_integer()));
        } else if constexpr (std::is_same_v<T, ObjectExpr>) {
          return eval_object(node, env);
        } else if constexpr (std::is_same_v<T, MergedObjectExpr>) {
          return eval_merged(node, env);
        } else if constexpr (std::is_same_v<T, ArrayExpr>) {
          if (!node.content) return Sequence::single(Item::array({}));
          return Sequence::single(Item::array(materialize(eval(*node.content, env), materialization_cap())));
        } else if constexpr (std::is_same_v<T, PredicateExpr>) {
          return eval_predicate(e, node, env);
        } else if constexpr (std::is_same_v<T, LookupExpr>) {
          return eval_lookup(node, env);
        } else if constexpr (std::is_same_v<T, StaticCallExpr>) {
          return eval_static_call(e, node, env);
        } else if constexpr (std::is_same_v<T, DynamicCallExpr>) {
          return eval_dynamic_call(e, node, env);
        } else {
          static_assert(std::is_same_v<T, FunctionRefExpr>);
          return eval_function_ref(node);
        }
      },
      e.node);
}

std::shared_ptr<const Frame> Evaluator::filter_frame(const Frame& frame, std::vector<const Expr*> conditions,
                                                     std::string_view var, const Env& env) {
  std::vector<std::string> keys;
  bool all = false;
  for (const Expr* c : conditions) {
    RowProjection p = row_projection(*c, var);
    if (p.all) all = true;
    for (auto& k : p.keys) {
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    }
  }
  std::vector<std::size_t> projection;
  if (!all) {
    for (const std::string& k : keys) {
      if (auto index = frame.column_index(k)) projection.push_back(*index);
    }
    // An empty projection would mean "all columns"; any column will do for
    // conditions that ignore the row's fields.
    if (projection.empty() && frame.column_count() > 0 && keys.empty()) projection.push_back(0);
  }
  std::string_view name = var.empty() ? kContextName : var;
  return frame_filter_rows(
      frame,
      [&](const Item& row) {
        Env row_env = extend(env, name, Sequence::single(row));
        for (const Expr* c : conditions) {
          if (!ebv(*c, row_env)) return false;
        }
        return true;
      },
      projection);
}

Sequence Evaluator::eval_flwor(const Expr& e, const FlworExpr& flwor, const Env& env) {
  if (is_filter_flwor(flwor)) {
    const ForClause& first = std::get<ForClause>(flwor.clauses.front());
    std::vector<const Expr*> conditions;
    for (std::size_t k = 1; k < flwor.clauses.size(); ++k) {
      conditions.push_back(std::get<WhereClause>(flwor.clauses[k]).condition.get());
    }
    Sequence input = eval(*first.in, env);
    if (e.mode == ExecutionMode::Frame && input.is_frame()) {
      if (conditions.empty()) return input;
      return Sequence::frame(filter_frame(*input.frame(), conditions, first.var, env));
    }
    Sequence out = Sequence::stream(
        std::make_shared<FilterCursor>(*this, input.open(), first.var, std::move(conditions), env));
    return input.schema_tag() ? out.with_schema_tag(input.schema_tag()) : out;
  }
  std::unique_ptr<TupleCursor> tuples = std::make_unique<StartCursor>(env);
  for (const Clause& clause : flwor.clauses) {
    std::visit(
        [&](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, ForClause>) {
            tuples = std::make_unique<ForCursor>(*this, std::move(tuples), c);
          } else if constexpr (std::is_same_v<T, LetClause>) {
            tuples = std::make_unique<LetCursor>(*this, std::move(tuples), c);
          } else if constexpr (std::is_same_v<T, WhereClause>) {
            tuples = std::make_unique<WhereCursor>(*this, std::move(tuples), c);
          } else {
            tuples = std::make_unique<OrderByCursor>(*this, std::move(tuples), c, e.pos);
          }
        },
        clause);
  }
  bool only_lets = std::all_of(flwor.clauses.begin(), flwor.clauses.end(),
                               [](const Clause& c) { return std::holds_alternative<LetClause>(c); });
  if (only_lets) {
    // A single tuple: return the result as is so frames and tags survive.
    auto tuple = tuples->next();
    return eval(*flwor.result, *tuple);
  }
  return Sequence::stream(std::make_shared<ReturnCursor>(*this, std::move(tuples), *flwor.result));
}

Sequence Evaluator::eval_predicate(const Expr& e, const PredicateExpr& pred, const Env& env) {
  Sequence base = eval(*pred.base, env);
  if (e.mode == ExecutionMode::Frame && base.is_frame()) {
    return Sequence::frame(filter_frame(*base.frame(), {pred.condition.get()}, "", env));
  }
  Sequence out = Sequence::stream(std::make_shared<PredicateCursor>(*this, base.open(), *pred.condition, env));
  return base.schema_tag() ? out.with_schema_tag(base.schema_tag()) : out;
}

Sequence Evaluator::eval_lookup(const LookupExpr& node, const Env& env) {
  Sequence base = eval(*node.base, env);
  auto key = atomize_one(*node.key, env, "object lookup");
  if (!key) return Sequence::empty();
  std::string name = key->lexical();
  if (base.is_single()) {
    const Item& item = base.item();
    if (!item.is_object()) return Sequence::empty();
    const Item* v = item.object().find(name);
    return v ? Sequence::single(*v) : Sequence::empty();
  }
  return Sequence::stream(std::make_shared<LookupCursor>(base.open(), std::move(name)));
}

Sequence Evaluator::eval_object(const ObjectExpr& object, const Env& env) {
  std::vector<std::pair<std::string, Item>> fields;
  fields.reserve(object.entries.size());
  for (const ObjectEntry& entry : object.entries) {
    auto key = atomize_one(*entry.key, env, "object key");
    if (!key) fail(ErrorCode::TypeError, "object key is the empty sequence", entry.key->pos);
    std::vector<Item> values = materialize(eval(*entry.value, env), materialization_cap());
    Item value;
    if (values.size() == 1) {
      value = std::move(values[0]);
    } else if (values.size() > 1) {
      value = Item::array(std::move(values));
    }
    fields.emplace_back(key->lexical(), std::move(value));
  }
  return Sequence::single(Item::object(std::move(fields)));
}

Sequence Evaluator::eval_merged(const MergedObjectExpr& merged, const Env& env) {
  std::vector<std::pair<std::string, Item>> fields;
  std::unordered_set<std::string> seen;
  auto cursor = eval(*merged.content, env).open();
  while (auto item = cursor->next()) {
    if (!item->is_object()) {
      fail(ErrorCode::TypeError, "merged object constructor expects objects, got " + item->type_name());
    }
    for (const auto& [key, value] : item->object().fields()) {
      if (!seen.insert(key).second) {
        fail(ErrorCode::DuplicateKeyInMerge, "key \"" + key + "\" appears in more than one merged object");
      }
      fields.emplace_back(key, value);
    }
  }
  return Sequence::single(Item::object(std::move(fields)));
}

Sequence Evaluator::eval_static_call(const Expr& e, const StaticCallExpr& call, const Env& env) {
  std::vector<Sequence> args;
  args.reserve(call.args.size());
  for (const Expr& a : call.args) args.push_back(eval(a, env));
  if (call.binding.kind == FunctionBinding::Kind::Builtin) {
    const BuiltinSpec& spec = builtin_catalog()[static_cast<std::size_t>(call.binding.index)];
    BuiltinCall bc{args, e.mode, *this, e.pos};
    return spec.impl(bc);
  }
  if (call.binding.kind != FunctionBinding::Kind::Declared) {
    fail(ErrorCode::UnknownFunction, "unresolved function " + call.name);
  }
  const FunctionDecl& decl = current_->module.functions[static_cast<std::size_t>(call.binding.index)];
  Env callee;
  for (std::size_t i = 0; i < decl.arity(); ++i) {
    callee = extend(callee, decl.params[i].name, settle(args[i], materialization_cap()));
  }
  return eval(decl.body, callee);
}

Sequence Evaluator::eval_dynamic_call(const Expr& e, const DynamicCallExpr& call, const Env& env) {
  std::vector<Item> targets = materialize(eval(*call.target, env), 2);
  if (targets.size() != 1 || !targets[0].is_function()) {
    fail(ErrorCode::NotAFunction, targets.size() == 1
                                      ? "cannot call a value of type " + targets[0].type_name()
                                      : "dynamic call target must be a single function item");
  }
  std::vector<Sequence> args;
  args.reserve(call.args.size());
  for (const Expr& a : call.args) args.push_back(eval(a, env));
  Sequence result = targets[0].function().invoke(*this, std::move(args));
  switch (e.mode) {
    case ExecutionMode::LocalOne: {
      if (result.is_single()) return result;
      auto cursor = result.open();
      auto first = cursor->next();
      if (first && cursor->next()) {
        fail(ErrorCode::ModeAssumptionViolated,
             "call to " + targets[0].function().name() + " was planned for at most one item but returned more");
      }
      return first ? Sequence::single(*first) : Sequence::empty();
    }
    case ExecutionMode::Frame:
      if (!result.is_frame()) {
        fail(ErrorCode::ModeAssumptionViolated,
             "call to " + targets[0].function().name() + " was planned as a frame but returned a local sequence");
      }
      return result;
    default:
      if (result.is_frame()) {
        if (result.frame()->row_count() > materialization_cap()) {
          fail(ErrorCode::MaterializationCapExceeded,
               "frame of " + std::to_string(result.frame()->row_count()) +
                   " rows exceeds the materialization cap of " + std::to_string(materialization_cap()) + " items");
        }
        return lower_to_stream(result);
      }
      return result;
  }
}

FunctionSignature declared_signature(const FunctionDecl& decl) {
  FunctionSignature sig;
  for (const Param& p : decl.params) sig.params.push_back(p.type ? *p.type : SequenceType::item_star());
  sig.result = decl.result ? *decl.result : SequenceType::item_star();
  return sig;
}

Sequence Evaluator::eval_function_ref(const FunctionRefExpr& ref) {
  if (ref.binding.kind == FunctionBinding::Kind::Builtin) {
    std::size_t index = static_cast<std::size_t>(ref.binding.index);
    const BuiltinSpec& spec = builtin_catalog()[index];
    auto body = [index](CallContext& ctx, std::vector<Sequence>& args) -> Sequence {
      const BuiltinSpec& s = builtin_catalog()[index];
      auto* ev = dynamic_cast<Evaluator*>(&ctx);
      ExecutionMode mode = ExecutionMode::LocalSeq;
      if (s.mode == ExecutionMode::Frame && ev && ev->frames_allowed()) mode = ExecutionMode::Frame;
      BuiltinCall bc{args, mode, ctx, SourcePos{}};
      return s.impl(bc);
    };
    return Sequence::single(Item::function(
        std::make_shared<FunctionItem>(spec.name, spec.signature, FunctionKind::Builtin, std::move(body))));
  }
  if (ref.binding.kind != FunctionBinding::Kind::Declared) {
    fail(ErrorCode::UnknownFunction, "unresolved function " + ref.name + "#" + std::to_string(ref.arity));
  }
  int index = ref.binding.index;
  const FunctionDecl& decl = current_->module.functions[static_cast<std::size_t>(index)];
  // The closure keeps the owning program alive; `current_` always belongs to
  // a program held by some evaluator or closure.
  std::shared_ptr<const Program> owner =
      current_ == program_.get() ? program_ : std::shared_ptr<const Program>(program_, current_);
  auto body = [owner, index](CallContext& ctx, std::vector<Sequence>& args) -> Sequence {
    auto* ev = dynamic_cast<Evaluator*>(&ctx);
    if (!ev) fail(ErrorCode::NotAFunction, "user-defined functions can only be called by the query engine");
    return ev->call_declared(owner, index, args);
  };
  return Sequence::single(Item::function(std::make_shared<FunctionItem>(
      decl.name, declared_signature(decl), FunctionKind::UserDefined, std::move(body))));
}

}  // namespace

Query Query::compile(std::string_view text, EngineOptions options) {
  auto program = std::make_shared<Program>();
  program->module = parse_module(text);
  program->options = options;
  resolve_names(program->module);
  infer_static_types(program->module);
  program->report = infer_execution_modes(program->module, options.policy);
  return Query(std::move(program));
}

Sequence Query::evaluate(const Bindings& bindings) const {
  auto ev = std::make_shared<Evaluator>(program_);
  Env env;
  for (const std::string& name : program_->module.externals) {
    auto it = bindings.find(name);
    if (it == bindings.end()) {
      fail(ErrorCode::UndefinedVariable, "external variable $" + name + " is not bound");
    }
    env = extend(env, name, settle(it->second, program_->options.cap));
  }
  Sequence result = ev->eval(program_->module.body, env);
  if (!result.is_lazy()) return result;
  Sequence out = Sequence::stream(std::make_shared<OwningCursor>(ev, result.open()));
  return result.schema_tag() ? out.with_schema_tag(result.schema_tag()) : out;
}

void Query::run(const Bindings& bindings, const std::function<void(const Item&)>& sink) const {
  auto cursor = evaluate(bindings).open();
  while (auto item = cursor->next()) sink(*item);
}

std::vector<Item> Query::collect(const Bindings& bindings) const {
  std::vector<Item> out;
  run(bindings, [&](const Item& item) { out.push_back(item); });
  return out;
}

}  // namespace jqml
