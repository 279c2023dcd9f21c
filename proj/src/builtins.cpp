#include "jqml/builtins.hpp"

#include "jqml/error.hpp"
#include "jqml/frame.hpp"
#include "jqml/ml.hpp"
#include "jqml/schema.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>

namespace jqml {

namespace {

using M = ExecutionMode;
using ST = SequenceType;

ST atomic_type(AtomicKind kind, Occurrence occurrence) {
  return {ST::ItemTest::Atomic, kind, occurrence, nullptr};
}
ST string_one() { return atomic_type(AtomicKind::String, Occurrence::One); }
ST string_opt() { return atomic_type(AtomicKind::String, Occurrence::ZeroOrOne); }
ST string_star() { return atomic_type(AtomicKind::String, Occurrence::ZeroOrMore); }
ST boolean_one() { return atomic_type(AtomicKind::Boolean, Occurrence::One); }
ST integer_one() { return atomic_type(AtomicKind::Integer, Occurrence::One); }
ST double_one() { return atomic_type(AtomicKind::Double, Occurrence::One); }
ST item_opt() { return {ST::ItemTest::Item, AtomicKind::String, Occurrence::ZeroOrOne, nullptr}; }
ST item_star() { return ST::item_star(); }
ST atomic_opt() { return {ST::ItemTest::Atomic, AtomicKind::String, Occurrence::ZeroOrOne, nullptr}; }
ST atomic_star() { return {ST::ItemTest::Atomic, AtomicKind::String, Occurrence::ZeroOrMore, nullptr}; }
ST any_function_one() { return {ST::ItemTest::Function, AtomicKind::String, Occurrence::One, nullptr}; }

// ---- argument helpers ----

std::optional<Item> optional_item(const Sequence& seq, std::string_view fn) {
  if (seq.is_single()) return seq.item();
  auto cursor = seq.open();
  auto first = cursor->next();
  if (!first) return std::nullopt;
  if (cursor->next()) fail(ErrorCode::TypeError, std::string(fn) + " expects at most one item");
  return first;
}

Item single_item(const Sequence& seq, std::string_view fn) {
  auto item = optional_item(seq, fn);
  if (!item) fail(ErrorCode::TypeError, std::string(fn) + " expects exactly one item, got none");
  return *item;
}

std::optional<AtomicValue> optional_atomic(const Sequence& seq, std::string_view fn) {
  auto item = optional_item(seq, fn);
  if (!item) return std::nullopt;
  if (!item->is_atomic()) fail(ErrorCode::TypeError, std::string(fn) + " expects an atomic value, got " + item->type_name());
  return item->atomic();
}

/// Lexical form of an optional atomic; empty sequence as "".
std::string string_value(const Sequence& seq, std::string_view fn) {
  auto value = optional_atomic(seq, fn);
  return value ? value->lexical() : std::string();
}

std::string string_argument(const Sequence& seq, std::string_view fn) {
  auto value = optional_atomic(seq, fn);
  if (!value) fail(ErrorCode::TypeError, std::string(fn) + " expects a string, got the empty sequence");
  return value->lexical();
}

// ---- cursors ----

class LinesCursor : public ItemCursor {
 public:
  explicit LinesCursor(const std::string& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) fail(ErrorCode::IoError, "cannot open \"" + path + "\"");
  }
  std::optional<Item> next() override {
    std::string line;
    if (!std::getline(in_, line)) {
      if (in_.bad()) fail(ErrorCode::IoError, "error reading \"" + path_ + "\"");
      return std::nullopt;
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return Item::string(std::move(line));
  }

 private:
  std::ifstream in_;
  std::string path_;
};

class JsonLinesCursor : public ItemCursor {
 public:
  explicit JsonLinesCursor(const std::string& path) : lines_(path) {}
  std::optional<Item> next() override {
    while (auto line = lines_.next()) {
      ++line_;
      const std::string& text = line->atomic().as_string();
      if (text.find_first_not_of(" \t") == std::string::npos) continue;
      try {
        return parse_json(text);
      } catch (const Error& e) {
        throw e.with_context("line " + std::to_string(line_));
      }
    }
    return std::nullopt;
  }

 private:
  LinesCursor lines_;
  std::size_t line_ = 0;
};

class SkipFirstCursor : public ItemCursor {
 public:
  explicit SkipFirstCursor(std::shared_ptr<ItemCursor> source) : source_(std::move(source)) {}
  std::optional<Item> next() override {
    if (!skipped_) {
      skipped_ = true;
      if (!source_->next()) return std::nullopt;
    }
    return source_->next();
  }

 private:
  std::shared_ptr<ItemCursor> source_;
  bool skipped_ = false;
};

// ---- implementations ----

Sequence strings(std::vector<std::string> values) {
  std::vector<Item> items;
  items.reserve(values.size());
  for (auto& v : values) items.push_back(Item::string(std::move(v)));
  return Sequence::materialized(std::move(items));
}

std::vector<std::string> tokenize_literal(const std::string& input, const std::string& separator) {
  std::vector<std::string> out;
  if (input.empty()) return out;
  std::size_t start = 0;
  while (true) {
    std::size_t hit = input.find(separator, start);
    if (hit == std::string::npos) {
      if (start < input.size()) out.push_back(input.substr(start));
      break;
    }
    out.push_back(input.substr(start, hit - start));
    start = hit + separator.size();
  }
  return out;
}

Sequence tokenize_impl(BuiltinCall& call) {
  std::string input = string_value(call.args[0], "tokenize");
  std::string separator = string_argument(call.args[1], "tokenize");
  if (separator.empty()) fail(ErrorCode::InvalidArgument, "tokenize needs a nonempty separator");
  return strings(tokenize_literal(input, separator));
}

Sequence boolean_result(bool value) { return Sequence::single(Item::boolean(value)); }

Sequence head_impl(BuiltinCall& call) {
  const Sequence& seq = call.args[0];
  if (seq.is_single()) return seq;
  auto first = seq.open()->next();
  return first ? Sequence::single(*first) : Sequence::empty();
}

Sequence tail_impl(BuiltinCall& call) {
  const Sequence& seq = call.args[0];
  if (seq.is_single()) return Sequence::empty();
  Sequence out = Sequence::stream(std::make_shared<SkipFirstCursor>(seq.open()));
  return seq.schema_tag() ? out.with_schema_tag(seq.schema_tag()) : out;
}

Sequence count_impl(BuiltinCall& call) {
  return Sequence::single(Item::integer(static_cast<std::int64_t>(count_items(call.args[0]))));
}

Sequence string_impl(BuiltinCall& call) {
  auto item = optional_item(call.args[0], "string");
  if (!item) return Sequence::single(Item::string(""));
  if (!item->is_atomic()) fail(ErrorCode::TypeError, "string() is not defined for " + item->type_name());
  return Sequence::single(Item::string(item->atomic().lexical()));
}

Sequence annotate_impl(BuiltinCall& call) {
  Item schema = single_item(call.args[1], "annotate");
  if (call.mode == M::Frame) return annotate(call.args[0], schema);
  return annotate_stream(call.args[0], schema);
}

Item params_object(const Sequence& seq) {
  std::vector<Item> items = materialize(seq, 2);
  if (items.size() != 1) {
    fail(ErrorCode::ParamTypeError, "parameters must be a single object, got " + std::to_string(items.size()) + " items");
  }
  return items[0];
}

Sequence get_transformer_impl(BuiltinCall& call) {
  std::string name = string_argument(call.args[0], "get-transformer");
  return Sequence::single(ml::get_transformer(name, params_object(call.args[1])));
}

Sequence get_estimator_impl(BuiltinCall& call) {
  std::string name = string_argument(call.args[0], "get-estimator");
  return Sequence::single(ml::get_estimator(name, params_object(call.args[1])));
}

Sequence save_model_impl(BuiltinCall& call) {
  Item model = single_item(call.args[0], "save-model");
  if (!model.is_function()) {
    fail(ErrorCode::UnknownModelKind, "save-model expects a model, got " + model.type_name());
  }
  ml::save_model(model.function(), string_argument(call.args[1], "save-model"));
  return Sequence::empty();
}

Sequence load_model_impl(BuiltinCall& call) {
  return Sequence::single(ml::load_model(string_argument(call.args[0], "load-model")));
}

std::vector<AtomicValue> atomics(const Sequence& seq, std::string_view fn, std::size_t cap) {
  std::vector<AtomicValue> out;
  for (const Item& item : materialize(seq, cap)) {
    if (!item.is_atomic()) fail(ErrorCode::TypeError, std::string(fn) + " expects atomic values, got " + item.type_name());
    out.push_back(item.atomic());
  }
  return out;
}

Sequence sum_impl(BuiltinCall& call) {
  AtomicValue total = AtomicValue::integer(std::int64_t{0});
  auto cursor = call.args[0].open();
  while (auto item = cursor->next()) {
    if (!item->is_atomic()) fail(ErrorCode::TypeError, "sum expects numbers, got " + item->type_name());
    total = arithmetic(ArithOp::Add, total, item->atomic());
  }
  return Sequence::single(Item(total));
}

Sequence avg_impl(BuiltinCall& call) {
  AtomicValue total = AtomicValue::integer(std::int64_t{0});
  std::int64_t n = 0;
  auto cursor = call.args[0].open();
  while (auto item = cursor->next()) {
    if (!item->is_atomic()) fail(ErrorCode::TypeError, "avg expects numbers, got " + item->type_name());
    total = arithmetic(ArithOp::Add, total, item->atomic());
    ++n;
  }
  if (n == 0) return Sequence::empty();
  return Sequence::single(Item(arithmetic(ArithOp::Div, total, AtomicValue::integer(n))));
}

Sequence extremum(BuiltinCall& call, bool want_max) {
  std::optional<AtomicValue> best;
  auto cursor = call.args[0].open();
  while (auto item = cursor->next()) {
    if (!item->is_atomic()) fail(ErrorCode::TypeError, "min/max expect atomic values, got " + item->type_name());
    const AtomicValue& v = item->atomic();
    if (!best) {
      best = v;
      continue;
    }
    auto order = compare_atomic(v, *best, false);
    if (want_max ? order == std::partial_ordering::greater : order == std::partial_ordering::less) best = v;
  }
  return best ? Sequence::single(Item(*best)) : Sequence::empty();
}

Sequence abs_impl(BuiltinCall& call) {
  auto v = optional_atomic(call.args[0], "abs");
  if (!v) return Sequence::empty();
  if (!v->is_numeric()) fail(ErrorCode::TypeError, "abs expects a number");
  if (compare_atomic(*v, AtomicValue::integer(std::int64_t{0}), false) == std::partial_ordering::less) {
    return Sequence::single(Item(negate(*v)));
  }
  return Sequence::single(Item(*v));
}

Sequence floor_impl(BuiltinCall& call) {
  auto v = optional_atomic(call.args[0], "floor");
  if (!v) return Sequence::empty();
  if (!v->is_numeric()) fail(ErrorCode::TypeError, "floor expects a number");
  switch (v->kind()) {
    case AtomicKind::Double: return Sequence::single(Item::double_value(std::floor(v->as_double())));
    case AtomicKind::Float: return Sequence::single(Item(AtomicValue::float_value(std::floor(v->to_double()))));
    case AtomicKind::Decimal: {
      const Decimal& d = v->as_decimal();
      BigInt scale = 1;
      for (int i = 0; i < d.scale(); ++i) scale *= 10;
      BigInt q = d.unscaled() / scale;
      if (d.unscaled() < 0 && q * scale != d.unscaled()) q -= 1;
      return Sequence::single(Item(AtomicValue::decimal(Decimal::from_integer(q))));
    }
    default: return Sequence::single(Item(*v));
  }
}

Sequence string_length_impl(BuiltinCall& call) {
  std::string s = string_value(call.args[0], "string-length");
  std::int64_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return Sequence::single(Item::integer(n));
}

Sequence concat_impl(BuiltinCall& call) {
  return Sequence::single(Item::string(string_value(call.args[0], "concat") + string_value(call.args[1], "concat")));
}

Sequence string_join_impl(BuiltinCall& call) {
  std::string separator = string_argument(call.args[1], "string-join");
  std::string out;
  bool first = true;
  auto cursor = call.args[0].open();
  while (auto item = cursor->next()) {
    if (!item->is_atomic()) fail(ErrorCode::TypeError, "string-join expects atomic values");
    if (!first) out += separator;
    out += item->atomic().lexical();
    first = false;
  }
  return Sequence::single(Item::string(std::move(out)));
}

Sequence change_case(BuiltinCall& call, bool upper) {
  std::string s = string_value(call.args[0], upper ? "upper-case" : "lower-case");
  for (char& c : s) {
    c = static_cast<char>(upper ? std::toupper(static_cast<unsigned char>(c)) : std::tolower(static_cast<unsigned char>(c)));
  }
  return Sequence::single(Item::string(std::move(s)));
}

Sequence substring_around(BuiltinCall& call, bool before) {
  std::string s = string_value(call.args[0], "substring");
  std::string needle = string_value(call.args[1], "substring");
  std::size_t hit = s.find(needle);
  if (hit == std::string::npos) return Sequence::single(Item::string(""));
  return Sequence::single(Item::string(before ? s.substr(0, hit) : s.substr(hit + needle.size())));
}

Sequence number_impl(BuiltinCall& call) {
  auto v = optional_atomic(call.args[0], "number");
  if (!v) return Sequence::single(Item::double_value(std::nan("")));
  try {
    return Sequence::single(Item(atomic_cast(*v, AtomicKind::Double)));
  } catch (const Error&) {
    return Sequence::single(Item::double_value(std::nan("")));
  }
}

Sequence size_impl(BuiltinCall& call) {
  auto item = optional_item(call.args[0], "size");
  if (!item) return Sequence::empty();
  if (!item->is_array()) fail(ErrorCode::TypeError, "size expects an array, got " + item->type_name());
  return Sequence::single(Item::integer(static_cast<std::int64_t>(item->array().size())));
}

Sequence members_impl(BuiltinCall& call) {
  std::vector<Item> out;
  for (const Item& item : materialize(call.args[0], call.ctx.materialization_cap())) {
    if (!item.is_array()) continue;
    for (const Item& m : item.array().members()) out.push_back(m);
  }
  return Sequence::materialized(std::move(out));
}

Sequence keys_impl(BuiltinCall& call) {
  std::vector<Item> out;
  std::set<std::string> seen;
  auto cursor = call.args[0].open();
  while (auto item = cursor->next()) {
    if (!item->is_object()) continue;
    for (const auto& [key, value] : item->object().fields()) {
      if (seen.insert(key).second) out.push_back(Item::string(key));
    }
  }
  return Sequence::materialized(std::move(out));
}

/// Value-equality key: numbers by value, other kinds by lexical form.
std::string distinct_key(const AtomicValue& v) {
  if (v.is_numeric()) {
    if (is_integer_kind(v.kind())) return "n:" + v.as_integer().str();
    if (v.kind() == AtomicKind::Decimal && v.as_decimal().is_integral()) {
      return "n:" + v.as_decimal().unscaled().str();
    }
    double d = v.to_double();
    if (d == std::floor(d) && std::abs(d) < 1e15) return "n:" + std::to_string(static_cast<std::int64_t>(d));
    return "n:" + format_double(d);
  }
  return std::string(kind_name(v.kind())) + ":" + v.lexical();
}

Sequence distinct_values_impl(BuiltinCall& call) {
  std::vector<Item> out;
  std::set<std::string> seen;
  for (const AtomicValue& v : atomics(call.args[0], "distinct-values", call.ctx.materialization_cap())) {
    if (seen.insert(distinct_key(v)).second) out.push_back(Item(v));
  }
  return Sequence::materialized(std::move(out));
}

Sequence deep_equal_impl(BuiltinCall& call) {
  std::vector<Item> a = materialize(call.args[0], call.ctx.materialization_cap());
  std::vector<Item> b = materialize(call.args[1], call.ctx.materialization_cap());
  if (a.size() != b.size()) return boolean_result(false);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!deep_equal(a[i], b[i])) return boolean_result(false);
  }
  return boolean_result(true);
}

Sequence serialize_impl(BuiltinCall& call) {
  std::string out;
  bool first = true;
  auto cursor = call.args[0].open();
  while (auto item = cursor->next()) {
    if (!first) out += ' ';
    canonical_serialize(*item, out);
    first = false;
  }
  return Sequence::single(Item::string(std::move(out)));
}

BuiltinSpec spec(std::string name, std::vector<ST> params, ST result, M mode, bool row_scalar, BuiltinImpl impl) {
  return BuiltinSpec{std::move(name), FunctionSignature{std::move(params), std::move(result)}, mode, row_scalar,
                     std::move(impl)};
}

std::vector<BuiltinSpec> make_catalog() {
  const bool pure = true;
  const bool effectful = false;
  std::vector<BuiltinSpec> c;
  c.push_back(spec("unparsed-text-lines", {string_one()}, string_star(), M::LocalSeq, effectful, [](BuiltinCall& call) {
    return Sequence::stream(std::make_shared<LinesCursor>(string_argument(call.args[0], "unparsed-text-lines")));
  }));
  c.push_back(spec("json-lines", {string_one()}, item_star(), M::LocalSeq, effectful, [](BuiltinCall& call) {
    return Sequence::stream(std::make_shared<JsonLinesCursor>(string_argument(call.args[0], "json-lines")));
  }));
  c.push_back(spec("tokenize", {string_opt(), string_one()}, string_star(), M::LocalSeq, pure, tokenize_impl));
  c.push_back(spec("contains", {string_opt(), string_opt()}, boolean_one(), M::LocalOne, pure, [](BuiltinCall& call) {
    return boolean_result(string_value(call.args[0], "contains").find(string_value(call.args[1], "contains")) !=
                          std::string::npos);
  }));
  c.push_back(spec("head", {item_star()}, item_opt(), M::LocalOne, pure, head_impl));
  c.push_back(spec("tail", {item_star()}, item_star(), M::LocalSeq, pure, tail_impl));
  c.push_back(spec("count", {item_star()}, integer_one(), M::LocalOne, pure, count_impl));
  c.push_back(spec("string", {item_opt()}, string_one(), M::LocalOne, pure, string_impl));
  c.push_back(spec("annotate", {item_star(), ST::object_one()}, ST::object_star(), M::Frame, effectful, annotate_impl));
  c.push_back(spec("get-transformer", {string_one(), ST::object_one()}, ST::function_one(transformer_signature()),
                   M::LocalOne, effectful, get_transformer_impl));
  c.push_back(spec("get-estimator", {string_one(), ST::object_one()}, ST::function_one(estimator_signature()),
                   M::LocalOne, effectful, get_estimator_impl));
  c.push_back(spec("save-model", {any_function_one(), string_one()}, item_opt(), M::LocalOne, effectful, save_model_impl));
  c.push_back(spec("load-model", {string_one()}, ST::function_one(transformer_signature()), M::LocalOne, effectful,
                   load_model_impl));

  c.push_back(spec("exists", {item_star()}, boolean_one(), M::LocalOne, pure, [](BuiltinCall& call) {
    return boolean_result(call.args[0].is_single() || call.args[0].open()->next().has_value());
  }));
  c.push_back(spec("empty", {item_star()}, boolean_one(), M::LocalOne, pure, [](BuiltinCall& call) {
    return boolean_result(!call.args[0].is_single() && !call.args[0].open()->next().has_value());
  }));
  c.push_back(spec("sum", {atomic_star()}, atomic_type(AtomicKind::Double, Occurrence::One), M::LocalOne, pure, sum_impl));
  c.push_back(spec("avg", {atomic_star()}, atomic_opt(), M::LocalOne, pure, avg_impl));
  c.push_back(spec("min", {atomic_star()}, atomic_opt(), M::LocalOne, pure, [](BuiltinCall& call) { return extremum(call, false); }));
  c.push_back(spec("max", {atomic_star()}, atomic_opt(), M::LocalOne, pure, [](BuiltinCall& call) { return extremum(call, true); }));
  c.push_back(spec("abs", {atomic_opt()}, atomic_opt(), M::LocalOne, pure, abs_impl));
  c.push_back(spec("floor", {atomic_opt()}, atomic_opt(), M::LocalOne, pure, floor_impl));
  c.push_back(spec("string-length", {string_opt()}, integer_one(), M::LocalOne, pure, string_length_impl));
  c.push_back(spec("concat", {atomic_opt(), atomic_opt()}, string_one(), M::LocalOne, pure, concat_impl));
  c.push_back(spec("string-join", {atomic_star(), string_one()}, string_one(), M::LocalOne, pure, string_join_impl));
  c.push_back(spec("lower-case", {string_opt()}, string_one(), M::LocalOne, pure, [](BuiltinCall& call) { return change_case(call, false); }));
  c.push_back(spec("upper-case", {string_opt()}, string_one(), M::LocalOne, pure, [](BuiltinCall& call) { return change_case(call, true); }));
  c.push_back(spec("substring-before", {string_opt(), string_opt()}, string_one(), M::LocalOne, pure,
                   [](BuiltinCall& call) { return substring_around(call, true); }));
  c.push_back(spec("substring-after", {string_opt(), string_opt()}, string_one(), M::LocalOne, pure,
                   [](BuiltinCall& call) { return substring_around(call, false); }));
  c.push_back(spec("number", {atomic_opt()}, double_one(), M::LocalOne, pure, number_impl));
  c.push_back(spec("boolean", {item_star()}, boolean_one(), M::LocalOne, pure, [](BuiltinCall& call) {
    return boolean_result(effective_boolean_value(call.args[0]));
  }));
  c.push_back(spec("size", {item_opt()}, atomic_type(AtomicKind::Integer, Occurrence::ZeroOrOne), M::LocalOne, pure, size_impl));
  c.push_back(spec("members", {item_star()}, item_star(), M::LocalSeq, pure, members_impl));
  c.push_back(spec("keys", {item_star()}, string_star(), M::LocalSeq, pure, keys_impl));
  c.push_back(spec("distinct-values", {atomic_star()}, atomic_star(), M::LocalSeq, pure, distinct_values_impl));
  c.push_back(spec("deep-equal", {item_star(), item_star()}, boolean_one(), M::LocalOne, pure, deep_equal_impl));
  c.push_back(spec("serialize", {item_star()}, string_one(), M::LocalOne, pure, serialize_impl));
  return c;
}

}  // namespace

const std::vector<BuiltinSpec>& builtin_catalog() {
  static const std::vector<BuiltinSpec> catalog = make_catalog();
  return catalog;
}

std::optional<int> find_builtin(std::string_view name, std::size_t arity) {
  const auto& catalog = builtin_catalog();
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    if (catalog[i].name == name && catalog[i].arity() == arity) return static_cast<int>(i);
  }
  return std::nullopt;
}

}  // namespace jqml
