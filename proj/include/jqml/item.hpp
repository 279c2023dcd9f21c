#pragma once

#include "jqml/atomic.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace jqml {

class ObjectItem;
class ArrayItem;
class FunctionItem;

/// The universal value: an atomic, an object, an array or a function item.
/// Items are immutable; objects, arrays and functions are shared.
class Item {
 public:
  enum class Type { Atomic, Object, Array, Function };

  Item() = default;
  Item(AtomicValue value) : value_(std::move(value)) {}  // NOLINT: implicit by design of the data model

  static Item null() { return Item(); }
  static Item string(std::string value) { return AtomicValue::string(std::move(value)); }
  static Item boolean(bool value) { return AtomicValue::boolean(value); }
  static Item integer(std::int64_t value) { return AtomicValue::integer(value); }
  static Item double_value(double value) { return AtomicValue::double_value(value); }
  /// Throws DUPLICATE_KEY on a repeated key.
  static Item object(std::vector<std::pair<std::string, Item>> fields);
  static Item array(std::vector<Item> members);
  static Item function(std::shared_ptr<const FunctionItem> fn);

  Type type() const { return static_cast<Type>(value_.index()); }
  bool is_atomic() const { return type() == Type::Atomic; }
  bool is_object() const { return type() == Type::Object; }
  bool is_array() const { return type() == Type::Array; }
  bool is_function() const { return type() == Type::Function; }

  const AtomicValue& atomic() const { return std::get<AtomicValue>(value_); }
  const ObjectItem& object() const { return *std::get<std::shared_ptr<const ObjectItem>>(value_); }
  const ArrayItem& array() const { return *std::get<std::shared_ptr<const ArrayItem>>(value_); }
  const FunctionItem& function() const { return *function_ptr(); }
  const std::shared_ptr<const FunctionItem>& function_ptr() const {
    return std::get<std::shared_ptr<const FunctionItem>>(value_);
  }

  /// "string", "object", "array", "function" etc. for diagnostics.
  std::string type_name() const;

 private:
  std::variant<AtomicValue, std::shared_ptr<const ObjectItem>, std::shared_ptr<const ArrayItem>,
               std::shared_ptr<const FunctionItem>>
      value_;
};

class ObjectItem {
 public:
  using Field = std::pair<std::string, Item>;

  explicit ObjectItem(std::vector<Field> fields);
  ObjectItem(const ObjectItem&) = delete;
  ObjectItem& operator=(const ObjectItem&) = delete;

  const std::vector<Field>& fields() const { return fields_; }
  std::size_t size() const { return fields_.size(); }
  const Item* find(std::string_view key) const;

 private:
  static constexpr std::size_t kIndexThreshold = 12;

  std::vector<Field> fields_;
  std::unordered_map<std::string_view, std::size_t> index_;
};

class ArrayItem {
 public:
  explicit ArrayItem(std::vector<Item> members) : members_(std::move(members)) {}

  const std::vector<Item>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }

 private:
  std::vector<Item> members_;
};

/// Deterministic JSON text: keys in construction order, `", "` and `": "`
/// separators, shortest round-trip doubles. Throws SERIALIZE_FUNCTION when a
/// function item is reachable.
std::string canonical_serialize(const Item& item);
void canonical_serialize(const Item& item, std::string& out);

/// Parses one JSON value. Integers become `integer`, numbers with a fraction
/// become `decimal`, numbers with an exponent become `double`.
Item parse_json(std::string_view text);

/// Structural equality: numeric promotion for atomics, key order ignored,
/// function items never equal.
bool deep_equal(const Item& a, const Item& b);

}  // namespace jqml
