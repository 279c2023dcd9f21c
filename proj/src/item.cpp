#include "jqml/item.hpp"

#include "jqml/error.hpp"
#include "jqml/function.hpp"

#include <json.hpp>

namespace jqml {

Item Item::object(std::vector<std::pair<std::string, Item>> fields) {
  Item item;
  item.value_ = std::make_shared<const ObjectItem>(std::move(fields));
  return item;
}

Item Item::array(std::vector<Item> members) {
  Item item;
  item.value_ = std::make_shared<const ArrayItem>(std::move(members));
  return item;
}

Item Item::function(std::shared_ptr<const FunctionItem> fn) {
  Item item;
  item.value_ = std::move(fn);
  return item;
}

std::string Item::type_name() const {
  switch (type()) {
    case Type::Atomic: return std::string(kind_name(atomic().kind()));
    case Type::Object: return "object";
    case Type::Array: return "array";
    case Type::Function: return "function";
  }
  return "?";
}

ObjectItem::ObjectItem(std::vector<Field> fields) : fields_(std::move(fields)) {
  if (fields_.size() >= kIndexThreshold) {
    index_.reserve(fields_.size());
    for (std::size_t i = 0; i < fields_.size(); ++i) {
      if (!index_.emplace(fields_[i].first, i).second) {
        fail(ErrorCode::DuplicateKey, "duplicate key \"" + fields_[i].first + "\" in object");
      }
    }
    return;
  }
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (fields_[i].first == fields_[j].first) {
        fail(ErrorCode::DuplicateKey, "duplicate key \"" + fields_[i].first + "\" in object");
      }
    }
  }
}

const Item* ObjectItem::find(std::string_view key) const {
  if (!index_.empty()) {
    auto it = index_.find(key);
    return it == index_.end() ? nullptr : &fields_[it->second].second;
  }
  for (const auto& [name, value] : fields_) {
    if (name == key) return &value;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

void append_json_string(std::string_view text, std::string& out) {
  out += '"';
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          static constexpr char kHex[] = "0123456789abcdef";
          out += "\\u00";
          out += kHex[(c >> 4) & 15];
          out += kHex[c & 15];
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

void append_atomic(const AtomicValue& value, std::string& out) {
  switch (value.kind()) {
    case AtomicKind::Null:
    case AtomicKind::Boolean:
    case AtomicKind::Byte:
    case AtomicKind::Short:
    case AtomicKind::Int:
    case AtomicKind::Integer:
    case AtomicKind::Long:
    case AtomicKind::Decimal:
    case AtomicKind::Double:
    case AtomicKind::Float:
      out += value.lexical();
      break;
    default:
      append_json_string(value.lexical(), out);
  }
}

}  // namespace

void canonical_serialize(const Item& item, std::string& out) {
  switch (item.type()) {
    case Item::Type::Atomic:
      append_atomic(item.atomic(), out);
      return;
    case Item::Type::Object: {
      out += '{';
      bool first = true;
      for (const auto& [key, value] : item.object().fields()) {
        if (!first) out += ", ";
        first = false;
        append_json_string(key, out);
        out += ": ";
        canonical_serialize(value, out);
      }
      out += '}';
      return;
    }
    case Item::Type::Array: {
      out += '[';
      bool first = true;
      for (const Item& member : item.array().members()) {
        if (!first) out += ", ";
        first = false;
        canonical_serialize(member, out);
      }
      out += ']';
      return;
    }
    case Item::Type::Function:
      fail(ErrorCode::SerializeFunction,
           "cannot serialize function item " + item.function().name());
  }
}

std::string canonical_serialize(const Item& item) {
  std::string out;
  canonical_serialize(item, out);
  return out;
}

// ---------------------------------------------------------------------------
// JSON parsing

namespace {

class ItemBuilder : public nlohmann::json_sax<nlohmann::json> {
 public:
  bool null() override { return push(Item::null()); }
  bool boolean(bool value) override { return push(Item::boolean(value)); }
  bool number_integer(number_integer_t value) override { return push(Item::integer(value)); }
  bool number_unsigned(number_unsigned_t value) override {
    return push(AtomicValue::integer(BigInt(value)));
  }
  bool number_float(number_float_t value, const string_t& raw) override {
    if (raw.find_first_of("eE") != std::string::npos) return push(Item::double_value(value));
    if (raw.find('.') != std::string::npos) {
      auto decimal = Decimal::parse(raw);
      if (!decimal) fail(ErrorCode::JsonParseError, "bad number " + raw);
      return push(AtomicValue::decimal(std::move(*decimal)));
    }
    auto decimal = Decimal::parse(raw);
    if (!decimal) fail(ErrorCode::JsonParseError, "bad number " + raw);
    return push(AtomicValue::integer(decimal->to_integer()));
  }
  bool string(string_t& value) override { return push(Item::string(std::move(value))); }
  bool binary(binary_t&) override {
    fail(ErrorCode::JsonParseError, "binary values are not supported");
  }
  bool start_object(std::size_t) override {
    stack_.push_back(Level{true, {}, {}, {}});
    return true;
  }
  bool key(string_t& key) override {
    stack_.back().pending_key = std::move(key);
    return true;
  }
  bool end_object() override {
    Level level = std::move(stack_.back());
    stack_.pop_back();
    return push(Item::object(std::move(level.fields)));
  }
  bool start_array(std::size_t) override {
    stack_.push_back(Level{false, {}, {}, {}});
    return true;
  }
  bool end_array() override {
    Level level = std::move(stack_.back());
    stack_.pop_back();
    return push(Item::array(std::move(level.members)));
  }
  bool parse_error(std::size_t position, const std::string&,
                   const nlohmann::detail::exception& ex) override {
    fail(ErrorCode::JsonParseError,
         "invalid JSON at byte " + std::to_string(position) + ": " + ex.what());
  }

  Item result() { return std::move(result_); }

 private:
  struct Level {
    bool is_object;
    std::vector<std::pair<std::string, Item>> fields;
    std::vector<Item> members;
    std::string pending_key;
  };

  bool push(Item item) {
    if (stack_.empty()) {
      result_ = std::move(item);
    } else if (stack_.back().is_object) {
      stack_.back().fields.emplace_back(std::move(stack_.back().pending_key), std::move(item));
    } else {
      stack_.back().members.push_back(std::move(item));
    }
    return true;
  }

  std::vector<Level> stack_;
  Item result_;
};

}  // namespace

Item parse_json(std::string_view text) {
  ItemBuilder builder;
  nlohmann::json::sax_parse(text.begin(), text.end(), &builder);
  return builder.result();
}

// ---------------------------------------------------------------------------
// deep-equal

bool deep_equal(const Item& a, const Item& b) {
  if (a.type() != b.type()) return false;
  switch (a.type()) {
    case Item::Type::Atomic:
      return atomic_deep_equal(a.atomic(), b.atomic());
    case Item::Type::Object: {
      const ObjectItem& x = a.object();
      const ObjectItem& y = b.object();
      if (x.size() != y.size()) return false;
      for (const auto& [key, value] : x.fields()) {
        const Item* other = y.find(key);
        if (!other || !deep_equal(value, *other)) return false;
      }
      return true;
    }
    case Item::Type::Array: {
      const auto& x = a.array().members();
      const auto& y = b.array().members();
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (!deep_equal(x[i], y[i])) return false;
      }
      return true;
    }
    case Item::Type::Function:
      return false;
  }
  return false;
}

}  // namespace jqml
