#include "jqml/schema.hpp"

#include "jqml/error.hpp"
#include "jqml/frame.hpp"

#include <unordered_set>

namespace jqml {

TypeDescriptor TypeDescriptor::atomic_type(AtomicKind kind) {
  TypeDescriptor td;
  td.kind = Kind::Atomic;
  td.atomic = kind;
  return td;
}

TypeDescriptor TypeDescriptor::array_of(TypeDescriptor member) {
  TypeDescriptor td;
  td.kind = Kind::Array;
  td.member = std::make_shared<const TypeDescriptor>(std::move(member));
  return td;
}

TypeDescriptor TypeDescriptor::record(std::vector<std::pair<std::string, TypeDescriptor>> fields) {
  TypeDescriptor td;
  td.kind = Kind::Record;
  td.fields = std::move(fields);
  return td;
}

Item TypeDescriptor::to_item() const {
  switch (kind) {
    case Kind::Atomic: return Item::string(std::string(kind_name(atomic)));
    case Kind::Array: return Item::array({member->to_item()});
    case Kind::Record: {
      std::vector<std::pair<std::string, Item>> out;
      out.reserve(fields.size());
      for (const auto& [name, type] : fields) out.emplace_back(name, type.to_item());
      return Item::object(std::move(out));
    }
  }
  return Item();
}

bool TypeDescriptor::operator==(const TypeDescriptor& other) const {
  if (kind != other.kind) return false;
  switch (kind) {
    case Kind::Atomic: return atomic == other.atomic;
    case Kind::Array: return *member == *other.member;
    case Kind::Record: return fields == other.fields;
  }
  return false;
}

FrameColumnType FrameColumnType::of_atomic(AtomicKind kind) {
  FrameColumnType t;
  t.atomic = kind;
  switch (kind) {
    case AtomicKind::Byte: t.tag = Tag::Byte; break;
    case AtomicKind::Short: t.tag = Tag::Short; break;
    case AtomicKind::Int: t.tag = Tag::Integer; break;
    case AtomicKind::Long: t.tag = Tag::Long; break;
    case AtomicKind::Boolean: t.tag = Tag::Boolean; break;
    case AtomicKind::Double: t.tag = Tag::Double; break;
    case AtomicKind::Float: t.tag = Tag::Float; break;
    case AtomicKind::Integer:
    case AtomicKind::Decimal: t.tag = Tag::Decimal; break;
    case AtomicKind::String: t.tag = Tag::String; break;
    case AtomicKind::Null: t.tag = Tag::Null; break;
    case AtomicKind::Date: t.tag = Tag::Date; break;
    case AtomicKind::DateTime: t.tag = Tag::Timestamp; break;
    case AtomicKind::HexBinary: t.tag = Tag::Binary; break;
  }
  return t;
}

FrameColumnType FrameColumnType::array_of(FrameColumnType element) {
  FrameColumnType t;
  t.tag = Tag::Array;
  t.element = std::make_shared<const FrameColumnType>(std::move(element));
  return t;
}

FrameColumnType FrameColumnType::record(std::vector<std::pair<std::string, FrameColumnType>> fields) {
  FrameColumnType t;
  t.tag = Tag::Record;
  t.fields = std::move(fields);
  return t;
}

bool FrameColumnType::is_numeric() const {
  switch (tag) {
    case Tag::Byte:
    case Tag::Short:
    case Tag::Integer:
    case Tag::Long:
    case Tag::Double:
    case Tag::Float:
    case Tag::Decimal:
      return true;
    default:
      return false;
  }
}

bool FrameColumnType::is_dense_vector() const {
  return tag == Tag::Array && element->tag == Tag::Double;
}

std::optional<std::size_t> FrameColumnType::field_index(std::string_view name) const {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].first == name) return i;
  }
  return std::nullopt;
}

std::string FrameColumnType::to_string() const {
  std::string out(frame_tag_name(tag));
  if (tag == Tag::Array) {
    out += "(" + element->to_string() + ")";
  } else if (tag == Tag::Record) {
    out += "(";
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ", ";
      out += fields[i].first + ": " + fields[i].second.to_string();
    }
    out += ")";
  }
  return out;
}

bool FrameColumnType::operator==(const FrameColumnType& other) const {
  if (tag != other.tag) return false;
  if (tag == Tag::Array) return *element == *other.element;
  if (tag == Tag::Record) return fields == other.fields;
  return atomic == other.atomic;
}

std::string_view frame_tag_name(FrameColumnType::Tag tag) {
  using Tag = FrameColumnType::Tag;
  switch (tag) {
    case Tag::Byte: return "ByteType";
    case Tag::Short: return "ShortType";
    case Tag::Integer: return "IntegerType";
    case Tag::Long: return "LongType";
    case Tag::Boolean: return "BooleanType";
    case Tag::Double: return "DoubleType";
    case Tag::Float: return "FloatType";
    case Tag::Decimal: return "DecimalType";
    case Tag::String: return "StringType";
    case Tag::Null: return "NullType";
    case Tag::Date: return "DateType";
    case Tag::Timestamp: return "TimestampType";
    case Tag::Binary: return "BinaryType";
    case Tag::Array: return "ArrayType";
    case Tag::Record: return "StructType";
  }
  return "?";
}

TypeDescriptor parse_schema(const Item& descriptor) {
  switch (descriptor.type()) {
    case Item::Type::Atomic: {
      const AtomicValue& value = descriptor.atomic();
      if (!value.is_string()) {
        fail(ErrorCode::MalformedSchema,
             "atomic type names must be strings, got " + descriptor.type_name());
      }
      auto kind = kind_from_name(value.as_string());
      if (!kind) fail(ErrorCode::UnknownTypeName, "unknown type name \"" + value.as_string() + "\"");
      return TypeDescriptor::atomic_type(*kind);
    }
    case Item::Type::Array: {
      const auto& members = descriptor.array().members();
      if (members.size() != 1) {
        fail(ErrorCode::MalformedSchema, "array types need exactly one member type, got " +
                                             std::to_string(members.size()));
      }
      return TypeDescriptor::array_of(parse_schema(members.front()));
    }
    case Item::Type::Object: {
      std::vector<std::pair<std::string, TypeDescriptor>> fields;
      fields.reserve(descriptor.object().size());
      for (const auto& [name, type] : descriptor.object().fields()) {
        fields.emplace_back(name, parse_schema(type));
      }
      return TypeDescriptor::record(std::move(fields));
    }
    case Item::Type::Function:
      fail(ErrorCode::MalformedSchema, "a function item is not a schema");
  }
  fail(ErrorCode::MalformedSchema, "invalid schema");
}

FrameColumnType map_frame_type(const TypeDescriptor& type) {
  switch (type.kind) {
    case TypeDescriptor::Kind::Atomic: return FrameColumnType::of_atomic(type.atomic);
    case TypeDescriptor::Kind::Array: return FrameColumnType::array_of(map_frame_type(*type.member));
    case TypeDescriptor::Kind::Record: {
      std::vector<std::pair<std::string, FrameColumnType>> fields;
      fields.reserve(type.fields.size());
      for (const auto& [name, field] : type.fields) fields.emplace_back(name, map_frame_type(field));
      return FrameColumnType::record(std::move(fields));
    }
  }
  return {};
}

TypeDescriptor descriptor_of(const FrameColumnType& type) {
  switch (type.tag) {
    case FrameColumnType::Tag::Array: return TypeDescriptor::array_of(descriptor_of(*type.element));
    case FrameColumnType::Tag::Record: {
      std::vector<std::pair<std::string, TypeDescriptor>> fields;
      fields.reserve(type.fields.size());
      for (const auto& [name, field] : type.fields) fields.emplace_back(name, descriptor_of(field));
      return TypeDescriptor::record(std::move(fields));
    }
    default:
      return TypeDescriptor::atomic_type(type.atomic);
  }
}

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& reason) {
  fail(ErrorCode::ValidationError, "at " + path + ": " + reason);
}

Item validate_at(const Item& item, const TypeDescriptor& type, std::string& path) {
  switch (type.kind) {
    case TypeDescriptor::Kind::Atomic: {
      std::string expected(kind_name(type.atomic));
      if (!item.is_atomic()) invalid(path, "expected " + expected + ", got " + item.type_name());
      const AtomicValue& value = item.atomic();
      if (value.is_null() != (type.atomic == AtomicKind::Null)) {
        invalid(path, "expected " + expected + ", got " + item.type_name());
      }
      try {
        AtomicValue cast = atomic_cast(value, type.atomic);
        // Integer targets must not silently drop a fractional part.
        if (is_integer_kind(type.atomic) && value.is_numeric() && !is_integer_kind(value.kind()) &&
            compare_atomic(CompareOp::Ne, cast, value)) {
          invalid(path, "expected " + expected + ", got a fractional " + item.type_name());
        }
        return cast;
      } catch (const Error& e) {
        invalid(path, e.detail());
      }
    }
    case TypeDescriptor::Kind::Array: {
      if (!item.is_array()) invalid(path, "expected array, got " + item.type_name());
      const auto& members = item.array().members();
      std::vector<Item> out;
      out.reserve(members.size());
      std::size_t base = path.size();
      for (std::size_t i = 0; i < members.size(); ++i) {
        path += "[" + std::to_string(i) + "]";
        out.push_back(validate_at(members[i], *type.member, path));
        path.resize(base);
      }
      return Item::array(std::move(out));
    }
    case TypeDescriptor::Kind::Record: {
      if (!item.is_object()) invalid(path, "expected object, got " + item.type_name());
      const ObjectItem& object = item.object();
      std::vector<std::pair<std::string, Item>> out;
      out.reserve(type.fields.size());
      std::size_t base = path.size();
      for (const auto& [name, field_type] : type.fields) {
        path += "." + name;
        const Item* value = object.find(name);
        if (!value) invalid(path, "missing field");
        out.emplace_back(name, validate_at(*value, field_type, path));
        path.resize(base);
      }
      if (object.size() != type.fields.size()) {
        for (const auto& [name, value] : object.fields()) {
          bool declared = false;
          for (const auto& field : type.fields) {
            if (field.first == name) {
              declared = true;
              break;
            }
          }
          if (!declared) invalid(path + "." + name, "undeclared field");
        }
      }
      return Item::object(std::move(out));
    }
  }
  return item;
}

class ValidatingCursor : public ItemCursor {
 public:
  ValidatingCursor(std::shared_ptr<ItemCursor> source, TypeDescriptor type)
      : source_(std::move(source)), type_(std::move(type)) {}

  std::optional<Item> next() override {
    auto item = source_->next();
    if (!item) return std::nullopt;
    std::size_t row = row_++;
    if (!item->is_object()) {
      fail(ErrorCode::NonObjectRow,
           "row " + std::to_string(row) + ": expected an object, got " + item->type_name());
    }
    try {
      return validate_item(*item, type_);
    } catch (const Error& e) {
      throw e.with_context("row " + std::to_string(row));
    }
  }

 private:
  std::shared_ptr<ItemCursor> source_;
  TypeDescriptor type_;
  std::size_t row_ = 0;
};

}  // namespace

Item validate_item(const Item& item, const TypeDescriptor& type) {
  std::string path = "$";
  return validate_at(item, type, path);
}

namespace {

TypeDescriptor row_schema(const Item& schema_descriptor) {
  TypeDescriptor type = parse_schema(schema_descriptor);
  if (type.kind != TypeDescriptor::Kind::Record) {
    fail(ErrorCode::MalformedSchema, "annotate needs an object schema");
  }
  return type;
}

}  // namespace

Sequence annotate(const Sequence& rows, const Item& schema_descriptor) {
  TypeDescriptor type = row_schema(schema_descriptor);
  auto schema = std::make_shared<const FrameColumnType>(map_frame_type(type));
  ValidatingCursor cursor(rows.open(), std::move(type));
  return Sequence::frame(Frame::from_cursor(cursor, schema));
}

Sequence annotate_stream(const Sequence& rows, const Item& schema_descriptor) {
  TypeDescriptor type = row_schema(schema_descriptor);
  auto schema = std::make_shared<const FrameColumnType>(map_frame_type(type));
  auto cursor = std::make_shared<ValidatingCursor>(rows.open(), std::move(type));
  return Sequence::stream(std::move(cursor)).with_schema_tag(std::move(schema));
}

}  // namespace jqml
