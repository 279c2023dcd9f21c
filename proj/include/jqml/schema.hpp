#pragma once

#include "jqml/item.hpp"
#include "jqml/sequence.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace jqml {

/// Compact JSound schema node: a string names an atomic type, a one-member
/// array wraps a member type, an object maps field names to types.
struct TypeDescriptor {
  enum class Kind { Atomic, Array, Record };

  Kind kind = Kind::Atomic;
  AtomicKind atomic = AtomicKind::String;
  std::shared_ptr<const TypeDescriptor> member;
  std::vector<std::pair<std::string, TypeDescriptor>> fields;

  static TypeDescriptor atomic_type(AtomicKind kind);
  static TypeDescriptor array_of(TypeDescriptor member);
  static TypeDescriptor record(std::vector<std::pair<std::string, TypeDescriptor>> fields);

  /// Back to the compact item form.
  Item to_item() const;
  bool operator==(const TypeDescriptor& other) const;
};

/// Column type in frame vocabulary.
struct FrameColumnType {
  enum class Tag {
    Byte,
    Short,
    Integer,
    Long,
    Boolean,
    Double,
    Float,
    Decimal,
    String,
    Null,
    Date,
    Timestamp,
    Binary,
    Array,
    Record,
  };

  Tag tag = Tag::String;
  /// Item kind that atomic columns reproduce (distinguishes `integer` from
  /// `decimal`, both stored as Decimal columns).
  AtomicKind atomic = AtomicKind::String;
  std::shared_ptr<const FrameColumnType> element;
  std::vector<std::pair<std::string, FrameColumnType>> fields;

  static FrameColumnType of_atomic(AtomicKind kind);
  static FrameColumnType array_of(FrameColumnType element);
  static FrameColumnType record(std::vector<std::pair<std::string, FrameColumnType>> fields);

  bool is_atomic() const { return tag != Tag::Array && tag != Tag::Record; }
  bool is_numeric() const;
  /// Array(Double): the dense feature-vector layout.
  bool is_dense_vector() const;
  std::optional<std::size_t> field_index(std::string_view name) const;

  /// e.g. "IntegerType", "ArrayType(DoubleType)", "StructType(a: LongType)".
  std::string to_string() const;
  bool operator==(const FrameColumnType& other) const;
};

std::string_view frame_tag_name(FrameColumnType::Tag tag);

/// Throws UNKNOWN_TYPE_NAME or MALFORMED_SCHEMA.
TypeDescriptor parse_schema(const Item& descriptor);

FrameColumnType map_frame_type(const TypeDescriptor& type);

/// Inverse of map_frame_type().
TypeDescriptor descriptor_of(const FrameColumnType& type);

/// Casts and checks `item` against `type`. All declared fields are required
/// and undeclared fields are rejected. Throws VALIDATION_ERROR carrying the
/// JSON path of the first failure.
Item validate_item(const Item& item, const TypeDescriptor& type);

/// Validates every row and stores the result as a frame. Throws
/// NON_OBJECT_ROW or VALIDATION_ERROR (with the 0-based row index).
Sequence annotate(const Sequence& rows, const Item& schema_descriptor);

/// Lazy variant of annotate(): a stream of validated rows tagged with the
/// frame schema.
Sequence annotate_stream(const Sequence& rows, const Item& schema_descriptor);

}  // namespace jqml
