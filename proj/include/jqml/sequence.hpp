#pragma once

#include "jqml/item.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

namespace jqml {

class Frame;
struct FrameColumnType;

/// Single-consumer pull iterator.
class ItemCursor {
 public:
  virtual ~ItemCursor() = default;
  virtual std::optional<Item> next() = 0;
};

/// A logical sequence of items with one of three physical representations.
/// The empty sequence is an (already materialized) stream.
class Sequence {
 public:
  enum class Representation { Single, Stream, Frame };

  Sequence();

  static Sequence empty() { return Sequence(); }
  static Sequence single(Item item);
  /// Lazy stream; may be opened once.
  static Sequence stream(std::shared_ptr<ItemCursor> cursor);
  /// Stream backed by an in-memory vector; may be opened any number of times.
  static Sequence materialized(std::vector<Item> items);
  static Sequence frame(std::shared_ptr<const Frame> frame);

  Representation representation() const { return rep_; }
  bool is_single() const { return rep_ == Representation::Single; }
  bool is_frame() const { return rep_ == Representation::Frame; }
  bool is_stream() const { return rep_ == Representation::Stream; }
  /// A stream that is not yet backed by memory.
  bool is_lazy() const { return rep_ == Representation::Stream && !items_; }

  const Item& item() const { return *single_; }
  const std::shared_ptr<const Frame>& frame() const { return frame_; }
  /// The backing vector of a materialized stream, else null.
  const std::vector<Item>* items() const { return items_.get(); }

  /// Opens a cursor over the items. Frames yield their row objects.
  std::shared_ptr<ItemCursor> open() const;

  /// Schema of a validated sequence (set for frames and for sequences lowered
  /// from frames).
  const std::shared_ptr<const FrameColumnType>& schema_tag() const { return schema_tag_; }
  Sequence with_schema_tag(std::shared_ptr<const FrameColumnType> schema) const;

 private:
  Representation rep_ = Representation::Stream;
  std::shared_ptr<const Item> single_;
  std::shared_ptr<ItemCursor> cursor_;
  std::shared_ptr<const std::vector<Item>> items_;
  std::shared_ptr<const Frame> frame_;
  std::shared_ptr<const FrameColumnType> schema_tag_;
};

/// Collects up to `cap` items; throws MATERIALIZATION_CAP_EXCEEDED if the
/// source yields more.
std::vector<Item> materialize(const Sequence& seq, std::size_t cap);

/// Like materialize(), but returns a reusable sequence and keeps the schema tag.
Sequence materialize_sequence(const Sequence& seq, std::size_t cap);

/// Frame to a lazy stream of row objects, keeping the schema tag.
Sequence lower_to_stream(const Sequence& seq);

/// Number of items; frames and materialized streams answer without iterating.
std::size_t count_items(const Sequence& seq);

/// Throws EBV_ERROR when the first item is not atomic or when more than one
/// item is present.
bool effective_boolean_value(const Sequence& seq);

}  // namespace jqml
