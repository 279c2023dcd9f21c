#include "jqml/sequence.hpp"

#include "jqml/error.hpp"
#include "jqml/frame.hpp"

namespace jqml {

namespace {

class VectorCursor : public ItemCursor {
 public:
  explicit VectorCursor(std::shared_ptr<const std::vector<Item>> items) : items_(std::move(items)) {}

  std::optional<Item> next() override {
    if (next_ == items_->size()) return std::nullopt;
    return (*items_)[next_++];
  }

 private:
  std::shared_ptr<const std::vector<Item>> items_;
  std::size_t next_ = 0;
};

class SingleCursor : public ItemCursor {
 public:
  explicit SingleCursor(std::shared_ptr<const Item> item) : item_(std::move(item)) {}

  std::optional<Item> next() override {
    if (!item_) return std::nullopt;
    Item out = *item_;
    item_.reset();
    return out;
  }

 private:
  std::shared_ptr<const Item> item_;
};

/// Hands out the shared cursor once; later opens see an exhausted stream.
class ConsumedCursor : public ItemCursor {
 public:
  std::optional<Item> next() override { return std::nullopt; }
};

}  // namespace

Sequence::Sequence() : items_(std::make_shared<const std::vector<Item>>()) {}

Sequence Sequence::single(Item item) {
  Sequence s;
  s.rep_ = Representation::Single;
  s.items_.reset();
  s.single_ = std::make_shared<const Item>(std::move(item));
  return s;
}

Sequence Sequence::stream(std::shared_ptr<ItemCursor> cursor) {
  Sequence s;
  s.items_.reset();
  s.cursor_ = std::move(cursor);
  return s;
}

Sequence Sequence::materialized(std::vector<Item> items) {
  Sequence s;
  s.items_ = std::make_shared<const std::vector<Item>>(std::move(items));
  return s;
}

Sequence Sequence::frame(std::shared_ptr<const Frame> frame) {
  Sequence s;
  s.rep_ = Representation::Frame;
  s.items_.reset();
  s.schema_tag_ = frame->schema();
  s.frame_ = std::move(frame);
  return s;
}

std::shared_ptr<ItemCursor> Sequence::open() const {
  switch (rep_) {
    case Representation::Single: return std::make_shared<SingleCursor>(single_);
    case Representation::Frame: return frame_to_items(frame_);
    case Representation::Stream:
      if (items_) return std::make_shared<VectorCursor>(items_);
      if (!cursor_) return std::make_shared<ConsumedCursor>();
      return cursor_;
  }
  return std::make_shared<ConsumedCursor>();
}

Sequence Sequence::with_schema_tag(std::shared_ptr<const FrameColumnType> schema) const {
  Sequence s = *this;
  s.schema_tag_ = std::move(schema);
  return s;
}

std::vector<Item> materialize(const Sequence& seq, std::size_t cap) {
  auto fail_cap = [&] {
    fail(ErrorCode::MaterializationCapExceeded,
         "sequence exceeds the materialization cap of " + std::to_string(cap) + " items");
  };
  switch (seq.representation()) {
    case Sequence::Representation::Single:
      if (cap < 1) fail_cap();
      return {seq.item()};
    case Sequence::Representation::Frame: {
      const Frame& frame = *seq.frame();
      if (frame.row_count() > cap) fail_cap();
      std::vector<Item> out;
      out.reserve(frame.row_count());
      for (std::size_t i = 0; i < frame.row_count(); ++i) out.push_back(frame.row(i));
      return out;
    }
    case Sequence::Representation::Stream:
      if (const auto* items = seq.items()) {
        if (items->size() > cap) fail_cap();
        return *items;
      }
      break;
  }
  std::vector<Item> out;
  auto cursor = seq.open();
  while (auto item = cursor->next()) {
    if (out.size() == cap) fail_cap();
    out.push_back(std::move(*item));
  }
  return out;
}

Sequence materialize_sequence(const Sequence& seq, std::size_t cap) {
  if (!seq.is_lazy()) {
    if (seq.is_stream() && seq.items() && seq.items()->size() > cap) materialize(seq, cap);
    return seq;
  }
  return Sequence::materialized(materialize(seq, cap)).with_schema_tag(seq.schema_tag());
}

Sequence lower_to_stream(const Sequence& seq) {
  if (!seq.is_frame()) return seq;
  return Sequence::stream(frame_to_items(seq.frame())).with_schema_tag(seq.schema_tag());
}

std::size_t count_items(const Sequence& seq) {
  switch (seq.representation()) {
    case Sequence::Representation::Single: return 1;
    case Sequence::Representation::Frame: return seq.frame()->row_count();
    case Sequence::Representation::Stream:
      if (const auto* items = seq.items()) return items->size();
      break;
  }
  std::size_t n = 0;
  auto cursor = seq.open();
  while (cursor->next()) ++n;
  return n;
}

bool effective_boolean_value(const Sequence& seq) {
  auto cursor = seq.open();
  auto first = cursor->next();
  if (!first) return false;
  if (!first->is_atomic()) {
    fail(ErrorCode::EbvError, "effective boolean value of a sequence starting with " +
                                  first->type_name() + " is not defined");
  }
  if (cursor->next()) {
    fail(ErrorCode::EbvError, "effective boolean value of a sequence of more than one item");
  }
  const AtomicValue& value = first->atomic();
  switch (value.kind()) {
    case AtomicKind::Boolean: return value.as_bool();
    case AtomicKind::Null: return false;
    case AtomicKind::String: return !value.as_string().empty();
    case AtomicKind::Double:
    case AtomicKind::Float: {
      double d = value.as_double();
      return d != 0 && d == d;
    }
    default:
      if (value.is_numeric()) return value.to_decimal().sign() != 0;
      fail(ErrorCode::EbvError,
           "effective boolean value of " + std::string(kind_name(value.kind())) + " is not defined");
  }
}

}  // namespace jqml
