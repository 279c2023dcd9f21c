#include "jqml/frame.hpp"

#include "jqml/error.hpp"
#include "jqml/parallel.hpp"

namespace jqml {

namespace {

using Tag = FrameColumnType::Tag;

enum class Storage { Ints, Doubles, Bools, Strings, Atoms, Array, Record };

Storage storage_of(const FrameColumnType& type) {
  switch (type.tag) {
    case Tag::Byte:
    case Tag::Short:
    case Tag::Integer:
    case Tag::Long:
      return Storage::Ints;
    case Tag::Double:
    case Tag::Float:
      return Storage::Doubles;
    case Tag::Boolean:
      return Storage::Bools;
    case Tag::String:
      return Storage::Strings;
    case Tag::Array:
      return Storage::Array;
    case Tag::Record:
      return Storage::Record;
    default:
      return Storage::Atoms;
  }
}

[[noreturn]] void mismatch(const FrameColumnType& type, const Item& value) {
  fail(ErrorCode::SchemaMismatch,
       "value of type " + value.type_name() + " does not fit column type " + type.to_string());
}

}  // namespace

Item ColumnVector::get(std::size_t row) const {
  switch (storage_of(type_)) {
    case Storage::Ints: return AtomicValue::integer(ints_[row], type_.atomic);
    case Storage::Doubles:
      return type_.tag == Tag::Float ? AtomicValue::float_value(doubles_[row])
                                     : AtomicValue::double_value(doubles_[row]);
    case Storage::Bools: return AtomicValue::boolean(bools_[row] != 0);
    case Storage::Strings: return AtomicValue::string(strings_[row]);
    case Storage::Atoms: return atoms_[row];
    case Storage::Array: {
      std::vector<Item> members;
      members.reserve(offsets_[row + 1] - offsets_[row]);
      for (auto i = offsets_[row]; i < offsets_[row + 1]; ++i) members.push_back(children_[0]->get(i));
      return Item::array(std::move(members));
    }
    case Storage::Record: {
      std::vector<std::pair<std::string, Item>> fields;
      fields.reserve(children_.size());
      for (std::size_t c = 0; c < children_.size(); ++c) {
        fields.emplace_back(type_.fields[c].first, children_[c]->get(row));
      }
      return Item::object(std::move(fields));
    }
  }
  return Item();
}

double ColumnVector::numeric(std::size_t row) const {
  switch (storage_of(type_)) {
    case Storage::Ints: return static_cast<double>(ints_[row]);
    case Storage::Doubles: return doubles_[row];
    case Storage::Atoms:
      if (atoms_[row].is_numeric()) return atoms_[row].to_double();
      break;
    default:
      break;
  }
  fail(ErrorCode::NonNumericInput, "column of type " + type_.to_string() + " is not numeric");
}

std::shared_ptr<const ColumnVector> ColumnVector::gather(std::span<const std::size_t> rows) const {
  auto out = std::make_shared<ColumnVector>();
  out->type_ = type_;
  out->size_ = rows.size();
  auto pick = [&](const auto& source, auto& target) {
    target.reserve(rows.size());
    for (std::size_t r : rows) target.push_back(source[r]);
  };
  switch (storage_of(type_)) {
    case Storage::Ints: pick(ints_, out->ints_); break;
    case Storage::Doubles: pick(doubles_, out->doubles_); break;
    case Storage::Bools: pick(bools_, out->bools_); break;
    case Storage::Strings: pick(strings_, out->strings_); break;
    case Storage::Atoms: pick(atoms_, out->atoms_); break;
    case Storage::Array: {
      std::vector<std::size_t> child_rows;
      out->offsets_.reserve(rows.size() + 1);
      out->offsets_.push_back(0);
      for (std::size_t r : rows) {
        for (auto i = offsets_[r]; i < offsets_[r + 1]; ++i) child_rows.push_back(i);
        out->offsets_.push_back(child_rows.size());
      }
      out->children_.push_back(children_[0]->gather(child_rows));
      break;
    }
    case Storage::Record:
      for (const auto& child : children_) out->children_.push_back(child->gather(rows));
      break;
  }
  return out;
}

std::shared_ptr<const ColumnVector> ColumnVector::dense_vectors(std::vector<std::uint64_t> offsets,
                                                                std::vector<double> values) {
  auto child = std::make_shared<ColumnVector>();
  child->type_ = FrameColumnType::of_atomic(AtomicKind::Double);
  child->size_ = values.size();
  child->doubles_ = std::move(values);
  auto out = std::make_shared<ColumnVector>();
  out->type_ = FrameColumnType::array_of(child->type_);
  out->size_ = offsets.empty() ? 0 : offsets.size() - 1;
  out->offsets_ = std::move(offsets);
  if (out->offsets_.empty()) out->offsets_.push_back(0);
  out->children_.push_back(std::move(child));
  return out;
}

std::shared_ptr<const ColumnVector> ColumnVector::string_arrays(std::vector<std::uint64_t> offsets,
                                                                std::vector<std::string> values) {
  auto child = std::make_shared<ColumnVector>();
  child->type_ = FrameColumnType::of_atomic(AtomicKind::String);
  child->size_ = values.size();
  child->strings_ = std::move(values);
  auto out = std::make_shared<ColumnVector>();
  out->type_ = FrameColumnType::array_of(child->type_);
  out->size_ = offsets.empty() ? 0 : offsets.size() - 1;
  out->offsets_ = std::move(offsets);
  if (out->offsets_.empty()) out->offsets_.push_back(0);
  out->children_.push_back(std::move(child));
  return out;
}

std::shared_ptr<const ColumnVector> ColumnVector::of_doubles(std::vector<double> values) {
  auto out = std::make_shared<ColumnVector>();
  out->type_ = FrameColumnType::of_atomic(AtomicKind::Double);
  out->size_ = values.size();
  out->doubles_ = std::move(values);
  return out;
}

ColumnBuilder::ColumnBuilder(FrameColumnType type) : column_(std::make_unique<ColumnVector>()) {
  column_->type_ = std::move(type);
  const FrameColumnType& t = column_->type_;
  if (t.tag == Tag::Array) {
    column_->offsets_.push_back(0);
    children_.emplace_back(*t.element);
  } else if (t.tag == Tag::Record) {
    children_.reserve(t.fields.size());
    for (const auto& field : t.fields) children_.emplace_back(field.second);
  }
}

ColumnBuilder::ColumnBuilder(ColumnBuilder&&) noexcept = default;
ColumnBuilder& ColumnBuilder::operator=(ColumnBuilder&&) noexcept = default;
ColumnBuilder::~ColumnBuilder() = default;

void ColumnBuilder::append(const Item& value) {
  ColumnVector& c = *column_;
  const FrameColumnType& type = c.type_;
  Storage storage = storage_of(type);
  if (storage != Storage::Array && storage != Storage::Record) {
    if (!value.is_atomic() || value.atomic().kind() != type.atomic) mismatch(type, value);
  }
  const AtomicValue* atom = value.is_atomic() ? &value.atomic() : nullptr;
  switch (storage) {
    case Storage::Ints: c.ints_.push_back(atom->as_integer().convert_to<std::int64_t>()); break;
    case Storage::Doubles: c.doubles_.push_back(atom->as_double()); break;
    case Storage::Bools: c.bools_.push_back(atom->as_bool() ? 1 : 0); break;
    case Storage::Strings: c.strings_.push_back(atom->as_string()); break;
    case Storage::Atoms: c.atoms_.push_back(*atom); break;
    case Storage::Array: {
      if (!value.is_array()) mismatch(type, value);
      const auto& members = value.array().members();
      for (const Item& member : members) children_[0].append(member);
      c.offsets_.push_back(c.offsets_.back() + members.size());
      break;
    }
    case Storage::Record: {
      if (!value.is_object()) mismatch(type, value);
      const ObjectItem& object = value.object();
      if (object.size() != type.fields.size()) mismatch(type, value);
      for (std::size_t i = 0; i < type.fields.size(); ++i) {
        const Item* field = object.find(type.fields[i].first);
        if (!field) mismatch(type, value);
        children_[i].append(*field);
      }
      break;
    }
  }
  ++c.size_;
}

std::shared_ptr<const ColumnVector> ColumnBuilder::finish() {
  for (auto& child : children_) column_->children_.push_back(child.finish());
  children_.clear();
  std::shared_ptr<const ColumnVector> out(std::move(column_));
  return out;
}

Frame::Frame(std::shared_ptr<const Schema> schema,
             std::vector<std::shared_ptr<const ColumnVector>> columns, std::size_t rows)
    : schema_(std::move(schema)), columns_(std::move(columns)), rows_(rows) {
  if (schema_->tag != Tag::Record || schema_->fields.size() != columns_.size()) {
    fail(ErrorCode::SchemaMismatch, "frame schema does not match its columns");
  }
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i]->size() != rows_ || !(columns_[i]->type() == schema_->fields[i].second)) {
      fail(ErrorCode::SchemaMismatch, "column \"" + schema_->fields[i].first + "\" does not match");
    }
  }
}

std::shared_ptr<const Frame> Frame::from_items(std::span<const Item> rows,
                                               std::shared_ptr<const Schema> schema) {
  struct SpanCursor : ItemCursor {
    std::span<const Item> rows;
    std::size_t next_index = 0;
    std::optional<Item> next() override {
      if (next_index == rows.size()) return std::nullopt;
      return rows[next_index++];
    }
  } cursor;
  cursor.rows = rows;
  return from_cursor(cursor, std::move(schema));
}

std::shared_ptr<const Frame> Frame::from_cursor(ItemCursor& rows, std::shared_ptr<const Schema> schema) {
  if (schema->tag != Tag::Record) fail(ErrorCode::SchemaMismatch, "frame schema must be a record");
  ColumnBuilder builder(*schema);
  std::size_t count = 0;
  while (auto row = rows.next()) {
    builder.append(*row);
    ++count;
  }
  auto record = builder.finish();
  std::vector<std::shared_ptr<const ColumnVector>> columns;
  columns.reserve(record->child_count());
  for (std::size_t i = 0; i < record->child_count(); ++i) {
    // Children are owned by `record`; alias them so the columns stay valid.
    columns.emplace_back(record, &record->child(i));
  }
  return std::make_shared<const Frame>(std::move(schema), std::move(columns), count);
}

std::optional<std::size_t> Frame::column_index(std::string_view name) const {
  return schema_->field_index(name);
}

std::size_t Frame::require_column(std::string_view name) const {
  auto index = column_index(name);
  if (!index) fail(ErrorCode::UnknownColumn, "no column named \"" + std::string(name) + "\"");
  return *index;
}

Item Frame::row(std::size_t i) const {
  std::vector<std::pair<std::string, Item>> fields;
  fields.reserve(columns_.size());
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    fields.emplace_back(schema_->fields[c].first, columns_[c]->get(i));
  }
  return Item::object(std::move(fields));
}

Item Frame::row(std::size_t i, std::span<const std::size_t> columns) const {
  std::vector<std::pair<std::string, Item>> fields;
  fields.reserve(columns.size());
  for (std::size_t c : columns) fields.emplace_back(schema_->fields[c].first, columns_[c]->get(i));
  return Item::object(std::move(fields));
}

namespace {

class FrameCursor : public ItemCursor {
 public:
  explicit FrameCursor(std::shared_ptr<const Frame> frame) : frame_(std::move(frame)) {}

  std::optional<Item> next() override {
    if (next_ == frame_->row_count()) return std::nullopt;
    return frame_->row(next_++);
  }

 private:
  std::shared_ptr<const Frame> frame_;
  std::size_t next_ = 0;
};

std::shared_ptr<const Frame> gather_rows(const Frame& frame, std::span<const std::size_t> rows) {
  std::vector<std::shared_ptr<const ColumnVector>> columns;
  columns.reserve(frame.column_count());
  for (std::size_t c = 0; c < frame.column_count(); ++c) {
    columns.push_back(frame.column(c).gather(rows));
  }
  return std::make_shared<const Frame>(frame.schema(), std::move(columns), rows.size());
}

}  // namespace

std::shared_ptr<ItemCursor> frame_to_items(std::shared_ptr<const Frame> frame) {
  return std::make_shared<FrameCursor>(std::move(frame));
}

std::shared_ptr<const Frame> frame_filter(const Frame& frame,
                                          const std::function<bool(std::size_t)>& keep,
                                          std::size_t partitions) {
  std::size_t n = frame.row_count();
  std::vector<std::uint8_t> flags(n, 0);
  for_each_range(n, partitions, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t i = begin; i < end; ++i) flags[i] = keep(i) ? 1 : 0;
  });
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < n; ++i) {
    if (flags[i]) rows.push_back(i);
  }
  return gather_rows(frame, rows);
}

std::shared_ptr<const Frame> frame_filter_rows(const Frame& frame,
                                               const std::function<bool(const Item&)>& predicate,
                                               std::span<const std::size_t> projection) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < frame.row_count(); ++i) {
    Item row = projection.empty() ? frame.row(i) : frame.row(i, projection);
    bool kept = false;
    try {
      kept = predicate(row);
    } catch (const Error& e) {
      throw e.with_context("row " + std::to_string(i));
    }
    if (kept) rows.push_back(i);
  }
  return gather_rows(frame, rows);
}

std::shared_ptr<const Frame> frame_with_column(const Frame& frame, std::string name,
                                               std::shared_ptr<const ColumnVector> column) {
  if (frame.column_index(name)) {
    fail(ErrorCode::DuplicateColumn, "column \"" + name + "\" already exists");
  }
  auto fields = frame.fields();
  fields.emplace_back(std::move(name), column->type());
  auto schema = std::make_shared<const FrameColumnType>(FrameColumnType::record(std::move(fields)));
  std::vector<std::shared_ptr<const ColumnVector>> columns;
  columns.reserve(frame.column_count() + 1);
  for (std::size_t c = 0; c < frame.column_count(); ++c) columns.push_back(frame.column_ptr(c));
  columns.push_back(std::move(column));
  return std::make_shared<const Frame>(std::move(schema), std::move(columns), frame.row_count());
}

std::shared_ptr<const Frame> frame_add_column(const Frame& frame, std::string name,
                                              FrameColumnType type,
                                              const std::function<Item(std::size_t)>& generator) {
  if (frame.column_index(name)) {
    fail(ErrorCode::DuplicateColumn, "column \"" + name + "\" already exists");
  }
  ColumnBuilder builder(std::move(type));
  for (std::size_t i = 0; i < frame.row_count(); ++i) builder.append(generator(i));
  return frame_with_column(frame, std::move(name), builder.finish());
}

std::shared_ptr<const Frame> frame_project(const Frame& frame, std::span<const std::string> names) {
  std::vector<std::pair<std::string, FrameColumnType>> fields;
  std::vector<std::shared_ptr<const ColumnVector>> columns;
  for (const std::string& name : names) {
    std::size_t index = frame.require_column(name);
    fields.push_back(frame.fields()[index]);
    columns.push_back(frame.column_ptr(index));
  }
  auto schema = std::make_shared<const FrameColumnType>(FrameColumnType::record(std::move(fields)));
  return std::make_shared<const Frame>(std::move(schema), std::move(columns), frame.row_count());
}

}  // namespace jqml
