#pragma once

#include "jqml/schema.hpp"
#include "jqml/sequence.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace jqml {

/// One column of a frame. Atomic columns use a typed contiguous buffer;
/// arrays are an offsets vector over a child column (for Array(Double) the
/// child is a flat double buffer); records hold one child per field.
class ColumnVector {
 public:
  const FrameColumnType& type() const { return type_; }
  std::size_t size() const { return size_; }

  Item get(std::size_t row) const;
  /// Numeric scalar widened to double.
  double numeric(std::size_t row) const;

  const std::vector<double>& doubles() const { return doubles_; }
  const std::vector<std::int64_t>& ints() const { return ints_; }
  const std::vector<std::uint8_t>& bools() const { return bools_; }
  const std::vector<std::string>& strings() const { return strings_; }
  const std::vector<AtomicValue>& atoms() const { return atoms_; }
  /// size() + 1 entries for array columns; nondecreasing.
  const std::vector<std::uint64_t>& offsets() const { return offsets_; }
  std::size_t child_count() const { return children_.size(); }
  const ColumnVector& child(std::size_t i) const { return *children_[i]; }

  std::shared_ptr<const ColumnVector> gather(std::span<const std::size_t> rows) const;

  /// Array(Double) column from offsets and a flat value buffer.
  static std::shared_ptr<const ColumnVector> dense_vectors(std::vector<std::uint64_t> offsets,
                                                           std::vector<double> values);
  /// Array(String) column from offsets and a flat string buffer.
  static std::shared_ptr<const ColumnVector> string_arrays(std::vector<std::uint64_t> offsets,
                                                           std::vector<std::string> values);
  static std::shared_ptr<const ColumnVector> of_doubles(std::vector<double> values);

 private:
  friend class ColumnBuilder;

  FrameColumnType type_;
  std::size_t size_ = 0;
  std::vector<double> doubles_;
  std::vector<std::int64_t> ints_;
  std::vector<std::uint8_t> bools_;
  std::vector<std::string> strings_;
  std::vector<AtomicValue> atoms_;
  std::vector<std::uint64_t> offsets_;
  std::vector<std::shared_ptr<const ColumnVector>> children_;
};

/// Appends validated items to a column. Throws SCHEMA_MISMATCH.
class ColumnBuilder {
 public:
  explicit ColumnBuilder(FrameColumnType type);
  ColumnBuilder(ColumnBuilder&&) noexcept;
  ColumnBuilder& operator=(ColumnBuilder&&) noexcept;
  ~ColumnBuilder();

  void append(const Item& value);
  std::shared_ptr<const ColumnVector> finish();

 private:
  std::unique_ptr<ColumnVector> column_;
  std::vector<ColumnBuilder> children_;
};

/// Columnar, schema-tagged store of validated homogeneous objects.
class Frame {
 public:
  using Schema = FrameColumnType;

  /// `schema` must be a Record type with one column per field.
  Frame(std::shared_ptr<const Schema> schema, std::vector<std::shared_ptr<const ColumnVector>> columns,
        std::size_t rows);

  static std::shared_ptr<const Frame> from_items(std::span<const Item> rows,
                                                 std::shared_ptr<const Schema> schema);
  static std::shared_ptr<const Frame> from_cursor(ItemCursor& rows,
                                                  std::shared_ptr<const Schema> schema);

  const std::shared_ptr<const Schema>& schema() const { return schema_; }
  const std::vector<std::pair<std::string, FrameColumnType>>& fields() const {
    return schema_->fields;
  }
  std::size_t row_count() const { return rows_; }
  std::size_t column_count() const { return columns_.size(); }

  const ColumnVector& column(std::size_t index) const { return *columns_[index]; }
  const std::shared_ptr<const ColumnVector>& column_ptr(std::size_t index) const {
    return columns_[index];
  }
  std::optional<std::size_t> column_index(std::string_view name) const;
  /// Throws UNKNOWN_COLUMN.
  std::size_t require_column(std::string_view name) const;

  /// Row `i` as an object with fields in schema order.
  Item row(std::size_t i) const;
  /// Row `i` restricted to the given columns.
  Item row(std::size_t i, std::span<const std::size_t> columns) const;

 private:
  std::shared_ptr<const Schema> schema_;
  std::vector<std::shared_ptr<const ColumnVector>> columns_;
  std::size_t rows_;
};

std::shared_ptr<ItemCursor> frame_to_items(std::shared_ptr<const Frame> frame);

/// Keeps rows for which `keep(row_index)` is true; order preserved. With
/// more than one partition, row ranges are evaluated concurrently.
std::shared_ptr<const Frame> frame_filter(const Frame& frame,
                                          const std::function<bool(std::size_t)>& keep,
                                          std::size_t partitions = 1);

/// Row-object predicate variant. `projection` restricts the row objects
/// passed to `predicate` to the listed columns (all columns when empty).
/// Errors are re-raised with the failing row index.
std::shared_ptr<const Frame> frame_filter_rows(const Frame& frame,
                                               const std::function<bool(const Item&)>& predicate,
                                               std::span<const std::size_t> projection = {});

/// Appends a column computed per row. Throws DUPLICATE_COLUMN.
std::shared_ptr<const Frame> frame_add_column(const Frame& frame, std::string name,
                                              FrameColumnType type,
                                              const std::function<Item(std::size_t)>& generator);
/// Appends a prebuilt column. Throws DUPLICATE_COLUMN.
std::shared_ptr<const Frame> frame_with_column(const Frame& frame, std::string name,
                                               std::shared_ptr<const ColumnVector> column);

/// Throws UNKNOWN_COLUMN.
std::shared_ptr<const Frame> frame_project(const Frame& frame, std::span<const std::string> names);

inline std::size_t frame_count(const Frame& frame) { return frame.row_count(); }

}  // namespace jqml
