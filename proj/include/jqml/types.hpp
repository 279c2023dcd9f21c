#pragma once

#include "jqml/atomic.hpp"

#include <memory>
#include <string>
#include <vector>

namespace jqml {

enum class Occurrence { One, ZeroOrOne, ZeroOrMore, OneOrMore };

struct FunctionSignature;

/// Static sequence type: an item test plus an occurrence indicator.
struct SequenceType {
  enum class ItemTest { Item, Object, Array, Atomic, Function };

  ItemTest test = ItemTest::Item;
  AtomicKind atomic = AtomicKind::String;  // meaningful for ItemTest::Atomic
  Occurrence occurrence = Occurrence::ZeroOrMore;
  /// Typed function test; null means `function(*)`.
  std::shared_ptr<const FunctionSignature> signature;

  static SequenceType item_star() { return {}; }
  static SequenceType object_star() { return {ItemTest::Object, AtomicKind::String, Occurrence::ZeroOrMore, nullptr}; }
  static SequenceType object_one() { return {ItemTest::Object, AtomicKind::String, Occurrence::One, nullptr}; }
  static SequenceType atomic_one(AtomicKind kind) { return {ItemTest::Atomic, kind, Occurrence::One, nullptr}; }
  static SequenceType function_one(FunctionSignature signature);

  bool is_single() const { return occurrence == Occurrence::One; }
  bool is_function() const { return test == ItemTest::Function; }

  std::string to_string() const;
  bool operator==(const SequenceType& other) const;
};

struct FunctionSignature {
  std::vector<SequenceType> params;
  SequenceType result;

  std::size_t arity() const { return params.size(); }
  std::string to_string() const;
  bool operator==(const FunctionSignature& other) const = default;
};

/// How a function item behaves under the dynamic-call heuristic.
enum class FunctionShape {
  Other,
  /// function(object*, object) as object*
  Transformer,
  /// function(object*, object) as function(object*, object) as object*
  Estimator,
};

FunctionShape shape_of(const FunctionSignature& signature);

FunctionSignature transformer_signature();
FunctionSignature estimator_signature();

}  // namespace jqml
