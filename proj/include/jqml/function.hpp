#pragma once

#include "jqml/sequence.hpp"
#include "jqml/types.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace jqml {

class FunctionItem;

/// What a function body can ask of the engine that invokes it.
class CallContext {
 public:
  virtual ~CallContext() = default;
  virtual Sequence call(const FunctionItem& fn, std::vector<Sequence> args) = 0;
  virtual std::size_t materialization_cap() const = 0;
  /// Worker count for data-parallel kernels.
  virtual std::size_t partitions() const { return 1; }
};

/// Opaque payload attached to native function items (e.g. a fitted model).
class NativeState {
 public:
  virtual ~NativeState() = default;
};

enum class FunctionKind { UserDefined, Builtin, Transformer, Estimator, Model };

class FunctionItem {
 public:
  using Body = std::function<Sequence(CallContext&, std::vector<Sequence>&)>;

  FunctionItem(std::string name, FunctionSignature signature, FunctionKind kind, Body body,
               std::string registry_tag = {}, std::shared_ptr<const NativeState> state = nullptr);

  const std::string& name() const { return name_; }
  const FunctionSignature& signature() const { return signature_; }
  std::size_t arity() const { return signature_.arity(); }
  FunctionKind kind() const { return kind_; }
  bool is_native() const { return kind_ != FunctionKind::UserDefined; }
  /// Registry tag of native handles, e.g. "model:LinearSVCModel".
  const std::string& registry_tag() const { return registry_tag_; }
  const std::shared_ptr<const NativeState>& state() const { return state_; }

  /// Throws ARITY_MISMATCH.
  Sequence invoke(CallContext& ctx, std::vector<Sequence> args) const;

 private:
  std::string name_;
  FunctionSignature signature_;
  FunctionKind kind_;
  Body body_;
  std::string registry_tag_;
  std::shared_ptr<const NativeState> state_;
};

}  // namespace jqml
