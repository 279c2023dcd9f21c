#include "jqml/function.hpp"

#include "jqml/error.hpp"

namespace jqml {

FunctionItem::FunctionItem(std::string name, FunctionSignature signature, FunctionKind kind,
                           Body body, std::string registry_tag,
                           std::shared_ptr<const NativeState> state)
    : name_(std::move(name)),
      signature_(std::move(signature)),
      kind_(kind),
      body_(std::move(body)),
      registry_tag_(std::move(registry_tag)),
      state_(std::move(state)) {}

Sequence FunctionItem::invoke(CallContext& ctx, std::vector<Sequence> args) const {
  if (args.size() != arity()) {
    fail(ErrorCode::ArityMismatch, (name_.empty() ? std::string("anonymous function") : name_) +
                                       " expects " + std::to_string(arity()) +
                                       " argument(s), got " + std::to_string(args.size()));
  }
  return body_(ctx, args);
}

}  // namespace jqml
